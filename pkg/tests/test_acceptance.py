"""Acceptance criteria on the reference instance: p=2, N=3, h = 1/(1+rho^4),
q=4 (superlinear) or q=1.5 (sublinear), mesh M=400, R_max=60, r_core=5.

Each test records a single PASS/FAIL line, printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from semipositone.barriers import barrier_z, barrier_zh, compare, hopf_constant, liouville_indicator, measured_A
from semipositone.kernels import quad_values
from semipositone.model import Regime, standard_spec
from semipositone.nonlinearity import ShiftedNonlinearity
from semipositone.radialfem import (
    RadialFunction,
    build_mesh,
    check_critical,
    energy,
    grad_energy,
    p_laplacian_fd,
    zero_function,
)
from semipositone.solvers import SolverParams, convergence_study, minimize, mountain_pass_solve, sweep_a

M, R_MAX, R_CORE = 400, 60.0, 5.0
A_GRID = [0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0]


def mesh(M=M, R_max=R_MAX):
    return build_mesh(M, R_max, R_CORE)


def test_criterion_01_barrier_oracle(acceptance):
    t0 = time.perf_counter()
    worst_in = worst_out = worst_d = 0.0
    H_exact = True
    for p, N, vartheta, A, r in [(2.0, 3, 4.0, 3.0, 1.0), (3.0, 4, 5.0, 2.0, 1.0)]:
        z = barrier_z(p, N, vartheta, A, r)
        H_exact &= z.H == A * (vartheta - N) / N * r**vartheta
        for rho in np.linspace(0.05, 0.95, 20) * r:
            worst_in = max(worst_in, abs(-p_laplacian_fd(z, p, N, rho) - A) / A)
        for rho in r * np.geomspace(1.05, 20.0, 20):
            target = -z.H * rho ** (-vartheta)
            worst_out = max(worst_out, abs(-p_laplacian_fd(z, p, N, rho) - target) / abs(target))
        d_in, d_out = z.one_sided_derivatives()
        worst_d = max(worst_d, abs(d_in - d_out) / abs(d_in))
    elapsed = time.perf_counter() - t0
    ok = worst_in <= 1e-3 and worst_out <= 1e-3 and H_exact and worst_d <= 1e-12 and elapsed < 1.0
    acceptance(1, "barrier oracle", ok,
               f"interior {worst_in:.1e}, exterior {worst_out:.1e}, H exact {H_exact}, "
               f"derivative gap {worst_d:.1e}, {elapsed:.2f}s")
    assert ok


def test_criterion_02_hopf_constant(acceptance):
    t0 = time.perf_counter()
    c1 = hopf_constant(2.0, 3, 3.0, 1.0)
    worst = 0.0
    for c in (0.5, 2.0, 10.0):
        for p, N, A, r in [(2.0, 3, 3.0, 1.0), (3.0, 4, 2.0, 1.0), (1.5, 3, 0.7, 2.0)]:
            base = hopf_constant(p, N, A, r)
            worst = max(worst, abs(hopf_constant(p, N, c ** (p - 1) * A, r) - c * base) / (c * base))
    matched = barrier_zh(2.0, 3, 3.0, 1.0).tail_coeff == c1
    elapsed = time.perf_counter() - t0
    ok = c1 == 1.0 and matched and worst <= 1e-12 and elapsed < 1.0
    acceptance(2, "Hopf constant", ok, f"C1 = {c1!r}, homogeneity error {worst:.1e}, {elapsed:.3f}s")
    assert ok


def _clarke_reference(fa_t, a, t, s):
    """Branchwise oracle; fa_t is f_a(t), passed in so pow rounding matches."""
    if t > 0:
        return -fa_t * s
    if t == 0 and s > 0:
        return a * s
    return 0.0


def test_criterion_03_clarke_calculus(acceptance):
    t0 = time.perf_counter()
    base = standard_spec(Regime.SUPERLINEAR).f
    a = 0.37
    nl = ShiftedNonlinearity(base, a)
    rng = np.random.default_rng(0)
    t = np.concatenate([rng.uniform(-3, 3, 70), np.zeros(30)])
    s = np.concatenate([rng.uniform(-3, 3, 90), np.zeros(10)])
    T, S = np.meshgrid(t, s, indexing="ij")
    got = nl.clarke_neg_Fa(T, S)
    fa = np.maximum(T, 0.0) ** 3.0 - a
    ref = np.array([[_clarke_reference(fa[i, j], a, ti, si) for j, si in enumerate(s)] for i, ti in enumerate(t)])
    branches_exact = bool(np.array_equal(got, ref))
    tt = np.concatenate([t, [0.0]])
    identity = bool(np.array_equal(nl.clarke_neg_Fa(tt, tt), -nl.f_a(tt) * tt)
                    and np.array_equal(nl.clarke_neg_Fa(tt, -tt), nl.f_a(tt) * tt))
    elapsed = time.perf_counter() - t0
    ok = branches_exact and identity and T.size == 10_000 and elapsed < 1.0
    acceptance(3, "Clarke calculus", ok,
               f"{T.size} grid points, branches exact {branches_exact}, +-t identity {identity}, {elapsed:.2f}s")
    assert ok


def test_criterion_04_gradient_consistency(acceptance):
    t0 = time.perf_counter()
    m = mesh()
    rng = np.random.default_rng(4)
    eps = 1e-9
    worst = 0.0
    for i in range(100):
        spec = standard_spec(Regime.SUPERLINEAR if i % 2 == 0 else Regime.SUBLINEAR, a=0.5 * (i % 3))
        # positive profiles with every quadrature value far above the kink
        vals = 0.05 + rng.uniform(0.0, 2.0, size=M + 1) * np.exp(-m.nodes / rng.uniform(2.0, 30.0))
        assert np.min(np.abs(quad_values(vals))) > 10 * eps
        u = RadialFunction(m, vals)
        g = grad_energy(u, spec, eps)
        h = 1e-6
        E = np.empty(M + 1)
        for j in range(M + 1):
            vp, vm = vals.copy(), vals.copy()
            vp[j] += h
            vm[j] -= h
            E[j] = (energy(u.with_values(vp), spec) - energy(u.with_values(vm), spec)) / (2 * h)
        worst = max(worst, float(np.linalg.norm(g - E) / np.linalg.norm(E)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 10.0
    acceptance(4, "gradient consistency", ok, f"100 profiles, worst relative error {worst:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_05_superlinear_solve(acceptance):
    t0 = time.perf_counter()
    spec = standard_spec(Regime.SUPERLINEAR, 0.0)
    r = mountain_pass_solve(spec, mesh())
    fine = mountain_pass_solve(spec, mesh(M=2 * M))
    wide = mountain_pass_solve(spec, build_mesh(M, 2 * R_MAX, R_CORE, growth=1.06))
    elapsed = time.perf_counter() - t0
    d_mesh = abs(fine.energy - r.energy) / r.energy
    d_R = abs(wide.energy - r.energy) / r.energy
    nehari_ok = abs(r.nehari_residual) <= 1e-6 * (1 + r.dp_norm**2)
    ok = (r.converged and fine.converged and wide.converged and r.criticality.max_violation <= 1e-8
          and r.energy > 0 and r.min_value >= -1e-8 and nehari_ok and abs(r.decay_slope + 1.0) <= 0.15
          and d_mesh <= 0.02 and d_R <= 0.02 and elapsed < 60.0)
    acceptance(5, "superlinear solve", ok,
               f"violation {r.criticality.max_violation:.1e}, I = {r.energy:.6f}, min u {r.min_value:.3e}, "
               f"identity residual {r.nehari_residual:.1e}, slope {r.decay_slope:.4f}, "
               f"mesh x2 {100 * d_mesh:.3f}%, R_max x2 {100 * d_R:.3f}%, {elapsed:.1f}s")
    assert ok


def test_criterion_06_positivity_threshold(acceptance):
    t0 = time.perf_counter()
    spec = standard_spec(Regime.SUPERLINEAR, 0.0)
    rep = sweep_a(spec, mesh(), a_grid=A_GRID)
    compares = []
    for row, sol in zip(rep.rows, rep.reports):
        if row["a"] <= rep.a_star_estimate:
            A, ok_A = measured_A(sol.u, spec.with_a(row["a"]), 1.0)
            compares.append(ok_A and compare(sol.u, barrier_z(2.0, 3, 4.0, A, 1.0), 30.0)[0])
    elapsed = time.perf_counter() - t0
    ok = rep.a_star_estimate > 0 and all(compares) and elapsed < 300.0
    acceptance(6, "positivity threshold", ok,
               f"a* estimate {rep.a_star_estimate:g}, {len(compares)} comparisons pass, {elapsed:.1f}s")
    assert ok


def test_criterion_07_sublinear_solve(acceptance):
    t0 = time.perf_counter()
    spec = standard_spec(Regime.SUBLINEAR, 0.0)
    m = mesh()
    runs = [minimize(spec, m, SolverParams(seed=k)) for k in range(5)]
    r = runs[0]
    spread = max(x.energy for x in runs) - min(x.energy for x in runs)
    elapsed = time.perf_counter() - t0
    ok = (all(x.converged for x in runs) and r.energy < 0 and r.min_value >= -1e-8 and r.barrier_ok
          and spread <= 1e-6 and elapsed < 60.0)
    acceptance(7, "sublinear solve", ok,
               f"I = {r.energy:.8f}, min u {r.min_value:.3e}, positivity {r.barrier_ok}, "
               f"seed spread {spread:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_08_convergence_study(acceptance):
    t0 = time.perf_counter()
    out = convergence_study(standard_spec(Regime.SUPERLINEAR, 0.0), mesh(), a_seq=[1e-2, 1e-3, 1e-4, 0.0])
    elapsed = time.perf_counter() - t0
    d = [row["sup_distance"] for row in out["rows"]]
    ok = out["strictly_decreasing"] and all(row["status"] == "converged" for row in out["rows"]) and elapsed < 180
    acceptance(8, "convergence study", ok, "distances " + ", ".join(f"{x:.2e}" for x in d) + f", {elapsed:.1f}s")
    assert ok


def test_criterion_09_nonsmooth_zero(acceptance, sup_solution):
    m = mesh()
    worst = 0.0
    for regime in (Regime.SUPERLINEAR, Regime.SUBLINEAR):
        for a in [0.0, 1e-4, 1e-2, 1.0, 10.0, 1e3]:
            worst = max(worst, check_critical(zero_function(m), standard_spec(regime, a)).max_violation)
    separated = sup_solution.energy > energy(zero_function(m), standard_spec(Regime.SUPERLINEAR, 0.0)) == 0.0
    ok = worst == 0.0 and separated
    acceptance(9, "nonsmooth critical zero", ok,
               f"max violation at u = 0: {worst!r}, mountain-pass level {sup_solution.energy:.4f} > I(0) = 0")
    assert ok


def test_criterion_10_liouville_indicator(acceptance, sub_solution):
    spec = standard_spec(Regime.SUPERLINEAR, 0.0)
    rep = sweep_a(spec, mesh(), a_grid=A_GRID)
    sols = [(s, spec.with_a(row["a"])) for row, s in zip(rep.rows, rep.reports) if row["positive"]]
    sols.append((sub_solution, standard_spec(Regime.SUBLINEAR, 0.0)))
    ratios = []
    for s, sp in sols:
        A, _ = measured_A(s.u, sp, 1.0)
        ratios.append(liouville_indicator(s.u, (10.0, 40.0), 2.0) / hopf_constant(2.0, 3, A, 1.0))
    zero = liouville_indicator(zero_function(mesh()), (10.0, 40.0), 2.0)
    ok = len(ratios) >= 2 and min(ratios) >= 0.8 and zero == 0.0
    acceptance(10, "Liouville indicator", ok,
               f"{len(ratios)} positive solutions, min indicator / C1 = {min(ratios):.3f}, zero profile {zero!r}")
    assert ok
