import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semipositone.kernels import quad_values
from semipositone.model import NonlinearitySpec, ProblemSpec, Regime, WeightSpec, standard_spec
from semipositone.radialfem import (
    MeshError,
    RadialFunction,
    RadialMesh,
    assembly,
    build_mesh,
    check_critical,
    dp_norm,
    energy,
    grad_energy,
    lqh_norm,
    p_laplacian_fd,
    sample,
    subsup_check,
    zero_function,
)

SUP = standard_spec(Regime.SUPERLINEAR, 0.0)


def fd_gradient(u, spec, h=1e-6):
    g = np.zeros(u.mesh.M + 1)
    for i in range(u.mesh.M + 1):
        e = np.zeros_like(g)
        e[i] = h
        g[i] = (energy(u.with_values(u.values + e), spec) - energy(u.with_values(u.values - e), spec)) / (2 * h)
    return g


# --- mesh -----------------------------------------------------------------


def test_degenerate_uniform_mesh():
    m = build_mesh(16, 1.0, 1.0)
    np.testing.assert_array_equal(m.nodes, np.arange(17) / 16)


def test_graded_mesh_lands_on_R_max():
    m = build_mesh(200, 100.0, 5.0, growth=1.05)
    assert m.nodes.size == 201
    assert m.nodes[-1] == 100.0
    assert m.nodes[100] == pytest.approx(5.0)
    np.testing.assert_allclose(np.diff(m.nodes[:101]), 0.05)
    ratios = m.dr[101:] / m.dr[100:-1]
    assert np.all(ratios <= 1.05 + 1e-12)
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-9)


@pytest.mark.parametrize("kwargs", [dict(growth=0.9), dict(growth=1.0), dict(M=8), dict(r_core=0.0),
                                    dict(r_core=200.0)])
def test_build_mesh_rejects_bad_parameters(kwargs):
    args = dict(M=200, R_max=100.0, r_core=5.0, growth=1.05)
    args.update(kwargs)
    with pytest.raises(MeshError):
        build_mesh(**args)


def test_build_mesh_suggests_growth():
    with pytest.raises(MeshError, match="growth >="):
        build_mesh(40, 1000.0, 1.0, growth=1.01)


def test_mesh_json_round_trip(ref_mesh):
    m = RadialMesh.from_json(ref_mesh.to_json())
    np.testing.assert_array_equal(m.nodes, ref_mesh.nodes)
    assert (m.N, m.outer) == (ref_mesh.N, ref_mesh.outer)


@pytest.mark.parametrize("nodes", [[0.0, 1.0], [0.1, 1.0, 2.0], [0.0, 2.0, 1.0]])
def test_mesh_rejects_bad_nodes(nodes):
    with pytest.raises(MeshError):
        RadialMesh(np.array(nodes), 3)


def test_quadrature_weights(ref_mesh):
    m = ref_mesh
    assert np.all(m.gauss_w > 0.0)
    raw = m.gauss_w / (m.sphere * m.gauss_rho ** (m.N - 1))
    np.testing.assert_allclose(raw.sum(axis=1), m.dr, rtol=1e-13)


# --- radial functions -----------------------------------------------------


def test_profile_csv_round_trip(ref_mesh):
    u = sample(ref_mesh, lambda r: 1.0 / (1.0 + r))
    back = RadialFunction.from_csv(u.to_csv(), ref_mesh)
    np.testing.assert_array_equal(back.values, u.values)
    assert u.to_csv().splitlines()[0] == "rho,u"


def test_profile_shape_mismatch(ref_mesh, small_mesh):
    u = sample(small_mesh, lambda r: 1.0 / (1.0 + r))
    with pytest.raises(MeshError):
        RadialFunction.from_csv(u.to_csv(), ref_mesh)
    with pytest.raises(MeshError):
        RadialFunction(ref_mesh, np.zeros(5))


def test_values_are_read_only(small_mesh):
    u = zero_function(small_mesh)
    with pytest.raises(ValueError):
        u.values[0] = 1.0


def test_dirichlet_closure_pins_last_node():
    m = build_mesh(32, 10.0, 2.0, growth=1.2, outer="dirichlet")
    with pytest.raises(MeshError):
        RadialFunction(m, np.ones(33))
    assert sample(m, lambda r: 1.0 + 0 * r).values[-1] == 0.0


def test_harmonic_extension_beyond_mesh(small_mesh):
    u = sample(small_mesh, lambda r: 1.0 / (1.0 + r))
    R = small_mesh.R_max
    assert float(u(2 * R)) == pytest.approx(u.values[-1] / 2)


# --- norms ----------------------------------------------------------------


def test_tent_norm_hand_value():
    m = build_mesh(64, 2.0, 2.0)
    tent = sample(m, lambda r: np.maximum(1.0 - r, 0.0))
    assert dp_norm(tent, 2.0) ** 2 == pytest.approx(4 * math.pi / 3, rel=1e-13)


def test_norms_of_zero(small_mesh):
    z = zero_function(small_mesh)
    assert dp_norm(z, 2.0) == 0.0
    assert lqh_norm(z, 4.0, WeightSpec()) == 0.0


def test_lqh_norm_refinement_oracle():
    m = build_mesh(200, 2.0, 2.0)
    u = sample(m, lambda r: np.maximum(1.0 - r, 0.0))
    fine = sample(m.refined(), lambda r: np.maximum(1.0 - r, 0.0))
    h = WeightSpec(1.0, 4.0)
    assert lqh_norm(u, 3.0, h) == pytest.approx(lqh_norm(fine, 3.0, h), rel=1e-6)


def test_lqh_norm_rejects_q_below_one(small_mesh):
    with pytest.raises(ValueError):
        lqh_norm(zero_function(small_mesh), 0.5, WeightSpec())


def _random_profile(mesh, rng):
    return RadialFunction(mesh, rng.normal(size=mesh.M + 1))


@pytest.mark.parametrize("p", [1.5, 2.0, 2.5])
def test_norm_homogeneity_and_triangle(small_mesh, p):
    rng = np.random.default_rng(7)
    h = WeightSpec()
    for _ in range(1000):
        u, v = _random_profile(small_mesh, rng), _random_profile(small_mesh, rng)
        c = rng.normal() * 10
        s = u.with_values(u.values + v.values)
        for norm in (lambda w: dp_norm(w, p), lambda w: lqh_norm(w, 3.0, h)):
            assert norm(u.with_values(c * u.values)) == pytest.approx(abs(c) * norm(u), rel=1e-13)
            assert norm(s) <= norm(u) + norm(v) + 1e-12


# --- energy ---------------------------------------------------------------


def test_energy_of_zero(small_mesh):
    assert energy(zero_function(small_mesh), standard_spec(Regime.SUPERLINEAR, 0.7)) == 0.0


def test_energy_of_nonpositive_profile_is_kinetic(small_mesh):
    u = sample(small_mesh, lambda r: -np.exp(-r))
    for a in (0.0, 0.5):
        assert energy(u, SUP.with_a(a)) == pytest.approx(0.5 * dp_norm(u, 2.0) ** 2, rel=1e-14)


def test_energy_one_dimensional_reduction(small_mesh):
    phi = sample(small_mesh, lambda r: np.exp(-r))
    asm = assembly(small_mesh, SUP)
    A = dp_norm(phi, 2.0) ** 2 / 2
    B = float(np.sum(asm.wq * quad_values(phi.values) ** 4)) / 4
    ts = np.linspace(0.0, 3.0 * math.sqrt(A / (2 * B)), 31)
    got = np.array([energy(phi.with_values(t * phi.values), SUP) for t in ts])
    np.testing.assert_allclose(got, A * ts**2 - B * ts**4, rtol=1e-12, atol=1e-14)
    assert 0 < np.argmax(got) < ts.size - 1


def test_energy_splits_over_sign(small_mesh):
    rng = np.random.default_rng(3)
    spec = SUP.with_a(0.3)
    for _ in range(50):
        v = np.abs(rng.normal(size=small_mesh.M + 1))
        sign = np.repeat(rng.choice([-1.0, 1.0], size=small_mesh.M // 10 + 1), 10)[: small_mesh.M + 1]
        v = v * sign
        # zero nodes between sign blocks so the P1 positive part is the nodal one
        v[np.nonzero(np.diff(sign))[0] + 1] = 0.0
        u = RadialFunction(small_mesh, v)
        up, um = u.with_values(np.maximum(v, 0.0)), u.with_values(np.maximum(-v, 0.0))
        assert energy(u, spec) == pytest.approx(energy(up, spec) + 0.5 * dp_norm(um, 2.0) ** 2, rel=1e-12)


def test_energy_refinement_is_second_order():
    m = build_mesh(40, 20.0, 2.0, growth=1.2)
    spec = SUP
    prof = lambda r: 1.0 / (1.0 + r**2)
    E = [energy(sample(mm, prof), spec) for mm in (m, m.refined(), m.refined().refined(), m.refined().refined().refined())]
    d = np.abs(np.diff(E))
    np.testing.assert_allclose(d[:-1] / d[1:], 4.0, rtol=0.1)


# --- gradient -------------------------------------------------------------


def test_gradient_of_zero(small_mesh):
    np.testing.assert_array_equal(grad_energy(zero_function(small_mesh), SUP, 1e-6), 0.0)


@pytest.mark.parametrize("spec", [
    SUP,
    SUP.with_a(0.4),
    standard_spec(Regime.SUBLINEAR, 0.05),
    ProblemSpec(2.5, 3, 0.2, NonlinearitySpec("power", 4.0, 4.0), WeightSpec(1.0, 4.0)),
    ProblemSpec(2.0, 3, 0.1, NonlinearitySpec("tabulated", 3.0, 2.5, table=((0.0, 0.0), (1.0, 1.0), (2.0, 4.0)))),
])
def test_gradient_matches_finite_differences(spec):
    m = build_mesh(40, 20.0, 2.0, growth=1.2)
    rng = np.random.default_rng(11)
    for _ in range(5):
        u = RadialFunction(m, 0.2 + rng.uniform(0.0, 1.0, size=m.M + 1))
        g = grad_energy(u, spec, 1e-6)
        ref = fd_gradient(u, spec)
        assert np.linalg.norm(g - ref) <= 1e-6 * np.linalg.norm(ref)


def test_gradient_dirichlet_last_entry_zero():
    m = build_mesh(32, 10.0, 2.0, growth=1.2, outer="dirichlet")
    u = sample(m, lambda r: np.exp(-r))
    assert grad_energy(u, SUP, 1e-6)[-1] == 0.0


def test_kinetic_gradient_is_linear_at_p2(small_mesh):
    rng = np.random.default_rng(5)
    spec = ProblemSpec(2.0, 3, 0.0, NonlinearitySpec("power", 4.0, 4.0), WeightSpec(1e-300, 4.0))
    asm = assembly(small_mesh, spec)
    u, v = rng.normal(size=(2, small_mesh.M + 1))
    _, gu = asm.kinetic_flux(u)
    _, gv = asm.kinetic_flux(v)
    _, guv = asm.kinetic_flux(u + v)
    np.testing.assert_allclose(guv, gu + gv, rtol=1e-10, atol=1e-10 * np.max(np.abs(guv)))


def test_gradient_rejects_nonpositive_eps(small_mesh):
    with pytest.raises(ValueError):
        grad_energy(zero_function(small_mesh), SUP, 0.0)


# --- certificates ---------------------------------------------------------


@pytest.mark.parametrize("a", [0.0, 0.01, 1.0, 100.0])
def test_zero_is_nonsmooth_critical(small_mesh, a):
    cert = check_critical(zero_function(small_mesh), SUP.with_a(a))
    assert cert.max_violation == 0.0
    assert cert.tested_directions == 2 * small_mesh.n_free


def test_subsup_at_zero(small_mesh):
    spec = SUP.with_a(0.5)
    sub, sup = subsup_check(zero_function(small_mesh), spec)
    assert sub > 0.0
    assert sup == 0.0


def test_subsup_rejects_negative_profile(small_mesh):
    with pytest.raises(ValueError):
        subsup_check(sample(small_mesh, lambda r: -np.exp(-r)), SUP)


def test_critical_point_has_zero_gradient_and_violation(sup_solution, sup_spec):
    u = sup_solution.u
    assert u.values.min() > 0.0
    g = grad_energy(u, sup_spec, 1e-9)
    assert np.max(np.abs(g) / u.mesh.hat_norms(2.0)) <= 1e-8
    assert check_critical(u, sup_spec).max_violation <= 1e-8


def test_bump_is_not_critical(small_mesh):
    u = sample(small_mesh, lambda r: np.exp(-r))
    assert check_critical(u, SUP).max_violation > 1e-3


# --- finite-difference p-Laplacian ----------------------------------------


@pytest.mark.parametrize("rho", [0.5, 1.0, 3.0])
def test_fd_laplacian_examples(rho):
    assert p_laplacian_fd(lambda r: r**2, 2.0, 3, rho) == pytest.approx(6.0, rel=1e-6)
    assert abs(p_laplacian_fd(lambda r: r ** (-1.0), 2.0, 3, rho)) <= 1e-5 * rho**-3


def test_fd_laplacian_rejects_small_radius():
    with pytest.raises(ValueError):
        p_laplacian_fd(lambda r: r**2, 2.0, 3, 1e-3, delta=1e-2)


@settings(max_examples=30)
@given(p=st.floats(1.5, 3.0), N=st.integers(4, 6), rho=st.floats(0.2, 5.0))
def test_fd_laplacian_harmonic_tail(p, N, rho):
    k = (p - N) / (p - 1.0)
    v = lambda r: r**k
    scale = abs(k * rho ** (k - 1.0)) ** (p - 1.0) / rho
    assert abs(p_laplacian_fd(v, p, N, rho)) <= 1e-5 * scale
