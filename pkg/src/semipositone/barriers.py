"""Closed-form radial barriers for -Delta_p and the certificates built on them.

Both barriers are a concave power cap on B_r glued C^1 to a decaying power
tail. The decay-tail barrier solves -Delta_p z = A in B_r and
-Delta_p z = -H |x|^-vartheta outside; the harmonic-tail barrier has a
p-harmonic tail instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .radialfem import RadialFunction, p_laplacian_fd


class BarrierError(ValueError):
    pass


@dataclass(frozen=True)
class PowerSolution:
    """sigma |x|^lambda solving Delta_p u = varrho |x|^b."""

    lambda_: float
    sigma: float
    b: float
    varrho: float
    p: float
    N: int

    def __call__(self, rho):
        return self.sigma * np.asarray(rho, dtype=float) ** self.lambda_


def power_solution(p: float, N: int, b: float, varrho: float) -> PowerSolution:
    if p <= 1.0:
        raise BarrierError("need p > 1")
    if N + b == 0.0:
        raise BarrierError("N + b = 0 makes the power solution singular")
    lam = (p + b) / (p - 1.0)
    if lam == 0.0:
        raise BarrierError("lambda = 0 makes the power solution singular")
    m = varrho / ((N + b) * abs(lam) ** (p - 2.0) * lam)
    sigma = math.copysign(abs(m) ** (1.0 / (p - 1.0)), m) if m != 0.0 else 0.0
    return PowerSolution(lam, sigma, b, varrho, p, N)


DECAY_TAIL = "DecayTail"
HARMONIC_TAIL = "HarmonicTail"


@dataclass(frozen=True)
class BarrierZ:
    kind: str
    p: float
    N: int
    A: float
    r: float
    vartheta: float | None
    H: float | None
    C_match: float
    cap_coeff: float
    tail_coeff: float
    tail_exp: float
    shift: float = 0.0

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        q = self.p / (self.p - 1.0)
        inside = self.C_match - self.cap_coeff * rho**q
        with np.errstate(divide="ignore"):
            outside = self.tail_coeff * np.maximum(rho, self.r) ** self.tail_exp
        return np.where(rho < self.r, inside, outside) + self.shift

    def derivative(self, rho):
        rho = np.asarray(rho, dtype=float)
        q = self.p / (self.p - 1.0)
        inside = -self.cap_coeff * q * rho ** (q - 1.0)
        outside = self.tail_coeff * self.tail_exp * np.maximum(rho, self.r) ** (self.tail_exp - 1.0)
        return np.where(rho < self.r, inside, outside)

    def one_sided_derivatives(self) -> tuple[float, float]:
        """(interior, exterior) radial derivative at the interface r."""
        q = self.p / (self.p - 1.0)
        inner = -self.cap_coeff * q * self.r ** (q - 1.0)
        outer = self.tail_coeff * self.tail_exp * self.r ** (self.tail_exp - 1.0)
        return inner, outer

    def rhs(self, rho):
        """The prescribed value of -Delta_p z."""
        rho = np.asarray(rho, dtype=float)
        if self.kind == DECAY_TAIL:
            outside = -self.H * rho ** (-self.vartheta)
        else:
            outside = np.zeros_like(rho)
        return np.where(rho < self.r, self.A, outside)

    @property
    def limit_at_infinity(self) -> float:
        return self.shift

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self, rho) -> str:
        lines = ["rho,z"]
        lines += [f"{float(r)!r},{float(z)!r}" for r, z in zip(rho, self(rho))]
        return "\n".join(lines) + "\n"


def _cap(p: float, N: int, A: float) -> float:
    return (A / N) ** (1.0 / (p - 1.0)) * (p - 1.0) / p


def barrier_z(p: float, N: int, vartheta: float, A: float, r: float) -> BarrierZ:
    """Cap on B_r with a tail solving -Delta_p z = -H |x|^-vartheta, H = A (vartheta-N)/N r^vartheta."""
    if not (vartheta > N > p > 1.0):
        raise BarrierError("need vartheta > N > p > 1")
    if A <= 0.0 or r <= 0.0:
        raise BarrierError("need A > 0 and r > 0")
    H = A * (vartheta - N) / N * r**vartheta
    tail_coeff = (A * r**vartheta / N) ** (1.0 / (p - 1.0)) * (p - 1.0) / (vartheta - p)
    tail_exp = (p - vartheta) / (p - 1.0)
    cap = _cap(p, N, A)
    C = tail_coeff * r**tail_exp + cap * r ** (p / (p - 1.0))
    return BarrierZ(DECAY_TAIL, p, N, A, r, vartheta, H, C, cap, tail_coeff, tail_exp)


def hopf_constant(p: float, N: int, A: float, r: float) -> float:
    """Coefficient C_1 of the p-harmonic tail C_1 |x|^((p-N)/(p-1)) glued C^1 to the cap."""
    return (A / N) ** (1.0 / (p - 1.0)) * (p - 1.0) / (N - p) * r ** (N / (p - 1.0))


def barrier_zh(p: float, N: int, A: float, r: float) -> BarrierZ:
    """Cap on B_r with a p-harmonic tail."""
    if not (N > p > 1.0):
        raise BarrierError("need N > p > 1")
    if A <= 0.0 or r <= 0.0:
        raise BarrierError("need A > 0 and r > 0")
    c1 = hopf_constant(p, N, A, r)
    tail_exp = (p - N) / (p - 1.0)
    cap = _cap(p, N, A)
    C = c1 * r**tail_exp + cap * r ** (p / (p - 1.0))
    return BarrierZ(HARMONIC_TAIL, p, N, A, r, None, None, C, cap, c1, tail_exp)


def shift_to_zero_at(z: BarrierZ, R: float) -> BarrierZ:
    """Subtract a constant so the barrier vanishes on the sphere of radius R."""
    if R <= z.r:
        raise BarrierError("need R > r")
    base = replace(z, shift=0.0)
    return replace(z, shift=-float(base(R)))


def verify_barrier(z: BarrierZ, n: int = 20, rtol: float = 1e-3) -> dict:
    """Finite-difference check of -Delta_p z against its prescribed RHS and of C^1 matching."""
    inner = np.linspace(0.1, 0.9, n) * z.r
    outer = z.r * np.geomspace(1.1, 10.0, n)
    err_in = max(abs(-p_laplacian_fd(z, z.p, z.N, x) - z.A) / z.A for x in inner)
    if z.kind == DECAY_TAIL:
        err_out = max(
            abs(-p_laplacian_fd(z, z.p, z.N, x) - float(z.rhs(x))) / abs(float(z.rhs(x))) for x in outer
        )
    else:
        # zero target: scale by the size of the individual terms |z'|^(p-1)/rho
        err_out = max(
            abs(p_laplacian_fd(z, z.p, z.N, x)) / (abs(float(z.derivative(x))) ** (z.p - 1.0) / x) for x in outer
        )
    d_in, d_out = z.one_sided_derivatives()
    deriv_mismatch = abs(d_in - d_out) / abs(d_in)
    value_mismatch = abs(float(z.C_match - z.cap_coeff * z.r ** (z.p / (z.p - 1.0))) - z.tail_coeff * z.r**z.tail_exp)
    ok = err_in <= rtol and err_out <= rtol and deriv_mismatch <= 1e-12
    return {
        "interior_rel_err": err_in,
        "exterior_rel_err": err_out,
        "derivative_mismatch": deriv_mismatch,
        "value_mismatch": value_mismatch,
        "ok": bool(ok),
    }


def compare(u: RadialFunction, z: BarrierZ, R: float, atol: float = 1e-10) -> tuple[bool, float]:
    """Pointwise certificate u >= z_R on the nodes of [0, R]."""
    if R > u.mesh.R_max * (1.0 + 1e-12):
        raise BarrierError("comparison radius exceeds the mesh")
    zR = shift_to_zero_at(z, R) if R > z.r else z
    mask = u.rho <= R
    margin = float(np.min(u.values[mask] - zR(u.rho[mask])))
    return margin >= -atol, margin


def measured_A(u: RadialFunction, spec, r: float) -> tuple[float, bool]:
    """min over nodes of B_r of h(rho)(f(u) - a), the interior RHS level for the barrier.

    Returns (A, ok). A non-positive minimum is clipped to 0 and flagged.
    """
    from .nonlinearity import f_eval

    mask = u.rho <= r
    vals = u.values[mask]
    if np.any(vals < 0.0):
        return 0.0, False
    level = spec.h(u.rho[mask]) * (f_eval(spec.f, vals) - spec.a)
    A = float(np.min(level))
    return (A, True) if A > 0.0 else (0.0, False)


def positivity_certificate(u: RadialFunction, spec, r: float, R: float) -> dict:
    """Barrier comparison for a computed critical point, plus the a B < H side condition."""
    A, ok_A = measured_A(u, spec, r)
    out = {"A": A, "r": r, "R": R, "H": math.nan, "aB_below_H": False, "margin": -math.inf, "ok": False}
    if not ok_A:
        return out
    z = barrier_z(spec.p, spec.N, spec.h.vartheta, A, r)
    ok, margin = compare(u, z, R)
    out.update(H=z.H, aB_below_H=bool(spec.a * spec.h.B < z.H), margin=margin)
    out["ok"] = bool(ok and out["aB_below_H"] and float(np.min(u.values[u.rho <= R])) > 0.0)
    return out


def hopf_bound_check(u: RadialFunction, A: float, r: float, p: float, tol_tail: float = 0.05,
                     exclude_frac: float = 0.1) -> tuple[bool, float]:
    """Check u(rho) >= C_1 rho^((p-N)/(p-1)) on tail nodes rho > r."""
    N = u.mesh.N
    if A <= 0.0:
        return False, 0.0
    c1 = hopf_constant(p, N, A, r)
    kappa = (N - p) / (p - 1.0)
    n_keep = int(math.floor((1.0 - exclude_frac) * u.rho.size))
    rho = u.rho[:n_keep]
    vals = u.values[:n_keep]
    mask = rho > r
    if not np.any(mask):
        raise BarrierError("no tail nodes beyond r")
    worst = float(np.min(vals[mask] * rho[mask] ** kappa / c1))
    return worst >= 1.0 - tol_tail, worst


def liouville_indicator(u: RadialFunction, window: tuple[float, float], p: float) -> float:
    """min over window nodes of rho^((N-p)/(p-1)) u(rho)."""
    kappa = (u.mesh.N - p) / (p - 1.0)
    lo, hi = window
    mask = (u.rho >= lo) & (u.rho <= hi)
    if not np.any(mask):
        raise BarrierError("window contains no nodes")
    return float(np.min(u.rho[mask] ** kappa * u.values[mask]))
