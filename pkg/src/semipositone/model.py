"""Problem instances for the radial semipositone p-Laplacian and sampled hypothesis checks."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate


class Regime(str, Enum):
    SUPERLINEAR = "Superlinear"
    SUBLINEAR = "Sublinear"


class SpecError(ValueError):
    """Raised for an inconsistent or degenerate problem instance."""


def critical_exponent(p: float, N: int) -> float:
    """Return the critical Sobolev exponent pN/(N-p)."""
    if not (1.0 < p < N):
        raise SpecError(f"critical exponent needs 1 < p < N, got p={p}, N={N}")
    return p * N / (N - p)


def sphere_area(N: int) -> float:
    """Surface area of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


@dataclass(frozen=True)
class NonlinearitySpec:
    """The nonnegative nonlinearity f on [0, inf).

    ``power``: f(t) = t^(q-1).
    ``power_shifted``: f(t) = (t + t0)^(q-1) - t0^(q-1).
    ``tabulated``: piecewise-linear interpolant of ``table`` extended by the last slope.
    """

    family: str = "power"
    q: float = 4.0
    theta_ar: float | None = None
    t0: float = 0.0
    table: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.family not in ("power", "power_shifted", "tabulated"):
            raise SpecError(f"unknown nonlinearity family {self.family!r}")
        if self.q <= 1.0:
            raise SpecError(f"growth exponent q must exceed 1, got {self.q}")
        if self.family == "power_shifted" and self.t0 <= 0.0:
            raise SpecError("power_shifted needs t0 > 0")
        if self.family == "tabulated":
            if not self.table or len(self.table) < 2:
                raise SpecError("tabulated nonlinearity needs at least two (t, f) pairs")
            t = np.array([row[0] for row in self.table], dtype=float)
            y = np.array([row[1] for row in self.table], dtype=float)
            if t[0] != 0.0 or y[0] != 0.0:
                raise SpecError("tabulated nonlinearity must start at (0, 0)")
            if np.any(np.diff(t) <= 0.0):
                raise SpecError("tabulated t values must be strictly increasing")
            if np.any(y < 0.0) or (y[-1] - y[-2]) < 0.0:
                raise SpecError("tabulated f must be nonnegative on [0, inf)")

    def to_dict(self) -> dict:
        d = {"family": self.family, "q": self.q, "theta_ar": self.theta_ar}
        if self.family == "power_shifted":
            d["t0"] = self.t0
        if self.family == "tabulated":
            d["table"] = [list(row) for row in self.table]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NonlinearitySpec":
        table = d.get("table")
        return cls(
            family=d.get("family", "power"),
            q=float(d["q"]),
            theta_ar=None if d.get("theta_ar") is None else float(d["theta_ar"]),
            t0=float(d.get("t0", 0.0)),
            table=None if table is None else tuple((float(a), float(b)) for a, b in table),
        )


@dataclass(frozen=True)
class WeightSpec:
    """Radial weight h(rho).

    ``rational``: h = B / (1 + rho^vartheta).
    ``tabulated``: piecewise-linear in rho, continued past the last sample by the
    power law through the last two samples.
    """

    B: float = 1.0
    vartheta: float = 4.0
    family: str = "rational"
    table: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.family not in ("rational", "tabulated"):
            raise SpecError(f"unknown weight family {self.family!r}")
        if self.B <= 0.0:
            raise SpecError("weight bound B must be positive")
        if self.family == "tabulated":
            if not self.table or len(self.table) < 2:
                raise SpecError("tabulated weight needs at least two (rho, h) pairs")
            r = np.array([row[0] for row in self.table], dtype=float)
            y = np.array([row[1] for row in self.table], dtype=float)
            if r[0] != 0.0 or np.any(np.diff(r) <= 0.0):
                raise SpecError("tabulated weight radii must start at 0 and increase")
            if np.any(y <= 0.0):
                raise SpecError("weight must be strictly positive")

    def tail_exponent(self) -> float:
        """Exponent s with h(rho) ~ rho^s at infinity."""
        if self.family == "rational":
            return -self.vartheta
        (r0, y0), (r1, y1) = self.table[-2], self.table[-1]
        if r0 == 0.0:
            return 0.0 if y0 == y1 else -math.inf
        return math.log(y1 / y0) / math.log(r1 / r0)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.family == "rational":
            return self.B / (1.0 + rho**self.vartheta)
        r = np.array([row[0] for row in self.table])
        y = np.array([row[1] for row in self.table])
        out = np.interp(rho, r, y)
        beyond = rho > r[-1]
        if np.any(beyond):
            out = np.where(beyond, y[-1] * (np.maximum(rho, r[-1]) / r[-1]) ** self.tail_exponent(), out)
        return out

    def to_dict(self) -> dict:
        d = {"family": self.family, "B": self.B, "vartheta": self.vartheta}
        if self.family == "tabulated":
            d["table"] = [list(row) for row in self.table]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WeightSpec":
        table = d.get("table")
        return cls(
            B=float(d.get("B", 1.0)),
            vartheta=float(d.get("vartheta", 4.0)),
            family=d.get("family", "rational"),
            table=None if table is None else tuple((float(a), float(b)) for a, b in table),
        )


@dataclass(frozen=True)
class ProblemSpec:
    p: float
    N: int
    a: float
    f: NonlinearitySpec
    h: WeightSpec = field(default_factory=WeightSpec)
    regime: Regime = Regime.SUPERLINEAR

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if not (1.0 < self.p < self.N):
            raise SpecError(f"need 1 < p < N, got p={self.p}, N={self.N}")
        if self.a < 0.0:
            raise SpecError(f"shift a must be nonnegative, got {self.a}")
        if self.regime is Regime.SUPERLINEAR:
            if self.f.q <= self.p:
                raise SpecError("superlinear regime needs q > p")
            if self.f.theta_ar is None or self.f.theta_ar <= self.p:
                raise SpecError("superlinear regime needs an AR exponent theta_ar > p")
        elif self.f.q >= self.p:
            raise SpecError("sublinear regime needs q < p")

    def with_a(self, a: float) -> "ProblemSpec":
        return ProblemSpec(self.p, self.N, float(a), self.f, self.h, self.regime)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "N": self.N,
            "a": self.a,
            "f": self.f.to_dict(),
            "h": self.h.to_dict(),
            "regime": self.regime.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemSpec":
        try:
            return cls(
                p=float(d["p"]),
                N=int(d["N"]),
                a=float(d.get("a", 0.0)),
                f=NonlinearitySpec.from_dict(d["f"]),
                h=WeightSpec.from_dict(d.get("h", {})),
                regime=d.get("regime", Regime.SUPERLINEAR),
            )
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed problem spec: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ProblemSpec":
        return cls.from_dict(json.loads(text))


def standard_spec(regime: str = "Superlinear", a: float = 0.0) -> ProblemSpec:
    """Reference instance: p=2, N=3, h = 1/(1+rho^4), q=4 or q=1.5."""
    if Regime(regime) is Regime.SUPERLINEAR:
        f = NonlinearitySpec("power", q=4.0, theta_ar=4.0)
    else:
        f = NonlinearitySpec("power", q=1.5)
    return ProblemSpec(p=2.0, N=3, a=a, f=f, h=WeightSpec(1.0, 4.0), regime=regime)


# --- hypothesis surrogates -------------------------------------------------

F0_RATIO_TOL = 1e-2
F0_TILDE_RATIO_MIN = 1e2
FSC_SLOPE_TOL = 1e-2


@dataclass
class ValidationReport:
    p_star: float
    h_norm_1: float
    h_norm_inf: float
    p2_margin: float
    f0_trend: list
    finf_trend: list
    passes: dict

    @property
    def ok(self) -> bool:
        return all(self.passes.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(type(x))


def default_sample_grid() -> dict:
    return {
        "radii": np.concatenate([[0.0], np.logspace(-3, 4, 141)]),
        "t": np.logspace(-6, 6, 121),
    }


def weight_norm_1(h: WeightSpec, N: int, horizon: float = 1e3) -> float:
    """||h||_1 on R^N by radial quadrature on [0, horizon] plus the power-law tail.

    Returns ``inf`` when the tail exponent does not beat -N.
    """
    s = h.tail_exponent()
    if not (s < -N):
        return math.inf
    g = lambda r: float(h(r)) * r ** (N - 1)
    breaks = [0.0, 1.0, 10.0, 100.0, horizon]
    core = sum(integrate.quad(g, lo, hi, limit=200)[0] for lo, hi in zip(breaks[:-1], breaks[1:]))
    # h(rho) ~ h(horizon) (rho/horizon)^s beyond the horizon
    tail = float(h(horizon)) * horizon**N / (-(s + N))
    total = sphere_area(N) * (core + tail)
    return total if math.isfinite(total) else math.inf


def validate_spec(spec: ProblemSpec, sample_grid: dict | None = None) -> ValidationReport:
    """Sampled numeric surrogates for the weight and growth hypotheses."""
    from .nonlinearity import F_eval, f_eval

    grid = default_sample_grid() if sample_grid is None else sample_grid
    radii = np.asarray(grid["radii"], dtype=float)
    ts = np.sort(np.asarray(grid["t"], dtype=float))
    if radii.size == 0 or ts.size == 0:
        raise SpecError("sample grid must be nonempty")
    p, N, h = spec.p, spec.N, spec.h
    p_star = critical_exponent(p, N)

    passes = {}
    hv = h(radii)
    h_inf = float(np.max(hv))
    h_one = weight_norm_1(h, N)
    passes["P1"] = bool(math.isfinite(h_one) and math.isfinite(h_inf) and np.all(hv > 0.0))
    pos = radii > 0.0
    if h.family == "rational":
        # B - B rho^t/(1+rho^t) = h(rho), without cancellation at large rho
        margins = hv[pos]
    else:
        margins = h.B - hv[pos] * radii[pos] ** h.vartheta
    p2_margin = float(np.min(margins)) if margins.size else math.inf
    passes["P2"] = bool(h.vartheta > N and np.all(margins > 0.0))

    q = spec.f.q
    F = F_eval(spec.f, ts)
    f = f_eval(spec.f, ts)
    small = ts[: max(3, ts.size // 4)]
    r0 = F[: small.size] / small**p
    f0_trend = [[float(t), float(r)] for t, r in zip(small, r0)]
    # ratios ordered by increasing t; trend as t -> 0 is read backwards
    decreasing_to_zero = bool(np.all(np.diff(r0) >= 0.0))
    passes["f0"] = bool(r0[0] <= F0_RATIO_TOL and decreasing_to_zero)
    passes["f0_tilde"] = bool(r0[0] >= F0_TILDE_RATIO_MIN and np.all(np.diff(r0) <= 0.0))

    top = ts >= ts[-1] / 10.0
    rinf = f[top] / ts[top] ** (q - 1.0)
    finf_trend = [[float(t), float(r)] for t, r in zip(ts[top], rinf)]
    if np.all(rinf > 0.0) and rinf.size >= 2:
        slope = np.polyfit(np.log(ts[top]), np.log(rinf), 1)[0]
    else:
        slope = 0.0
    passes["f_sc"] = bool(1.0 < q < p_star and np.all(np.isfinite(rinf)) and slope <= FSC_SLOPE_TOL)

    if spec.regime is Regime.SUPERLINEAR:
        theta = spec.f.theta_ar
        upper = ts >= np.median(ts)
        ar_ok = bool(np.all(theta * F[upper] <= f[upper] * ts[upper] * (1.0 + 1e-12)) and np.all(F[upper] > 0.0))
        passes["f_inf"] = bool(q > p and theta is not None and theta > p and ar_ok)
        passes.pop("f0_tilde")
    else:
        passes["f_inf_tilde"] = bool(q < p)
        passes.pop("f0")

    return ValidationReport(
        p_star=p_star,
        h_norm_1=h_one,
        h_norm_inf=h_inf,
        p2_margin=p2_margin,
        f0_trend=f0_trend,
        finf_trend=finf_trend,
        passes=passes,
    )


def rescale_solution(u, a: float, q: float, p: float):
    """Map a solution u to v = a^(-1/(q-1)) u and return (v, lambda).

    lambda = a^((q-p)/(q-1)) is the coefficient of the rescaled problem with unit shift.
    ``u`` may be a RadialFunction or an array of nodal values.
    """
    if a <= 0.0:
        raise SpecError("rescaling needs a > 0")
    if q == 1.0:
        raise SpecError("rescaling needs q != 1")
    c = a ** (-1.0 / (q - 1.0))
    lam = a ** ((q - p) / (q - 1.0))
    if hasattr(u, "values"):
        return u.with_values(c * u.values), lam
    return c * np.asarray(u, dtype=float), lam
