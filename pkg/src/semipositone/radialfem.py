"""Radial P1 discretization of D^{1,p}(R^N).

Functions are piecewise linear on a graded mesh of [0, R_max]. The kinetic
integral is exact (piecewise-constant slope against the exact moment of
rho^(N-1)); weight and nonlinearity integrals use 2-point Gauss per element.

Outside R_max the function is closed either by u = 0 (``outer="dirichlet"``) or by
the exact radial p-harmonic extension u(R)(R/rho)^((N-p)/(p-1))
(``outer="harmonic"``), whose gradient energy sphere*kappa^(p-1)*R^(N-p)|u(R)|^p
is added in closed form.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .model import ProblemSpec, WeightSpec, sphere_area
from .nonlinearity import ShiftedNonlinearity

OUTER_CLOSURES = ("harmonic", "dirichlet")


class MeshError(ValueError):
    pass


@dataclass(eq=False)
class RadialMesh:
    nodes: np.ndarray
    N: int
    outer: str = "harmonic"
    sphere: float = field(init=False)
    dr: np.ndarray = field(init=False, repr=False)
    moment: np.ndarray = field(init=False, repr=False)
    gauss_rho: np.ndarray = field(init=False, repr=False)
    gauss_w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise MeshError("mesh needs at least three nodes")
        if x[0] != 0.0:
            raise MeshError("first node must be the origin")
        if np.any(np.diff(x) <= 0.0):
            raise MeshError("nodes must be strictly increasing")
        if self.outer not in OUTER_CLOSURES:
            raise MeshError(f"outer closure must be one of {OUTER_CLOSURES}")
        self.nodes = x
        self.sphere = sphere_area(self.N)
        self.dr = np.diff(x)
        N = self.N
        # exact integral of rho^(N-1) over each element, times the sphere area
        self.moment = self.sphere * (x[1:] ** N - x[:-1] ** N) / N
        self.gauss_rho = x[:-1, None] + self.dr[:, None] * kernels.GAUSS_XI[None, :]
        self.gauss_w = self.sphere * 0.5 * self.dr[:, None] * self.gauss_rho ** (N - 1)

    @property
    def M(self) -> int:
        return self.nodes.size - 1

    @property
    def R_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_free(self) -> int:
        """Number of unknown nodal values (the Dirichlet closure pins the last node)."""
        return self.M + 1 if self.outer == "harmonic" else self.M

    def exterior_coefficient(self, p: float) -> float:
        if self.outer != "harmonic":
            return 0.0
        kappa = (self.N - p) / (p - 1.0)
        return self.sphere * kappa ** (p - 1.0) * self.R_max ** (self.N - p)

    def hat_norms(self, p: float) -> np.ndarray:
        """dp_norm of each nodal hat function (free nodes only)."""
        s = self.moment / self.dr**p
        out = np.zeros(self.M + 1)
        out[:-1] += s
        out[1:] += s
        out[-1] += self.exterior_coefficient(p)
        return out[: self.n_free] ** (1.0 / p)

    def refined(self) -> "RadialMesh":
        """Mesh with every element split at its midpoint."""
        mid = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        x = np.empty(2 * self.M + 1)
        x[0::2] = self.nodes
        x[1::2] = mid
        return RadialMesh(x, self.N, self.outer)

    def to_dict(self) -> dict:
        return {"N": self.N, "outer": self.outer, "nodes": self.nodes.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "RadialMesh":
        d = json.loads(text)
        return cls(np.array(d["nodes"], dtype=float), int(d["N"]), d.get("outer", "harmonic"))


def _geometric_sum(g: float, n: int) -> float:
    if abs(g - 1.0) < 1e-12:
        return float(n)
    return g * (g**n - 1.0) / (g - 1.0)


def build_mesh(M: int, R_max: float, r_core: float, growth: float = 1.05, N: int = 3,
               outer: str = "harmonic") -> RadialMesh:
    """Uniform nodes on [0, r_core] for the first half, then geometric steps to R_max.

    The geometric ratio actually used is the one that continues the core spacing
    and lands on R_max exactly; ``growth`` is its upper bound.
    """
    if M < 16:
        raise MeshError("need M >= 16")
    if not (0.0 < r_core <= R_max):
        raise MeshError("need 0 < r_core <= R_max")
    if growth <= 1.0:
        raise MeshError("growth must exceed 1")
    if r_core == R_max:
        return RadialMesh(np.linspace(0.0, R_max, M + 1), N, outer)
    n_u = M // 2
    n_g = M - n_u
    h_c = r_core / n_u
    L = R_max - r_core
    target = L / h_c
    if _geometric_sum(growth, n_g) < target:
        g_needed = brentq(lambda g: _geometric_sum(g, n_g) - target, 1.0 + 1e-12, 1e3)
        raise MeshError(
            f"geometric part cannot reach R_max={R_max} with growth={growth}; "
            f"use growth >= {g_needed:.6g} or more nodes"
        )
    g = brentq(lambda g: _geometric_sum(g, n_g) - target, 1e-9, growth)
    steps = h_c * g ** np.arange(1, n_g + 1)
    steps *= L / steps.sum()
    x = np.concatenate([np.linspace(0.0, r_core, n_u + 1), r_core + np.cumsum(steps)])
    x[-1] = R_max
    return RadialMesh(x, N, outer)


@dataclass(frozen=True, eq=False)
class RadialFunction:
    mesh: RadialMesh
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.mesh.M + 1,):
            raise MeshError(f"expected {self.mesh.M + 1} nodal values, got shape {v.shape}")
        if self.mesh.outer == "dirichlet" and v[-1] != 0.0:
            raise MeshError("Dirichlet closure requires u(R_max) = 0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def rho(self) -> np.ndarray:
        return self.mesh.nodes

    def with_values(self, values) -> "RadialFunction":
        return RadialFunction(self.mesh, values)

    def __call__(self, rho, p: float = 2.0):
        """Evaluate the continuum representative; beyond R_max uses the outer closure."""
        rho = np.asarray(rho, dtype=float)
        inside = np.interp(rho, self.mesh.nodes, self.values)
        if self.mesh.outer == "dirichlet":
            return np.where(rho <= self.mesh.R_max, inside, 0.0)
        kappa = (self.mesh.N - p) / (p - 1.0)
        R = self.mesh.R_max
        tail = self.values[-1] * (R / np.maximum(rho, R)) ** kappa
        return np.where(rho <= R, inside, tail)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rho", "u"])
        for r, v in zip(self.mesh.nodes, self.values):
            w.writerow([repr(float(r)), repr(float(v))])
        return buf.getvalue()

    @staticmethod
    def read_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["rho", "u"]:
            raise MeshError("profile CSV must have header rho,u")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=float)
        if data.size == 0:
            raise MeshError("empty profile")
        return data[:, 0], data[:, 1]

    @classmethod
    def from_csv(cls, text: str, mesh: RadialMesh | None = None) -> "RadialFunction":
        rho, u = cls.read_csv(text)
        if mesh is None:
            return cls(RadialMesh(rho, 3), u)
        if rho.shape != mesh.nodes.shape or not np.allclose(rho, mesh.nodes, rtol=1e-12, atol=0.0):
            raise MeshError("profile radii do not match the mesh")
        return cls(mesh, u)


def zero_function(mesh: RadialMesh) -> RadialFunction:
    return RadialFunction(mesh, np.zeros(mesh.M + 1))


def sample(mesh: RadialMesh, fn) -> RadialFunction:
    """Nodal interpolant of a callable, respecting the outer closure."""
    v = np.asarray(fn(mesh.nodes), dtype=float).copy()
    if mesh.outer == "dirichlet":
        v[-1] = 0.0
    return RadialFunction(mesh, v)


# --- norms and energy -----------------------------------------------------


def dp_norm(u: RadialFunction, p: float) -> float:
    m = u.mesh
    total = kernels.kinetic(u.values, m.dr, m.moment, float(p))
    total += m.exterior_coefficient(p) * abs(u.values[-1]) ** p
    return total ** (1.0 / p)


def lqh_norm(u: RadialFunction, q: float, h: WeightSpec) -> float:
    if q < 1.0:
        raise ValueError("need q >= 1")
    m = u.mesh
    uq = kernels.quad_values(u.values)
    return float(np.sum(m.gauss_w * h(m.gauss_rho) * np.abs(uq) ** q)) ** (1.0 / q)


class Assembly:
    """Per (mesh, spec) cache of weighted quadrature data."""

    def __init__(self, mesh: RadialMesh, spec: ProblemSpec):
        self.mesh = mesh
        self.spec = spec
        self.p = float(spec.p)
        self.wq = np.ascontiguousarray(mesh.gauss_w * spec.h(mesh.gauss_rho))
        self.nl = ShiftedNonlinearity(spec.f, spec.a)
        self.ext = mesh.exterior_coefficient(self.p)
        self.fast = spec.f.family in ("power", "power_shifted")
        self.hat_norms = mesh.hat_norms(self.p)

    def kinetic_flux(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        """(||u||^p, d/du of ||u||^p / p)."""
        g = np.zeros_like(u)
        kin = kernels.kinetic(u, self.mesh.dr, self.mesh.moment, self.p, g)
        if self.ext:
            uM = u[-1]
            kin += self.ext * abs(uM) ** self.p
            g[-1] += self.ext * abs(uM) ** (self.p - 2.0) * uM if uM != 0.0 else 0.0
        return kin, g

    def potential(self, u: np.ndarray, eps: float = 1.0, grad: np.ndarray | None = None) -> float:
        """int h F_a(u); if ``grad`` is given, subtract d/du (mollified) into it."""
        if self.fast:
            f = self.spec.f
            return kernels.potential_power(u, self.wq, f.q, f.t0, self.spec.a, eps, grad)
        uq = kernels.quad_values(u)
        total = float(np.sum(self.wq * self.nl.F_a(uq)))
        if grad is not None:
            kernels.scatter(-self.wq * self.nl.mollified_f_a(uq, eps), grad)
        return total

    def energy(self, u: np.ndarray) -> float:
        kin = kernels.kinetic(u, self.mesh.dr, self.mesh.moment, self.p)
        if self.ext:
            kin += self.ext * abs(u[-1]) ** self.p
        return kin / self.p - self.potential(u)

    def energy_grad(self, u: np.ndarray, eps: float) -> tuple[float, np.ndarray]:
        kin, g = self.kinetic_flux(u)
        pot = self.potential(u, eps, g)
        if self.mesh.outer == "dirichlet":
            g[-1] = 0.0
        return kin / self.p - pot, g

    def directional(self, u: np.ndarray):
        """Per free node: (kinetic pairing k_i, Clarke sums along +e_i and -e_i)."""
        _, k = self.kinetic_flux(u)
        uq = kernels.quad_values(u)
        cplus = np.zeros_like(u)
        cminus = np.zeros_like(u)
        kernels.scatter(self.wq * self.nl.clarke_neg_Fa(uq, 1.0), cplus)
        kernels.scatter(self.wq * self.nl.clarke_neg_Fa(uq, -1.0), cminus)
        n = self.mesh.n_free
        return k[:n], cplus[:n], cminus[:n]


@lru_cache(maxsize=64)
def assembly(mesh: RadialMesh, spec: ProblemSpec) -> Assembly:
    return Assembly(mesh, spec)


def energy(u: RadialFunction, spec: ProblemSpec) -> float:
    """Discrete I_a(u) = ||u||^p / p - int h F_a(u)."""
    return assembly(u.mesh, spec).energy(np.ascontiguousarray(u.values))


def grad_energy(u: RadialFunction, spec: ProblemSpec, eps_moll: float) -> np.ndarray:
    """Exact nodal gradient of the discrete energy with f_a mollified on [-eps, 0)."""
    if eps_moll <= 0.0:
        raise ValueError("eps_moll must be positive")
    return assembly(u.mesh, spec).energy_grad(np.ascontiguousarray(u.values), eps_moll)[1]


def nehari_residual(u: RadialFunction, spec: ProblemSpec) -> float:
    """||u||^p - int h f_a(u) u, zero at a critical point that is positive."""
    asm = assembly(u.mesh, spec)
    uq = kernels.quad_values(u.values)
    return dp_norm(u, spec.p) ** spec.p - float(np.sum(asm.wq * asm.nl.f_a(uq) * uq))


@dataclass
class CriticalityCertificate:
    max_violation: float
    per_node_violations: np.ndarray
    tested_directions: int

    def to_dict(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "tested_directions": self.tested_directions,
            "worst_node": int(np.argmax(self.per_node_violations)) if self.per_node_violations.size else -1,
        }


def check_critical(u: RadialFunction, spec: ProblemSpec) -> CriticalityCertificate:
    """Nonsmooth criticality along every nodal hat direction and its negative.

    D(v) = int |u'|^(p-2) u' v' + int h (-F_a)^0(u, v); violation_i is
    max(0, -D(e_i), -D(-e_i)) / ||e_i||.
    """
    asm = assembly(u.mesh, spec)
    k, cplus, cminus = asm.directional(np.ascontiguousarray(u.values))
    d_plus = k + cplus
    d_minus = -k + cminus
    viol = np.maximum(0.0, np.maximum(-d_plus, -d_minus)) / asm.hat_norms
    return CriticalityCertificate(float(np.max(viol)), viol, 2 * viol.size)


def subsup_check(u: RadialFunction, spec: ProblemSpec, tol: float = 1e-8) -> tuple[float, float]:
    """Worst normalized slacks of int h (f(u)-a) phi <= int |u'|^(p-2)u'phi' <= int h f(u) phi.

    Positive slack means the inequality holds; each hat pairing is divided by ||e_i||.
    """
    if np.min(u.values) < -tol:
        raise ValueError("subsup_check needs u >= -tol")
    asm = assembly(u.mesh, spec)
    n = u.mesh.n_free
    _, k = asm.kinetic_flux(np.ascontiguousarray(u.values))
    uq = np.maximum(kernels.quad_values(u.values), 0.0)
    load = np.zeros(u.mesh.M + 1)
    kernels.scatter(asm.wq * asm.nl.f(uq), load)
    mass = np.zeros(u.mesh.M + 1)
    kernels.scatter(asm.wq, mass)
    k, load, mass = k[:n], load[:n], mass[:n]
    sub = (k - (load - spec.a * mass)) / asm.hat_norms
    sup = (load - k) / asm.hat_norms
    return float(np.min(sub)), float(np.min(sup))


def p_laplacian_fd(v, p: float, N: int, rho: float, delta: float | None = None) -> float:
    """Delta_p of the radial profile v at rho via central differences of v.

    Uses |v'|^(p-2) [(p-1) v'' + (N-1)/rho v'].
    """
    if delta is None:
        delta = 1e-4 * rho
    if rho <= delta or delta <= 0.0:
        raise ValueError("rho must exceed the stencil width")
    vm, v0, vp = float(v(rho - delta)), float(v(rho)), float(v(rho + delta))
    d1 = (vp - vm) / (2.0 * delta)
    d2 = (vp - 2.0 * v0 + vm) / delta**2
    return abs(d1) ** (p - 2.0) * ((p - 1.0) * d2 + (N - 1.0) / rho * d1)


def gradient_norm(u: RadialFunction, p: float, g: np.ndarray) -> float:
    """Largest hat-normalized gradient entry (smooth-regime criticality residual)."""
    return float(np.max(np.abs(g[: u.mesh.n_free]) / u.mesh.hat_norms(p)))

