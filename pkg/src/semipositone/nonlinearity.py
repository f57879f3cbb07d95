"""The shifted nonlinearity f_a, its primitive F_a and the Clarke derivative of -F_a.

f_a jumps from 0 to -a at the origin, so F_a has a kink there and the energy is
only locally Lipschitz. Certificates use the exact piecewise Clarke formula;
descent iterations use the continuous ``mollified_f_a`` selection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import NonlinearitySpec


def _check_nonneg(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("f and F are defined on [0, inf) only")
    return t


def _table_arrays(spec: NonlinearitySpec):
    tt = np.array([row[0] for row in spec.table], dtype=float)
    ff = np.array([row[1] for row in spec.table], dtype=float)
    # exact integral of the interpolant at the knots
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (ff[1:] + ff[:-1]) * np.diff(tt))])
    return tt, ff, cum


def _f_raw(spec: NonlinearitySpec, t):
    if spec.family == "power":
        return t ** (spec.q - 1.0)
    if spec.family == "power_shifted":
        return (t + spec.t0) ** (spec.q - 1.0) - spec.t0 ** (spec.q - 1.0)
    tt, ff, _ = _table_arrays(spec)
    slope = (ff[-1] - ff[-2]) / (tt[-1] - tt[-2])
    return np.where(t <= tt[-1], np.interp(t, tt, ff), ff[-1] + slope * (t - tt[-1]))


def _F_raw(spec: NonlinearitySpec, t):
    q = spec.q
    if spec.family == "power":
        return t**q / q
    if spec.family == "power_shifted":
        t0 = spec.t0
        return ((t + t0) ** q - t0**q) / q - t0 ** (q - 1.0) * t
    tt, ff, cum = _table_arrays(spec)
    k = np.clip(np.searchsorted(tt, t, side="right") - 1, 0, tt.size - 2)
    slope = (ff[k + 1] - ff[k]) / (tt[k + 1] - tt[k])
    dt = t - tt[k]
    # beyond the table the last segment's line continues, which is the last-slope extension
    return cum[k] + ff[k] * dt + 0.5 * slope * dt**2


def f_eval(spec: NonlinearitySpec, t):
    t = _check_nonneg(t)
    return _f_raw(spec, t)


def F_eval(spec: NonlinearitySpec, t):
    t = _check_nonneg(t)
    return _F_raw(spec, t)


@dataclass(frozen=True)
class ShiftedNonlinearity:
    base: NonlinearitySpec
    a: float = 0.0

    def __post_init__(self):
        if self.a < 0.0:
            raise ValueError("shift a must be nonnegative")

    def f(self, t):
        return f_eval(self.base, t)

    def F(self, t):
        return F_eval(self.base, t)

    def f_a(self, t):
        t = np.asarray(t, dtype=float)
        tp = np.maximum(t, 0.0)
        return np.where(t >= 0.0, _f_raw(self.base, tp) - self.a, 0.0)

    def F_a(self, t):
        t = np.asarray(t, dtype=float)
        tp = np.maximum(t, 0.0)
        return np.where(t > 0.0, _F_raw(self.base, tp) - self.a * tp, 0.0)

    def clarke_neg_Fa(self, t, s):
        """Generalized directional derivative (-F_a)^0(t, s)."""
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        tp = np.maximum(t, 0.0)
        interior = -(_f_raw(self.base, tp) - self.a) * s
        kink = np.where(s > 0.0, self.a * s, 0.0)
        return np.where(t > 0.0, interior, np.where(t == 0.0, kink, 0.0))

    def mollified_f_a(self, t, eps: float):
        """f_a with the jump at 0 replaced by a linear ramp on [-eps, 0)."""
        if eps <= 0.0:
            raise ValueError("eps must be positive")
        t = np.asarray(t, dtype=float)
        ramp = -self.a * (t + eps) / eps
        return np.where(t >= 0.0, self.f_a(t), np.where(t >= -eps, ramp, 0.0))

    def mollified_F_a(self, t, eps: float):
        """Primitive of ``mollified_f_a`` vanishing at -inf; differs from F_a by O(a eps)."""
        if eps <= 0.0:
            raise ValueError("eps must be positive")
        t = np.asarray(t, dtype=float)
        offset = -0.5 * self.a * eps
        ramp = -0.5 * self.a * (t + eps) ** 2 / eps
        return np.where(t >= 0.0, self.F_a(t) + offset, np.where(t >= -eps, ramp, 0.0))

    def ar_defect(self, theta_ar: float, t_grid) -> float:
        """Smallest sampled T with theta F_a(t) <= t f_a(t) + T on the grid."""
        t = np.asarray(t_grid, dtype=float)
        if np.any(t < 0.0):
            raise ValueError("AR defect is sampled on [0, inf)")
        gap = theta_ar * self.F_a(t) - t * self.f_a(t)
        return float(np.max(np.maximum(gap, 0.0))) if t.size else 0.0
