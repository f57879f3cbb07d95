"""Pure numpy element kernels. Same interface as the compiled ``_ckernels``."""

import numpy as np

GAUSS_XI = np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])


def kinetic(u, dr, moment, p, grad=None):
    """Return sum_e moment_e |s_e|^p; optionally add d/du of (1/p) times that into ``grad``."""
    s = np.diff(u) / dr
    a = np.abs(s)
    total = float(np.dot(moment, a**p))
    if grad is not None:
        if p == 2.0:
            flux = moment * s / dr
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                flux = np.where(a > 0.0, moment * a ** (p - 2.0) * s / dr, 0.0)
        grad[:-1] -= flux
        grad[1:] += flux
    return total


def quad_values(u):
    ul, ur = u[:-1], u[1:]
    return np.stack([(1.0 - GAUSS_XI[0]) * ul + GAUSS_XI[0] * ur,
                     (1.0 - GAUSS_XI[1]) * ul + GAUSS_XI[1] * ur], axis=1)


def scatter(vals, grad):
    """Add sum_g vals[e, g] * phi_i(x_{e,g}) into grad for the element's two nodes."""
    grad[:-1] += vals[:, 0] * (1.0 - GAUSS_XI[0]) + vals[:, 1] * (1.0 - GAUSS_XI[1])
    grad[1:] += vals[:, 0] * GAUSS_XI[0] + vals[:, 1] * GAUSS_XI[1]


def potential_power(u, wq, q, t0, a, eps, grad=None):
    """Return sum w F_a(u) over Gauss points for the (shifted) power family."""
    uq = quad_values(u)
    pos = uq > 0.0
    tp = np.where(pos, uq, 0.0)
    if t0 == 0.0:
        F = tp**q / q
    else:
        F = ((tp + t0) ** q - t0**q) / q - t0 ** (q - 1.0) * tp
    total = float(np.sum(wq * np.where(pos, F - a * tp, 0.0)))
    if grad is not None:
        nn = uq >= 0.0
        tn = np.where(nn, uq, 0.0)
        if t0 == 0.0:
            f = tn ** (q - 1.0)
        else:
            f = (tn + t0) ** (q - 1.0) - t0 ** (q - 1.0)
        ramp = np.where(uq >= -eps, -a * (uq + eps) / eps, 0.0)
        scatter(-wq * np.where(nn, f - a, ramp), grad)
    return total
