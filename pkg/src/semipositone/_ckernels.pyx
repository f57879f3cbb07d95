# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled element kernels. Same interface as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt

cnp.import_array()

cdef double XI0 = 0.5 - 0.5 / sqrt(3.0)
cdef double XI1 = 0.5 + 0.5 / sqrt(3.0)


cdef inline double _ipow(double x, double y) nogil:
    # repeated multiplication (times sqrt for half-integers) for small exponents, libm otherwise
    cdef int n = <int>y
    cdef double r = 1.0
    if 0.0 <= y <= 8.5 and (n == y or n + 0.5 == y):
        if n != y:
            r = sqrt(x)
        while n > 0:
            r *= x
            n -= 1
        return r
    return pow(x, y)


def kinetic(const double[::1] u, const double[::1] dr, const double[::1] moment, double p, grad=None):
    cdef Py_ssize_t m = dr.shape[0], e
    cdef double s, a, w, total = 0.0, flux
    cdef double[::1] g
    cdef bint want = grad is not None
    if want:
        g = grad
    for e in range(m):
        s = (u[e + 1] - u[e]) / dr[e]
        a = fabs(s)
        if p == 2.0:
            total += moment[e] * s * s
            flux = moment[e] * s / dr[e]
        elif a > 0.0:
            w = _ipow(a, p - 2.0)
            total += moment[e] * w * a * a
            flux = moment[e] * w * s / dr[e]
        else:
            flux = 0.0
        if want:
            g[e] -= flux
            g[e + 1] += flux
    return total


cdef inline double _F(double t, double q, double t0, double t0q, double t0q1) nogil:
    if t0 == 0.0:
        return _ipow(t, q) / q
    return (_ipow(t + t0, q) - t0q) / q - t0q1 * t


cdef inline double _f(double t, double q, double t0, double t0q1) nogil:
    if t0 == 0.0:
        return _ipow(t, q - 1.0)
    return _ipow(t + t0, q - 1.0) - t0q1


def potential_power(const double[::1] u, const double[:, ::1] wq, double q, double t0,
                    double a, double eps, grad=None):
    cdef Py_ssize_t m = wq.shape[0], e, k
    cdef double total = 0.0, uq, w, val
    cdef double t0q = pow(t0, q), t0q1 = pow(t0, q - 1.0)
    cdef double xi[2]
    cdef double[::1] g
    cdef bint want = grad is not None
    xi[0] = XI0
    xi[1] = XI1
    if want:
        g = grad
    for e in range(m):
        for k in range(2):
            uq = (1.0 - xi[k]) * u[e] + xi[k] * u[e + 1]
            w = wq[e, k]
            if uq > 0.0:
                total += w * (_F(uq, q, t0, t0q, t0q1) - a * uq)
            if want:
                if uq >= 0.0:
                    val = _f(uq, q, t0, t0q1) - a
                elif uq >= -eps:
                    val = -a * (uq + eps) / eps
                else:
                    val = 0.0
                g[e] -= w * val * (1.0 - xi[k])
                g[e + 1] -= w * val * xi[k]
    return total
