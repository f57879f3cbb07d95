"""Positive solutions of the radial semipositone problem -Delta_p u = h(x)(f(u) - a) on R^N."""

from .kernels import BACKEND
from .model import NonlinearitySpec, ProblemSpec, Regime, WeightSpec, critical_exponent, standard_spec

__all__ = [
    "BACKEND",
    "NonlinearitySpec",
    "ProblemSpec",
    "Regime",
    "WeightSpec",
    "critical_exponent",
    "standard_spec",
]
