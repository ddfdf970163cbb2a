"""Fast RGB color-space transforms via minimax approximation.

Exact and approximated RGB -> {CIELAB, HSI, spherical-coordinate} transforms,
a Remez exchange engine for regenerating the approximant coefficients, 3D-LUT
interpolation baselines, and a full-cube accuracy/benchmark harness.
"""

from .approximants import (
    Approximant,
    Polynomial,
    Rational,
    TargetFn,
    eval_poly,
    eval_rational,
    registry_get,
    registry_keys,
)
from .remez import RemezProblem, RemezResult, find_error_extrema, initial_reference, remez_poly, remez_rational

__version__ = "0.1.0"

__all__ = [
    "Approximant",
    "Polynomial",
    "Rational",
    "TargetFn",
    "eval_poly",
    "eval_rational",
    "registry_get",
    "registry_keys",
    "RemezProblem",
    "RemezResult",
    "find_error_extrema",
    "initial_reference",
    "remez_poly",
    "remez_rational",
    "__version__",
]
