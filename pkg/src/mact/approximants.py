"""Minimax polynomial/rational approximants and the bundled coefficient registry.

Each registry entry holds one published coefficient set for a fast elementary
function (cube root, inverse tangent/sine/cosine variants), together with the
interval it was fitted on and its certified maximum absolute error.  The
coefficients are stored as the decimal strings they were published with and
parsed to the nearest double, so evaluation is reproducible bit-for-bit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from .errors import DegenerateDenominator, UnknownApproximant

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial a_0 + a_1 x + ... + a_n x^n, evaluated in Horner form."""

    coeffs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return eval_poly(self, x)


@dataclass(frozen=True)
class Rational:
    """Ratio of two polynomials."""

    numerator: Polynomial
    denominator: Polynomial

    def __call__(self, x):
        return eval_rational(self, x)


def eval_poly(p: Polynomial, x):
    """Evaluate ``p`` at ``x`` (scalar or ndarray) in Horner form.

    Horner's scheme is fixed as the evaluation order so results are
    bit-reproducible across runs and platforms.
    """
    coeffs = p.coeffs
    acc = coeffs[-1]
    if isinstance(x, np.ndarray):
        acc = np.full(x.shape, acc, dtype=np.float64)
        for c in coeffs[-2::-1]:
            acc *= x
            acc += c
        return acc
    for c in coeffs[-2::-1]:
        acc = acc * x + c
    return acc


def eval_rational(r: Rational, x):
    """Evaluate ``r`` at ``x``; raises DegenerateDenominator on a vanishing q(x)."""
    den = eval_poly(r.denominator, x)
    if isinstance(den, np.ndarray):
        if np.any(np.abs(den) < 1e-300):
            raise DegenerateDenominator("denominator vanished inside evaluation batch")
    elif abs(den) < 1e-300:
        raise DegenerateDenominator(f"denominator vanished at x={x!r}")
    return eval_poly(r.numerator, x) / den


class TargetFn(enum.Enum):
    """The elementary functions the bundled approximants replace.

    ASIN_HALF is the folded inverse-cosine kernel 2*arcsin(y/sqrt(2)) used for
    arccos(x) with x >= 0.5 (where y = sqrt(1-x)); ACOS_HALF is arccos itself
    on the lower half [0, 0.5].  ATAN_F is arctan(x) for x < 1 and ATAN_G is
    its complement pi/2 - arctan(x), used for arguments folded by reciprocal.
    """

    CBRT = "cbrt"
    ATAN_SQRT3 = "atan_sqrt3"
    ASIN_HALF = "asin_half"
    ACOS_HALF = "acos_half"
    ATAN_F = "atan_f"
    ATAN_G = "atan_g"

    def exact(self, x):
        """Reference libm evaluation of the target function."""
        return _EXACT[self](x)


_EXACT: dict = {
    TargetFn.CBRT: np.cbrt,
    TargetFn.ATAN_SQRT3: lambda x: np.arctan(_SQRT3 * x),
    TargetFn.ASIN_HALF: lambda x: 2.0 * np.arcsin(np.asarray(x) / _SQRT2),
    TargetFn.ACOS_HALF: np.arccos,
    TargetFn.ATAN_F: np.arctan,
    TargetFn.ATAN_G: lambda x: 0.5 * np.pi - np.arctan(x),
}

FormT = Union[Polynomial, Rational]
TargetT = Union[TargetFn, Callable]


def target_values(target: TargetT, x):
    """Evaluate a target given either a TargetFn member or a plain callable."""
    return target.exact(x) if isinstance(target, TargetFn) else target(x)


@dataclass(frozen=True)
class Approximant:
    """A fitted approximant: functional form, fit interval, certified max error."""

    form: FormT
    interval: Tuple[float, float]
    eps_max: float
    target_fn: TargetT

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise ValueError(f"interval must satisfy lo < hi, got {self.interval}")

    def __call__(self, x):
        return self.form(x)

    def measured_max_error(self, num_points: int = 100_000) -> float:
        """Max |approx - exact| over a dense uniform grid of the fit interval."""
        lo, hi = self.interval
        grid = np.linspace(lo, hi, num_points)
        return float(np.max(np.abs(self.form(grid) - target_values(self.target_fn, grid))))


def _poly(*coeffs: str) -> Polynomial:
    return Polynomial(tuple(float(c) for c in coeffs))


# ---------------------------------------------------------------------------
# Bundled coefficient sets, exactly as published (decimal strings -> nearest
# double).  Intervals are the fit intervals recovered by regenerating each row
# with the Remez engine and matching the certified error:
#   * cube-root polynomials were fitted on [0, 1] even though the transform
#     only calls them above the 0.008856 knee (the rationals use the knee);
#   * the arctan(sqrt(3) x) polynomials were fitted short of 1 (see
#     ATAN_SQRT3_FIT_HI); pipeline code still evaluates them up to 1, and the
#     small endpoint overrun is part of the transform's accuracy envelope.
# ---------------------------------------------------------------------------

CBRT_KNEE = 0.008856  # branch point of the lightness kernel; also rational fit lo

# Fit right-endpoint of the arctan(sqrt(3) x) sets (finalized by regeneration).
ATAN_SQRT3_FIT_HI = 254.0 / 256.0

_CBRT_POLYS = {
    (2,): ("1.271154e-01", ("1.268979e-01", "2.393873", "-1.647669")),
    (3,): ("9.787829e-02", ("9.787826e-02", "4.057495", "-7.388864", "4.331370")),
    (4,): ("8.111150e-02",
           ("8.111133e-02", "5.926004", "-2.017165e+01", "2.833070e+01",
            "-1.324728e+01")),
    (5,): ("7.002956e-02",
           ("7.002910e-02", "7.961214", "-4.329352e+01", "1.063182e+02",
            "-1.135685e+02", "4.358268e+01")),
}

_CBRT_RATIONALS = {
    (2, 2): ("2.060996e-03",
             ("6.309655e-03", "5.785782e-01", "1.591005"),
             ("4.482646e-02", "1.175862", "9.596879e-01")),
    (2, 3): ("7.210231e-04",
             ("2.500705e-03", "3.447113e-01", "1.942708"),
             ("1.978701e-02", "8.542797e-01", "1.664540", "-2.503267e-01")),
    (3, 2): ("5.931593e-04",
             ("1.776519e-03", "2.632323e-01", "1.751297", "3.836709e-01"),
             ("1.432256e-02", "6.779998e-01", "1.706260")),
    (2, 4): ("3.107735e-04",
             ("1.317899e-03", "2.390113e-01", "2.099395"),
             ("1.124254e-02", "6.726679e-01", "2.184656", "-7.511150e-01",
              "2.229717e-01")),
    (3, 3): ("1.858694e-04",
             ("4.370889e-04", "9.526952e-02", "1.252009", "1.302733"),
             ("3.912364e-03", "2.954084e-01", "1.717143", "6.343408e-01")),
    (4, 2): ("2.334688e-04",
             ("7.589302e-04", "1.519784e-01", "1.663584", "8.368075e-01",
              "-1.657269e-01"),
             ("6.644723e-03", "4.506424e-01", "2.030622")),
    (3, 4): ("8.539863e-05",
             ("1.683667e-04", "4.667675e-02", "9.106812e-01", "1.810577"),
             ("1.610864e-03", "1.617974e-01", "1.494070", "1.218468",
              "-1.079451e-01")),
    (4, 3): ("8.052920e-05",
             ("1.349673e-04", "3.832079e-02", "7.870174e-01", "1.799062",
              "2.071170e-01"),
             ("1.299250e-03", "1.345420e-01", "1.330358", "1.365369")),
    (4, 4): ("3.856930e-05",
             ("3.927283e-05", "1.392318e-02", "4.114739e-01", "1.734853",
              "8.679223e-01"),
             ("4.022100e-04", "5.414536e-02", "8.221526e-01", "1.800167",
              "3.513617e-01")),
}

# Degree-2 row: the published a_2 reads 7.497879e-01, which cannot belong to
# any fit of arctan(sqrt(3) x) (it puts the curve ~0.37 above the target at
# x=0.5).  Regeneration recovers the same magnitude with a negative sign, so
# the sign is restored here; see the distributed coefficient audit test.
_ATAN_SQRT3_POLYS = {
    (2,): ("6.907910e-03", ("5.959793e-03", "1.782975", "-7.497879e-01")),
    (3,): ("3.654156e-03",
           ("-3.654076e-03", "1.884080", "-9.805583e-01", "1.430580e-01")),
    (4,): ("1.286371e-03",
           ("-1.286369e-03", "1.796716", "-4.958969e-01", "-6.927404e-01",
            "4.421541e-01")),
    (5,): ("1.801311e-04",
           ("-1.801283e-04", "1.739333", "-2.039848e-02", "-2.065512",
            "2.052837", "-6.591729e-01")),
}

_ASIN_HALF_POLYS = {
    (4,): ("2.097814e-05",
           ("2.097797e-05", "1.412840", "1.429881e-02", "6.704361e-02",
            "6.909677e-02")),
    (5,): ("2.370540e-06",
           ("-2.370048e-06", "1.414434", "-3.300037e-03", "1.354670e-01",
            "-3.994259e-02", "6.099502e-02")),
}

_ACOS_HALF_POLYS = {
    (4,): ("1.048949e-05",
           ("1.570786", "-9.990285e-01", "-1.429899e-02", "-9.481335e-02",
            "-1.381942e-01")),
    (5,): ("1.186403e-06",
           ("1.570798", "-1.000156", "3.299810e-03", "-1.915780e-01",
            "7.988231e-02", "-1.725177e-01")),
}

_ATAN_F_POLYS = {
    (4,): ("1.036515e-04",
           ("-1.036508e-04", "1.003740", "-1.773538e-02", "-3.390563e-01",
            "1.386796e-01")),
    (5,): ("2.073939e-05",
           ("2.073866e-05", "9.982666e-01", "2.352573e-02", "-4.506862e-01",
            "2.635050e-01", "-4.920822e-02")),
}

_ATAN_G_POLYS = {
    (4,): ("1.051643e-04",
           ("1.570917", "-1.004004", "1.885694e-02", "3.373159e-01",
            "-1.377930e-01")),
    (5,): ("2.012104e-05",
           ("1.570769", "-9.981253e-01", "-2.440212e-02", "4.528921e-01",
            "-2.659181e-01", "5.016228e-02")),
}

_FIT_INTERVALS = {
    TargetFn.CBRT: None,  # per-form: polynomials on [0,1], rationals above knee
    TargetFn.ATAN_SQRT3: (0.0, ATAN_SQRT3_FIT_HI),
    TargetFn.ASIN_HALF: (0.0, 1.0 / _SQRT2),
    TargetFn.ACOS_HALF: (0.0, 0.5),
    TargetFn.ATAN_F: (0.0, 254.0 / 255.0),
    TargetFn.ATAN_G: (1.0 / 255.0, 1.0),
}


def _build_registry() -> dict:
    reg: dict = {}
    for deg, (eps, coeffs) in _CBRT_POLYS.items():
        reg[(TargetFn.CBRT, deg)] = Approximant(
            _poly(*coeffs), (0.0, 1.0), float(eps), TargetFn.CBRT)
    for deg, (eps, num, den) in _CBRT_RATIONALS.items():
        reg[(TargetFn.CBRT, deg)] = Approximant(
            Rational(_poly(*num), _poly(*den)), (CBRT_KNEE, 1.0),
            float(eps), TargetFn.CBRT)
    for fn, table in ((TargetFn.ATAN_SQRT3, _ATAN_SQRT3_POLYS),
                      (TargetFn.ASIN_HALF, _ASIN_HALF_POLYS),
                      (TargetFn.ACOS_HALF, _ACOS_HALF_POLYS),
                      (TargetFn.ATAN_F, _ATAN_F_POLYS),
                      (TargetFn.ATAN_G, _ATAN_G_POLYS)):
        for deg, (eps, coeffs) in table.items():
            reg[(fn, deg)] = Approximant(
                _poly(*coeffs), _FIT_INTERVALS[fn], float(eps), fn)
    return reg


_REGISTRY = _build_registry()


def registry_get(fn: TargetFn, degree_spec: Tuple[int, ...]) -> Approximant:
    """Look up a bundled approximant by target function and degree(s).

    ``degree_spec`` is ``(n,)`` for a polynomial or ``(n, m)`` for a rational.
    """
    key = (fn, tuple(int(d) for d in degree_spec))
    try:
        return _REGISTRY[key]
    except KeyError:
        raise UnknownApproximant(
            f"no bundled coefficients for {fn.value} with degrees {degree_spec}"
        ) from None


def registry_keys():
    """All (target_fn, degree_spec) pairs with bundled coefficients."""
    return sorted(_REGISTRY.keys(), key=lambda k: (k[0].value, k[1]))


def denominator_root_free(r: Rational, interval: Tuple[float, float],
                          samples: int = 4096) -> bool:
    """Dense-sampling check that q has no sign change / near-zero on interval."""
    grid = np.linspace(interval[0], interval[1], samples)
    den = eval_poly(r.denominator, grid)
    return bool(np.all(np.abs(den) > 1e-12) and
                (np.all(den > 0) or np.all(den < 0)))
