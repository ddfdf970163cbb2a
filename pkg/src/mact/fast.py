"""Approximated fast paths for the three transforms.

Drop-in replacements for the exact pipelines that substitute minimax
approximants for the expensive elementary functions (cube root, inverse
tangent/sine/cosine).  Everything else — gamma linearization, the RGB->XYZ
matrix, saturation/intensity, the vector length — is computed exactly, so the
transform error is exactly the approximant error propagated through the
output components.

Coefficient sources: the CIELAB rationals and the spherical-transform
polynomials evaluate the bundled (published) coefficient sets; the HSI
inverse-tangent polynomial is regenerated on [0, 1] at first use because the
bundled set was fitted short of 1 while the hue arguments reach 1 exactly
(see the registry notes), and the regenerated fit is what the reference
accuracy figures correspond to.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from . import exact
from .approximants import Approximant, TargetFn, eval_poly, registry_get
from .errors import UndefinedAngle
from .remez import RemezProblem, remez_poly

TWO_PI = 2.0 * np.pi

# Linearized channel values for all 256 8-bit inputs; exact to double
# precision, so integer-input fast paths lose nothing over the analytic form.
GAMMA_TABLE = exact.inverse_gamma(np.arange(256) / 255.0)


@functools.lru_cache(maxsize=None)
def _atan_unit_interval(degree: int) -> Approximant:
    """arctan(sqrt(3) x) minimax fit on the full argument range [0, 1]."""
    res = remez_poly(RemezProblem(target=TargetFn.ATAN_SQRT3, interval=(0.0, 1.0),
                                  num_degree=degree))
    return res.approximant


@dataclass(frozen=True)
class MactConfig:
    """Approximant degree selection for the three fast transforms.

    Defaults are the highest-order bundled sets: CIELAB rational (4,4), HSI
    polynomial degree 5, spherical (arcsin, arccos, arctan) degrees (5,5,5).
    """

    cielab_degrees: Tuple[int, int] = (4, 4)
    hsi_degree: int = 5
    sct_degrees: Tuple[int, int, int] = (5, 5, 5)

    def __post_init__(self):
        n, m = self.cielab_degrees
        object.__setattr__(self, "cbrt_approx",
                           registry_get(TargetFn.CBRT, (n, m)))
        # degree must resolve against the bundled sets; coefficients for the
        # pipeline come from the [0,1] refit (see module docstring)
        registry_get(TargetFn.ATAN_SQRT3, (self.hsi_degree,))
        object.__setattr__(self, "atan_sqrt3_approx",
                           _atan_unit_interval(self.hsi_degree))
        n_asin, m_acos, r_atan = self.sct_degrees
        object.__setattr__(self, "asin_approx",
                           registry_get(TargetFn.ASIN_HALF, (n_asin,)))
        object.__setattr__(self, "acos_approx",
                           registry_get(TargetFn.ACOS_HALF, (m_acos,)))
        object.__setattr__(self, "atan_f_approx",
                           registry_get(TargetFn.ATAN_F, (r_atan,)))
        object.__setattr__(self, "atan_g_approx",
                           registry_get(TargetFn.ATAN_G, (r_atan,)))


DEFAULT_CONFIG = MactConfig()


def cbrt_fast(t, approx: Approximant):
    """Approximate t**(1/3) on the cube-root branch of the lightness kernel."""
    return approx.form(t)


def rgb_to_lab_fast(pixels, cfg: MactConfig = DEFAULT_CONFIG):
    """RGB -> CIELAB with the cube-root branch replaced by a minimax rational.

    The linear branch below the knee stays exact, as does everything else.
    """
    arr = np.asarray(pixels)
    if arr.dtype.kind in "iu":
        r = GAMMA_TABLE[arr[..., 0]]
        g = GAMMA_TABLE[arr[..., 1]]
        b = GAMMA_TABLE[arr[..., 2]]
    else:
        k = arr.astype(np.float64) / 255.0
        r, g, b = (exact.inverse_gamma(k[..., 0]), exact.inverse_gamma(k[..., 1]),
                   exact.inverse_gamma(k[..., 2]))
    x, y, z = exact.rgb_to_xyz(r, g, b)
    fx = _lab_f_fast(x / exact.WHITE_X, cfg)
    fy = _lab_f_fast(y / exact.WHITE_Y, cfg)
    fz = _lab_f_fast(z / exact.WHITE_Z, cfg)
    l_star = 116.0 * fy - 16.0
    a_star = 500.0 * (fx - fy)
    b_star = 200.0 * (fy - fz)
    return exact._stack(l_star, a_star, b_star)


def _lab_f_fast(t, cfg: MactConfig):
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        approx = cbrt_fast(t, cfg.cbrt_approx)
    return np.where(t > exact.LAB_KNEE, approx,
                    exact.LAB_LINEAR_SLOPE * t + exact.LAB_LINEAR_OFFSET)


def atan_sqrt3_fast(x, approx: Approximant):
    """Approximate arctan(sqrt(3) x) for |x| <= 1, odd-extended to negatives."""
    x = np.asarray(x, dtype=np.float64)
    mag = eval_poly(approx.form, np.abs(x))
    return np.where(x < 0.0, -mag, mag)


def rgb_to_hsi_fast(pixels, cfg: MactConfig = DEFAULT_CONFIG):
    """RGB -> HSI with the hue arctangent replaced by a minimax polynomial.

    Saturation and intensity are exact; the hue case analysis matches the
    exact arctangent form, so gray pixels and the pure-red branch are exact.
    """
    r, g, b = exact._channels(pixels)
    r, g, b = r / 255.0, g / 255.0, b / 255.0
    case1 = (r > b) & (g > b)
    case2 = ~case1 & (g > r)
    case3 = ~case1 & ~case2 & (b > g)
    case4 = ~case1 & ~case2 & ~case3 & (r > b)
    num = np.select([case1, case2, case3], [g - r, b - g, r - b], default=0.0)
    den = np.select([case1, case2, case3],
                    [(g - b) + (r - b), (b - r) + (g - r), (r - g) + (b - g)],
                    default=1.0)
    base = np.select([case1, case2, case3],
                     [np.pi / 3.0, np.pi, 5.0 * np.pi / 3.0], default=0.0)
    h = base + atan_sqrt3_fast(num / den, cfg.atan_sqrt3_approx)
    h = np.select([case1 | case2 | case3, case4], [h, 0.0], default=np.nan)
    h = np.where(h < 0.0, h + TWO_PI, h)
    h = np.where(h >= TWO_PI, h - TWO_PI, h)
    s, i = exact._hsi_saturation_intensity(r, g, b)
    return exact._stack(h, s, i)


def acos_fast(x, cfg: MactConfig = DEFAULT_CONFIG):
    """Approximate arccos on [0, 1].

    Below 0.5 a direct polynomial; at and above 0.5 the numerically stable
    folding arccos(x) = 2 arcsin(sqrt((1-x)/2)), with the factor 2 and the
    1/sqrt(2) scaling baked into the bundled polynomial's variable
    y = sqrt(1 - x).
    """
    x = np.asarray(x, dtype=np.float64)
    upper = eval_poly(cfg.asin_approx.form, np.sqrt(np.maximum(1.0 - x, 0.0)))
    lower = eval_poly(cfg.acos_approx.form, x)
    return np.where(x < 0.5, lower, upper)


def atan_unit_fast(g, r, cfg: MactConfig = DEFAULT_CONFIG):
    """Approximate arctan(g/r) for g, r >= 0 via the split-domain polynomials.

    For g < r the direct fit at g/r; otherwise the complement fit evaluated at
    r/g, which also covers g == r and r == 0 (argument 0 gives the fitted
    constant near pi/2).  Raises UndefinedAngle when both inputs are zero.
    """
    g_arr = np.asarray(g, dtype=np.float64)
    r_arr = np.asarray(r, dtype=np.float64)
    scalar = g_arr.ndim == 0 and r_arr.ndim == 0
    if scalar and g_arr == 0.0 and r_arr == 0.0:
        raise UndefinedAngle("arctan(g/r) undefined at g = r = 0")
    g_arr, r_arr = np.broadcast_arrays(g_arr, r_arr)
    direct = g_arr < r_arr
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = np.where(direct, g_arr / np.where(r_arr > 0.0, r_arr, 1.0),
                       np.where(g_arr > 0.0, r_arr / np.where(g_arr > 0.0, g_arr, 1.0), 0.0))
    out = np.where(direct,
                   eval_poly(cfg.atan_f_approx.form, arg),
                   eval_poly(cfg.atan_g_approx.form, arg))
    return np.where((g_arr == 0.0) & (r_arr == 0.0), np.nan, out)


def rgb_to_sct_fast(pixels, cfg: MactConfig = DEFAULT_CONFIG):
    """RGB -> spherical coordinates with approximated inverse trig.

    The vector length keeps its exact square root (only the inverse
    trigonometric calls are approximated); both angles are clamped to
    [0, pi/2] against approximant endpoint overshoot.
    """
    r, g, b = exact._channels(pixels)
    length = np.sqrt(r * r + g * g + b * b)
    safe_len = np.where(length > 0.0, length, 1.0)
    angle_a = np.where(length > 0.0, acos_fast(b / safe_len, cfg), 0.0)
    angle_b = atan_unit_fast(g, r, cfg)
    angle_a = np.clip(angle_a, 0.0, 0.5 * np.pi)
    angle_b = np.where(np.isnan(angle_b), np.nan,
                       np.clip(angle_b, 0.0, 0.5 * np.pi))
    return exact._stack(length, angle_a, angle_b)
