"""Reference implementations of the three color-space transforms.

All functions are vectorized over numpy arrays: pixel arguments have shape
``(..., 3)`` and may be integer (8-bit RGB) or real-valued (LUT lattice
coordinates, inverse-transform outputs).  Every intermediate is computed in
double precision with no quantization.

Undefined angular components (HSI hue on the gray axis, the spherical
second angle when r = g = 0) are represented as NaN and canonicalized to 0
only where a distance or a LUT lattice needs a concrete number, which is safe
because the paired magnitude component (saturation / sin of the first angle)
is 0 there.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi

# ITU-R BT.709 inverse gamma, linear-RGB -> CIEXYZ matrix, and D65 white point
GAMMA_KNEE = 0.081
GAMMA_SLOPE = 4.5
GAMMA_OFFSET = 0.099
GAMMA_SCALE = 1.099
GAMMA_POWER = 1.0 / 0.45

RGB_TO_XYZ_MATRIX = np.array([
    [0.412391, 0.357584, 0.180481],
    [0.212639, 0.715169, 0.072192],
    [0.019331, 0.119195, 0.950532],
])

WHITE_X = 0.950456
WHITE_Y = 1.0
WHITE_Z = 1.089058

LAB_KNEE = 0.008856  # branch point of the lightness kernel f(t)
LAB_LINEAR_SLOPE = 7.787
LAB_LINEAR_OFFSET = 16.0 / 116.0


def _channels(pixels):
    a = np.asarray(pixels, dtype=np.float64)
    return a[..., 0], a[..., 1], a[..., 2]


def _stack(c0, c1, c2):
    return np.stack(np.broadcast_arrays(c0, c1, c2), axis=-1)


def inverse_gamma(k_prime):
    """Nonlinear 0..1 channel value -> linear intensity (BT.709)."""
    k = np.asarray(k_prime, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        curved = ((k + GAMMA_OFFSET) / GAMMA_SCALE) ** GAMMA_POWER
    return np.where(k < GAMMA_KNEE, k / GAMMA_SLOPE, curved)


def rgb_to_xyz(r, g, b):
    """Linear RGB in [0,1] -> CIEXYZ tristimulus values."""
    m = RGB_TO_XYZ_MATRIX
    x = m[0, 0] * r + m[0, 1] * g + m[0, 2] * b
    y = m[1, 0] * r + m[1, 1] * g + m[1, 2] * b
    z = m[2, 0] * r + m[2, 1] * g + m[2, 2] * b
    return x, y, z


def lab_f(t):
    """Lightness kernel: cube root above the knee, linear segment below."""
    t = np.asarray(t, dtype=np.float64)
    return np.where(t > LAB_KNEE, np.cbrt(t), LAB_LINEAR_SLOPE * t + LAB_LINEAR_OFFSET)


def xyz_to_lab(x, y, z):
    """CIEXYZ -> CIELAB (D65 reference white)."""
    fx = lab_f(np.asarray(x, dtype=np.float64) / WHITE_X)
    fy = lab_f(np.asarray(y, dtype=np.float64) / WHITE_Y)
    fz = lab_f(np.asarray(z, dtype=np.float64) / WHITE_Z)
    l_star = 116.0 * fy - 16.0
    a_star = 500.0 * (fx - fy)
    b_star = 200.0 * (fy - fz)
    return _stack(l_star, a_star, b_star)


def rgb_to_lab_exact(pixels):
    """RGB (0..255 per channel, integer or real) -> CIELAB."""
    r, g, b = _channels(pixels)
    x, y, z = rgb_to_xyz(inverse_gamma(r / 255.0),
                         inverse_gamma(g / 255.0),
                         inverse_gamma(b / 255.0))
    return xyz_to_lab(x, y, z)


def _hsi_saturation_intensity(r, g, b):
    total = r + g + b
    lowest = np.minimum(np.minimum(r, g), b)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(total > 0.0, 1.0 - 3.0 * lowest / total, 0.0)
    i = total / 3.0
    return s, i


def rgb_to_hsi_arccos(pixels):
    """RGB -> HSI via the inverse-cosine hue formula (channels scaled to [0,1])."""
    r, g, b = _channels(pixels)
    r, g, b = r / 255.0, g / 255.0, b / 255.0
    num = 0.5 * ((r - g) + (r - b))
    den_sq = (r - g) ** 2 + (r - b) * (g - b)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = num / np.sqrt(den_sq)
    h = np.arccos(np.clip(ratio, -1.0, 1.0))
    h = np.where(b > g, TWO_PI - h, h)
    h = np.where(den_sq > 0.0, h, np.nan)
    s, i = _hsi_saturation_intensity(r, g, b)
    return _stack(h, s, i)


def rgb_to_hsi_exact(pixels):
    """RGB -> HSI via the arctangent hue case analysis (no square root).

    Numerically identical to the inverse-cosine form wherever hue is defined.
    """
    r, g, b = _channels(pixels)
    r, g, b = r / 255.0, g / 255.0, b / 255.0
    sqrt3 = np.sqrt(3.0)
    case1 = (r > b) & (g > b)
    case2 = ~case1 & (g > r)
    case3 = ~case1 & ~case2 & (b > g)
    case4 = ~case1 & ~case2 & ~case3 & (r > b)
    with np.errstate(divide="ignore", invalid="ignore"):
        h1 = np.pi / 3.0 + np.arctan(sqrt3 * (g - r) / ((g - b) + (r - b)))
        h2 = np.pi + np.arctan(sqrt3 * (b - g) / ((b - r) + (g - r)))
        h3 = 5.0 * np.pi / 3.0 + np.arctan(sqrt3 * (r - b) / ((r - g) + (b - g)))
    h = np.select([case1, case2, case3, case4], [h1, h2, h3, 0.0], default=np.nan)
    s, i = _hsi_saturation_intensity(r, g, b)
    return _stack(h, s, i)


def rgb_to_sct_exact(pixels):
    """RGB (raw 0..255 scale) -> spherical coordinates (L, angle_a, angle_b)."""
    r, g, b = _channels(pixels)
    length = np.sqrt(r * r + g * g + b * b)
    safe_len = np.where(length > 0.0, length, 1.0)
    angle_a = np.where(length > 0.0,
                       np.arccos(np.clip(b / safe_len, -1.0, 1.0)), 0.0)
    angle_b = np.arctan2(g, r)
    angle_b = np.where((r == 0.0) & (g == 0.0), np.nan, angle_b)
    return _stack(length, angle_a, angle_b)


def sct_to_rgb(pixels):
    """Spherical coordinates -> real-valued RGB; an undefined angle_b acts as 0."""
    length, angle_a, angle_b = _channels(pixels)
    angle_b = np.where(np.isnan(angle_b), 0.0, angle_b)
    sin_a = np.sin(angle_a)
    r = length * sin_a * np.cos(angle_b)
    g = length * sin_a * np.sin(angle_b)
    b = length * np.cos(angle_a)
    return _stack(r, g, b)


def lab_distance(x, y):
    """Euclidean distance in CIELAB."""
    dx = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return np.sqrt(np.sum(dx * dx, axis=-1))


def hsi_distance(x, y):
    """Cylindrical HSI distance with hue wrapped to its shorter arc."""
    hx, sx, ix = _channels(x)
    hy, sy, iy = _channels(y)
    hx = np.where(np.isnan(hx), 0.0, hx)
    hy = np.where(np.isnan(hy), 0.0, hy)
    theta = np.abs(hx - hy)
    theta = np.where(theta > np.pi, TWO_PI - theta, theta)
    d_sq = sx * sx + sy * sy - 2.0 * sx * sy * np.cos(theta) + (ix - iy) ** 2
    return np.sqrt(np.maximum(d_sq, 0.0))


def sct_distance_indirect(x, y):
    """Distance between spherical-coordinate pixels, scored in CIELAB.

    No intrinsic perceptual metric exists across spherical shells, so both
    pixels are mapped back to (clamped) RGB and pushed through the real-valued
    CIELAB pipeline.
    """
    rgb_x = np.clip(sct_to_rgb(x), 0.0, 255.0)
    rgb_y = np.clip(sct_to_rgb(y), 0.0, 255.0)
    return lab_distance(rgb_to_lab_exact(rgb_x), rgb_to_lab_exact(rgb_y))
