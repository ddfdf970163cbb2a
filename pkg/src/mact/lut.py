"""3D lookup-table baselines: packing, extraction, and interpolation.

A ``Lut3D`` packs a uniform lattice over the RGB cube ([0, 255] inclusive,
real spacing ``255/(grid_n - 1)``) with destination triples computed by the
exact transforms.  Interpolation methods use 8 (trilinear), 6 (prism),
5 (pyramidal), or 4 (tetrahedral) neighboring lattice nodes:

* prism splits the cell by the plane dg >= db into two triangular prisms;
* pyramidal splits into three pyramids by the smallest fractional offset,
  blending the near face of that axis bilinearly and carrying the smallest
  offset along the cell's main diagonal;
* tetrahedral splits into six tetrahedra by the sort order of the offsets,
  each value a base node plus three sorted-difference terms.

Angular destination components (HSI hue; both spherical angles) interpolate
on the circle: trilinear cascades pairwise angular interpolation through its
three axes, the simplex methods take the weight-blended circular mean of
their nodes.  Undefined angles are canonicalized to 0 at lattice build time
(their paired magnitude component is 0 there).

The caching variant pre-computes per-cell difference terms so the linear
components need only multiply-adds; angular components always read the
lattice values, so both variants agree identically there.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from . import exact
from .errors import CacheMissing, MalformedHeader

TWO_PI = 2.0 * np.pi

METHODS = ("trilinear", "prism", "pyramidal", "tetrahedral")
VARIANTS = ("standard", "caching")
NEIGHBOR_COUNT = {"trilinear": 8, "prism": 6, "pyramidal": 5, "tetrahedral": 4}

SPACES = ("lab", "hsi", "sct")
ANGULAR_MASKS = {
    "lab": (False, False, False),
    "hsi": (True, False, False),
    "sct": (False, True, True),
}
_EXACT_TRANSFORMS = {
    "lab": exact.rgb_to_lab_exact,
    "hsi": exact.rgb_to_hsi_exact,
    "sct": exact.rgb_to_sct_exact,
}

_MAGIC = b"MLUT"
_VERSION = 1

# Corner order: bit 2 = r, bit 1 = g, bit 0 = b (index c = r<<2 | g<<1 | b).
_CORNER_OFFSETS = np.array([[c >> 2 & 1, c >> 1 & 1, c & 1] for c in range(8)],
                           dtype=np.int64)


@dataclass
class Lut3D:
    grid_n: int
    spacing: float
    destination_space: str
    values: np.ndarray                    # (grid_n, grid_n, grid_n, 3)
    angular_mask: Tuple[bool, bool, bool]
    cache: Optional[Dict[str, np.ndarray]] = None

    @property
    def flat_values(self) -> np.ndarray:
        return self.values.reshape(-1, 3)


def lattice_coordinates(grid_n: int) -> np.ndarray:
    spacing = 255.0 / (grid_n - 1)
    return np.arange(grid_n) * spacing


def build_lut(space: str, grid_n: int) -> Lut3D:
    """Populate a lattice with the exact transform of each lattice RGB point."""
    if space not in SPACES:
        raise ValueError(f"unknown destination space {space!r}")
    if grid_n not in (9, 17, 33):
        raise ValueError("grid_n must be one of 9, 17, 33")
    coords = lattice_coordinates(grid_n)
    r, g, b = np.meshgrid(coords, coords, coords, indexing="ij")
    pixels = np.stack([r, g, b], axis=-1)
    values = _EXACT_TRANSFORMS[space](pixels)
    values = np.nan_to_num(values, nan=0.0)
    return Lut3D(grid_n=grid_n, spacing=255.0 / (grid_n - 1),
                 destination_space=space, values=values,
                 angular_mask=ANGULAR_MASKS[space])


def _locate(lut: Lut3D, pixels):
    """Cell base indices and fractional offsets; the upper face clamps to the
    last interior cell with offset 1.0."""
    x = np.asarray(pixels, dtype=np.float64) / lut.spacing
    base = np.minimum(np.floor(x).astype(np.int64), lut.grid_n - 2)
    base = np.maximum(base, 0)
    frac = x - base
    return base, frac


def _corner_flat_index(lut: Lut3D, base: np.ndarray) -> np.ndarray:
    """Flat lattice index of all 8 cell corners, shape (..., 8)."""
    g = lut.grid_n
    idx = base[..., None, :] + _CORNER_OFFSETS
    return (idx[..., 0] * g + idx[..., 1]) * g + idx[..., 2]


def node_weights(lut: Lut3D, pixels, method: str):
    """Interpolation nodes and blending weights for each pixel.

    Returns ``(flat_indices, weights)`` with exactly 8/6/5/4 nodes per pixel
    for trilinear/prism/pyramidal/tetrahedral.  Weights sum to 1; they are
    non-negative except for the pyramid's face-corner term, which can dip
    below zero by at most the smallest offset.
    """
    base, frac = _locate(lut, pixels)
    corners = _corner_flat_index(lut, base)   # (..., 8)
    dr, dg, db = frac[..., 0], frac[..., 1], frac[..., 2]

    g_n = lut.grid_n

    def stride(r_bit, g_bit, b_bit):
        # flat-lattice offset of a cell corner (r-major layout)
        return r_bit * g_n * g_n + g_bit * g_n + b_bit

    base_flat = (base[..., 0] * g_n + base[..., 1]) * g_n + base[..., 2]

    if method == "trilinear":
        w = np.empty(frac.shape[:-1] + (8,), dtype=np.float64)
        for c in range(8):
            wr = dr if (c >> 2) & 1 else 1.0 - dr
            wg = dg if (c >> 1) & 1 else 1.0 - dg
            wb = db if c & 1 else 1.0 - db
            w[..., c] = wr * wg * wb
        return corners, w

    if method == "prism":
        # dg >= db: triangle (g,b) = (0,0),(1,0),(1,1); else (0,0),(0,1),(1,1)
        upper = dg >= db
        tri_a = np.where(upper, 1.0 - dg, 1.0 - db)
        tri_b = np.where(upper, dg - db, db - dg)
        tri_c = np.where(upper, db, dg)
        n_mid = np.where(upper, stride(0, 1, 0), stride(0, 0, 1))
        n_far = stride(0, 1, 1)
        step_r = stride(1, 0, 0)
        nodes = np.stack([base_flat, base_flat + n_mid, base_flat + n_far,
                          base_flat + step_r, base_flat + n_mid + step_r,
                          base_flat + n_far + step_r], axis=-1)
        w = np.stack([tri_a * (1.0 - dr), tri_b * (1.0 - dr), tri_c * (1.0 - dr),
                      tri_a * dr, tri_b * dr, tri_c * dr], axis=-1)
        return nodes, w

    if method == "pyramidal":
        # pyramid of the SMALLEST offset (strict conditions; ties fall through
        # to the later regions): bilinear on the near face of that axis, with
        # the smallest offset's mass moved from the face's far corner to the
        # cube's far corner:
        #   v = bilin(v0, vu, vv, vuv; du, dv) + dm (v111 - vuv)
        sel_r = (dg > dr) & (db > dr)
        sel_g = ~sel_r & (dr >= dg) & (db >= dg)
        d_m = np.select([sel_r, sel_g], [dr, dg], default=db)
        d_u = np.select([sel_r, sel_g], [dg, dr], default=dr)
        d_v = np.select([sel_r, sel_g], [db, db], default=dg)
        n_u = np.select([sel_r, sel_g], [stride(0, 1, 0), stride(1, 0, 0)],
                        default=stride(1, 0, 0))
        n_v = np.select([sel_r, sel_g], [stride(0, 0, 1), stride(0, 0, 1)],
                        default=stride(0, 1, 0))
        nodes = np.stack([base_flat, base_flat + n_u, base_flat + n_v,
                          base_flat + n_u + n_v,
                          base_flat + stride(1, 1, 1)], axis=-1)
        w = np.stack([(1.0 - d_u) * (1.0 - d_v), d_u * (1.0 - d_v),
                      d_v * (1.0 - d_u), d_u * d_v - d_m, d_m], axis=-1)
        return nodes, w

    if method == "tetrahedral":
        # sort order of (dr, dg, db); v = v0 + d1(vA - v0) + d2(vAB - vA) + d3(vABC - vAB)
        deltas = np.stack([dr, dg, db], axis=-1)
        order = np.argsort(-deltas, axis=-1, kind="stable")
        d_sorted = np.take_along_axis(deltas, order, axis=-1)
        axis_strides = np.array([stride(1, 0, 0), stride(0, 1, 0), stride(0, 0, 1)],
                                dtype=np.int64)
        first = axis_strides[order[..., 0]]
        second = first + axis_strides[order[..., 1]]
        nodes = np.stack([base_flat, base_flat + first, base_flat + second,
                          base_flat + stride(1, 1, 1)], axis=-1)
        w = np.stack([1.0 - d_sorted[..., 0],
                      d_sorted[..., 0] - d_sorted[..., 1],
                      d_sorted[..., 1] - d_sorted[..., 2],
                      d_sorted[..., 2]], axis=-1)
        return nodes, w

    raise ValueError(f"unknown interpolation method {method!r}")


def angular_lerp(theta0, theta1, alpha):
    """Circular interpolation between two angles, wrapped to [0, 2*pi).

    A vanishing blended direction (antipodal angles at alpha = 0.5) resolves
    to ``theta0``.
    """
    t0 = np.asarray(theta0, dtype=np.float64)
    t1 = np.asarray(theta1, dtype=np.float64)
    a = np.asarray(alpha, dtype=np.float64)
    c = (1.0 - a) * np.cos(t0) + a * np.cos(t1)
    s = (1.0 - a) * np.sin(t0) + a * np.sin(t1)
    out = np.arctan2(s, c)
    out = np.where(out < 0.0, out + TWO_PI, out)
    degenerate = np.hypot(c, s) < 1e-12
    return np.where(degenerate, np.mod(t0, TWO_PI), out)


def _circular_blend(angles: np.ndarray, weights: np.ndarray):
    """Weighted circular mean over the node axis; zero vectors fall back to
    the heaviest node's angle."""
    c = np.sum(weights * np.cos(angles), axis=-1)
    s = np.sum(weights * np.sin(angles), axis=-1)
    out = np.arctan2(s, c)
    out = np.where(out < 0.0, out + TWO_PI, out)
    heaviest = np.take_along_axis(
        angles, np.argmax(weights, axis=-1)[..., None], axis=-1)[..., 0]
    return np.where(np.hypot(c, s) < 1e-12, np.mod(heaviest, TWO_PI), out)


def _interpolate_standard(lut: Lut3D, pixels, method: str) -> np.ndarray:
    nodes, weights = node_weights(lut, pixels, method)
    flat = lut.flat_values
    out = np.zeros(weights.shape[:-1] + (3,), dtype=np.float64)
    for j in range(weights.shape[-1]):
        out += weights[..., j, None] * flat[nodes[..., j]]
    if any(lut.angular_mask):
        base, frac = _locate(lut, pixels)
        for comp, is_angle in enumerate(lut.angular_mask):
            if not is_angle:
                continue
            if method == "trilinear":
                out[..., comp] = _trilinear_angular(lut, base, frac, comp)
            else:
                out[..., comp] = _circular_blend(flat[nodes, comp], weights)
    return out


def _trilinear_angular(lut: Lut3D, base, frac, comp: int) -> np.ndarray:
    """Pairwise angular interpolation cascaded along r, then g, then b."""
    corners = _corner_flat_index(lut, base)
    vals = lut.flat_values[corners, comp]      # (..., 8), order r<<2|g<<1|b
    dr, dg, db = frac[..., 0], frac[..., 1], frac[..., 2]
    r0 = {}
    for g_bit in (0, 1):
        for b_bit in (0, 1):
            lo = vals[..., g_bit << 1 | b_bit]
            hi = vals[..., 1 << 2 | g_bit << 1 | b_bit]
            r0[(g_bit, b_bit)] = angular_lerp(lo, hi, dr)
    g0 = angular_lerp(r0[(0, 0)], r0[(1, 0)], dg)
    g1 = angular_lerp(r0[(0, 1)], r0[(1, 1)], dg)
    return angular_lerp(g0, g1, db)


def build_cache(lut: Lut3D) -> Lut3D:
    """Return a LUT carrying per-cell difference terms for every method.

    Each cached entry stores the base node plus neighbor differences, so the
    caching variant's linear components reduce to multiply-adds.
    """
    g = lut.grid_n
    v = lut.values
    # corner values per cell, indexed r<<2|g<<1|b
    corner = [v[ro:ro + g - 1, go:go + g - 1, bo:bo + g - 1]
              for ro, go, bo in _CORNER_OFFSETS]
    tri = np.stack([
        corner[0],
        corner[4] - corner[0],
        corner[2] - corner[0],
        corner[1] - corner[0],
        corner[6] - corner[4] - corner[2] + corner[0],
        corner[5] - corner[4] - corner[1] + corner[0],
        corner[3] - corner[2] - corner[1] + corner[0],
        corner[7] - corner[6] - corner[5] - corner[3]
        + corner[4] + corner[2] + corner[1] - corner[0],
    ], axis=-2)
    cache = {"trilinear": tri, "corner_diff": np.stack(
        [corner[c] - corner[0] for c in range(8)], axis=-2)}
    return Lut3D(grid_n=lut.grid_n, spacing=lut.spacing,
                 destination_space=lut.destination_space, values=lut.values,
                 angular_mask=lut.angular_mask, cache=cache)


def _interpolate_caching(lut: Lut3D, pixels, method: str) -> np.ndarray:
    if lut.cache is None:
        raise CacheMissing("caching interpolation requested without a cache; "
                           "call build_cache first")
    base, frac = _locate(lut, pixels)
    dr, dg, db = frac[..., 0], frac[..., 1], frac[..., 2]
    cell = (base[..., 0], base[..., 1], base[..., 2])
    if method == "trilinear":
        c = lut.cache["trilinear"][cell]      # (..., 8, 3)
        terms = np.stack([np.ones_like(dr), dr, dg, db,
                          dr * dg, dr * db, dg * db, dr * dg * db], axis=-1)
        out = np.sum(c * terms[..., None], axis=-2)
    else:
        # simplex methods: base corner plus weighted cached corner differences
        nodes, weights = node_weights(lut, pixels, method)
        diff = lut.cache["corner_diff"][cell]  # (..., 8, 3)
        g = lut.grid_n
        base_flat = (base[..., 0] * g + base[..., 1]) * g + base[..., 2]
        local = nodes - base_flat[..., None]   # corner ids within the cell
        corner_to_row = _corner_id_to_row(g)
        rows = corner_to_row[local]
        out = lut.flat_values[base_flat].astype(np.float64).copy()
        for j in range(weights.shape[-1]):
            out += weights[..., j, None] * np.take_along_axis(
                diff, rows[..., j][..., None, None], axis=-2)[..., 0, :]
    if any(lut.angular_mask):
        nodes, weights = node_weights(lut, pixels, method)
        flat = lut.flat_values
        for comp, is_angle in enumerate(lut.angular_mask):
            if not is_angle:
                continue
            if method == "trilinear":
                out[..., comp] = _trilinear_angular(lut, base, frac, comp)
            else:
                out[..., comp] = _circular_blend(flat[nodes, comp], weights)
    return out


def _corner_id_to_row(grid_n: int) -> np.ndarray:
    """Map within-cell flat offsets (r<<2|g<<1|b in lattice strides) to the
    corner row order used by the cache arrays."""
    table = np.full(2 * grid_n * grid_n + 2 * grid_n + 2, -1, dtype=np.int64)
    for row, (ro, go, bo) in enumerate(_CORNER_OFFSETS):
        table[(ro * grid_n + go) * grid_n + bo] = row
    return table


def interpolate(lut: Lut3D, pixels, method: str = "tetrahedral",
                variant: str = "standard") -> np.ndarray:
    """Interpolate destination triples for RGB coordinates in [0, 255]."""
    if method not in METHODS:
        raise ValueError(f"unknown interpolation method {method!r}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "caching":
        return _interpolate_caching(lut, pixels, method)
    return _interpolate_standard(lut, pixels, method)


def save_lut(lut: Lut3D, path) -> None:
    """Write the LUT lattice (never the cache) in the flat binary format."""
    mask_bits = sum(1 << i for i, m in enumerate(lut.angular_mask) if m)
    header = _MAGIC + struct.pack("<III", _VERSION, lut.grid_n,
                                  SPACES.index(lut.destination_space))
    header += struct.pack("<I", mask_bits)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(lut.values.astype("<f8").tobytes())


def load_lut(path) -> Lut3D:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 20 or blob[:4] != _MAGIC:
        raise MalformedHeader("not a LUT file (bad magic)")
    version, grid_n, space_idx, mask_bits = struct.unpack("<IIII", blob[4:20])
    if version != _VERSION:
        raise MalformedHeader(f"unsupported LUT version {version}")
    if space_idx >= len(SPACES) or grid_n not in (9, 17, 33):
        raise MalformedHeader("corrupt LUT header")
    expected = grid_n ** 3 * 3 * 8
    payload = blob[20:]
    if len(payload) != expected:
        raise MalformedHeader(
            f"LUT payload size {len(payload)} != expected {expected}")
    values = np.frombuffer(payload, dtype="<f8").reshape(grid_n, grid_n, grid_n, 3)
    mask = tuple(bool(mask_bits >> i & 1) for i in range(3))
    return Lut3D(grid_n=grid_n, spacing=255.0 / (grid_n - 1),
                 destination_space=SPACES[space_idx],
                 values=values.astype(np.float64), angular_mask=mask)
