"""Full-cube and corpus evaluation: error statistics, call probabilities, speedups.

The 24-bit cube (16,777,216 colors) is processed in fixed contiguous chunks;
per-chunk pairwise sums are combined with exact compensated summation in
chunk order, so repeated runs are bit-identical and shuffling a population
only perturbs the mean at the rounding level.  Set ``MACT_THREADS`` to
data-parallelize full-cube sweeps over chunks (the deterministic chunk-order
reduction is preserved).
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import exact
from .errors import CorpusEmpty

CUBE_SIZE = 1 << 24
_CHUNK = 1 << 20

DISTANCES = {
    "lab": exact.lab_distance,
    "hsi": exact.hsi_distance,
    "sct": exact.sct_distance_indirect,
}


def cube_chunk(start: int, size: int) -> np.ndarray:
    """Pixels ``start .. start+size`` of the full cube enumeration.

    Enumeration order: blue fastest, red slowest; index 0 is black, index
    2^24 - 1 is white.
    """
    idx = np.arange(start, min(start + size, CUBE_SIZE), dtype=np.uint32)
    out = np.empty((idx.size, 3), dtype=np.uint8)
    out[:, 0] = idx >> 16
    out[:, 1] = (idx >> 8) & 0xFF
    out[:, 2] = idx & 0xFF
    return out


def rgb16million(chunk_size: int = _CHUNK):
    """Stream every 24-bit RGB color exactly once, in fixed chunks."""
    for start in range(0, CUBE_SIZE, chunk_size):
        yield cube_chunk(start, chunk_size)


def _n_threads() -> int:
    try:
        n = int(os.environ.get("MACT_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, min(n, 64))


@dataclass(frozen=True)
class ErrorStats:
    avg: float
    max: float
    count: int
    argmax_pixel: Tuple[int, int, int]


def _score_chunk(pixels, candidate, reference, distance):
    d = distance(candidate(pixels), reference(pixels))
    j = int(np.argmax(d))
    return float(np.sum(d)), float(d[j]), tuple(int(v) for v in np.asarray(pixels)[j]), d.shape[0]


def measure_error(space: str, candidate: Callable, reference: Callable,
                  population=None, chunk_size: int = _CHUNK) -> ErrorStats:
    """Average/maximum distance between two transforms over a pixel population.

    ``population`` is the full cube when None, else an ``(N, 3)`` array or an
    iterable of such chunks.  The space's own distance function scores each
    pixel.
    """
    distance = DISTANCES[space]
    sums: List[float] = []
    worst = -1.0
    worst_pixel = (0, 0, 0)
    count = 0

    if population is None:
        starts = list(range(0, CUBE_SIZE, chunk_size))
        threads = _n_threads()

        def job(start):
            return _score_chunk(cube_chunk(start, chunk_size), candidate,
                                reference, distance)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(job, starts))
        else:
            results = [job(s) for s in starts]
        for s, mx, px, n in results:
            sums.append(s)
            count += n
            if mx > worst:
                worst, worst_pixel = mx, px
    else:
        if isinstance(population, np.ndarray):
            population = [population]
        for pixels in population:
            s, mx, px, n = _score_chunk(pixels, candidate, reference, distance)
            sums.append(s)
            count += n
            if mx > worst:
                worst, worst_pixel = mx, px

    if count == 0:
        raise ValueError("empty population")
    return ErrorStats(avg=math.fsum(sums) / count, max=worst, count=count,
                      argmax_pixel=worst_pixel)


@dataclass(frozen=True)
class CallProbabilities:
    """Relative full-cube frequencies of the approximated-function call sites."""

    cbrt_x: float      # X/X0 above the lightness-kernel knee
    cbrt_y: float      # Y/Y0 above the knee
    cbrt_z: float      # Z/Z0 above the knee
    arcsin: float      # b/L >= 0.5 (folded arccos branch)
    arccos: float      # complement of arcsin
    arctan: float      # second spherical angle defined (not r = g = 0)


def call_probabilities() -> CallProbabilities:
    """Exact call-site frequencies over all 16,777,216 colors."""
    gamma = exact.inverse_gamma(np.arange(256) / 255.0)
    m = exact.RGB_TO_XYZ_MATRIX
    whites = (exact.WHITE_X, exact.WHITE_Y, exact.WHITE_Z)
    counts = []
    for row in range(3):
        tr = m[row, 0] * gamma
        tg = m[row, 1] * gamma
        tb = m[row, 2] * gamma
        thr = exact.LAB_KNEE * whites[row]
        total = 0
        plane = tg[:, None] + tb[None, :]
        for r in range(256):
            total += int(np.count_nonzero(tr[r] + plane > thr))
        counts.append(total)

    # b/L >= 0.5  <=>  3 b^2 >= r^2 + g^2, exact in integers
    arcsin_count = 0
    for b in range(256):
        limit = 3 * b * b
        r = np.arange(256)
        rem = limit - r * r
        valid = rem >= 0
        gmax = np.floor(np.sqrt(rem[valid].astype(np.float64))).astype(np.int64)
        # guard float sqrt at exact squares
        gmax = np.where((gmax + 1) * (gmax + 1) <= rem[valid], gmax + 1, gmax)
        gmax = np.where(gmax * gmax > rem[valid], gmax - 1, gmax)
        arcsin_count += int(np.sum(np.minimum(gmax, 255) + 1))

    p_arcsin = arcsin_count / CUBE_SIZE
    return CallProbabilities(
        cbrt_x=counts[0] / CUBE_SIZE,
        cbrt_y=counts[1] / CUBE_SIZE,
        cbrt_z=counts[2] / CUBE_SIZE,
        arcsin=p_arcsin,
        arccos=1.0 - p_arcsin,
        arctan=(CUBE_SIZE - 256) / CUBE_SIZE,
    )


@dataclass(frozen=True)
class GainStats:
    min: float
    max: float
    mean: float
    stdev: float
    median: float
    per_image: Tuple[float, ...]


def _mean_seconds(fn: Callable, image: np.ndarray, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(image)
        times.append(time.perf_counter() - t0)
    return sum(times) / len(times)


def measure_gain(space: str, fast: Callable, exact_fn: Callable,
                 corpus: Sequence[np.ndarray], repeats_exact: int = 3,
                 repeats_fast: int = 3) -> GainStats:
    """Per-image wall-clock speedup of ``fast`` over ``exact_fn``.

    Inputs are pre-loaded arrays; a warm-up pass runs both transforms before
    timing so allocator and cache effects do not land on the first sample.
    """
    if len(corpus) == 0:
        raise CorpusEmpty("gain measurement needs at least one image")
    if repeats_exact < 3 or repeats_fast < 3:
        raise ValueError("timing needs at least 3 repeats per transform")
    gains = []
    for image in corpus:
        fast(image)
        exact_fn(image)
        t_exact = _mean_seconds(exact_fn, image, repeats_exact)
        t_fast = _mean_seconds(fast, image, repeats_fast)
        gains.append(t_exact / t_fast)
    arr = np.asarray(gains)
    return GainStats(min=float(arr.min()), max=float(arr.max()),
                     mean=float(arr.mean()),
                     stdev=float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
                     median=float(np.median(arr)),
                     per_image=tuple(float(v) for v in arr))


def synthetic_corpus(sizes: Sequence[int] = (512, 1024, 2048),
                     seed: int = 0) -> List[np.ndarray]:
    """Deterministic benchmark images: gradients, white noise, 1/f noise, flats.

    One image of each kind per requested square size, uint8 RGB.
    """
    rng = np.random.default_rng(seed)
    images = []
    for n in sizes:
        yy, xx = np.mgrid[0:n, 0:n]
        grad = np.stack([(255.0 * xx / (n - 1)),
                         (255.0 * yy / (n - 1)),
                         (255.0 * (xx + yy) / (2 * n - 2))], axis=-1)
        images.append(grad.astype(np.uint8))
        images.append(rng.integers(0, 256, size=(n, n, 3), dtype=np.uint8))
        images.append(_pink_noise(rng, n))
        flat = np.empty((n, n, 3), dtype=np.uint8)
        flat[..., 0], flat[..., 1], flat[..., 2] = 180, 120, 60
        images.append(flat)
    return images


def _pink_noise(rng, n: int) -> np.ndarray:
    fy = np.fft.fftfreq(n)[:, None]
    fx = np.fft.rfftfreq(n)[None, :]
    radial = np.sqrt(fy * fy + fx * fx)
    radial[0, 0] = 1.0
    out = np.empty((n, n, 3))
    for c in range(3):
        spectrum = np.fft.rfft2(rng.standard_normal((n, n))) / radial
        img = np.fft.irfft2(spectrum, s=(n, n))
        lo, hi = img.min(), img.max()
        out[..., c] = 255.0 * (img - lo) / (hi - lo)
    return out.astype(np.uint8)
