"""Remez exchange algorithm for minimax polynomial and rational approximation.

The solver works internally in the Chebyshev basis on the interval remapped to
[-1, 1] (well-conditioned for the supported degrees) and expands the result
back to power-series coefficients in the original variable, so outputs compare
directly with the bundled coefficient sets.

Rational fits use the classical second Remez algorithm: the levelled-error
reference system is nonlinear because the error term multiplies the
denominator, so it is solved by fixed-point iteration of the linearized form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from numpy.polynomial import polynomial as _npoly

from .approximants import Approximant, Polynomial, Rational, TargetT, target_values
from .errors import DegenerateDenominator, IllConditioned, NotConverged

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SCAN_SAMPLES = 8192  # dense-scan resolution for extremum location
_ABSCISSA_TOL = 1e-12


@dataclass(frozen=True)
class RemezProblem:
    """One minimax fit: target function, interval, and degrees (m=0: polynomial)."""

    target: TargetT
    interval: Tuple[float, float]
    num_degree: int
    den_degree: int = 0
    max_iterations: int = 100
    convergence_tol: float = 1e-10

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise ValueError(f"interval must satisfy lo < hi, got {self.interval}")
        if self.num_degree < 0 or self.den_degree < 0:
            raise ValueError("degrees must be non-negative")
        if self.num_degree + self.den_degree > 12:
            raise ValueError("combined degree above the supported range (12)")


@dataclass(frozen=True)
class RemezResult:
    approximant: Approximant
    eps: float
    reference_set: Tuple[float, ...]
    iterations: int
    converged: bool


def initial_reference(interval: Tuple[float, float], count: int) -> List[float]:
    """Chebyshev extremum nodes mapped onto the interval, ascending, endpoints in."""
    if count < 2:
        raise ValueError("need at least two reference points")
    lo, hi = interval
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    ks = np.arange(count)
    s = -np.cos(np.pi * ks / (count - 1))
    s[0], s[-1] = -1.0, 1.0
    return list(mid + half * s)


def _golden_max(g: Callable[[float], float], lo: float, hi: float) -> float:
    """Golden-section maximization of g on [lo, hi] to abscissa tolerance."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    while (b - a) > _ABSCISSA_TOL:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
    return 0.5 * (a + b)


def _scan_grid(lo: float, hi: float, samples: int) -> np.ndarray:
    """Uniform plus cosine-spaced abscissae (dense at the ends, where
    equioscillation extrema cluster for hard targets such as cube root)."""
    uniform = np.linspace(lo, hi, samples)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    cosine = mid - half * np.cos(np.pi * np.arange(samples) / (samples - 1))
    grid = np.unique(np.concatenate([uniform, cosine]))
    grid[0], grid[-1] = lo, hi
    return grid


def _scan_extrema(err: Callable, lo: float, hi: float,
                  samples: int = _SCAN_SAMPLES) -> List[Tuple[float, float]]:
    """Locate all local extrema of ``err`` by dense scan + golden refinement."""
    xs = _scan_grid(lo, hi, samples)
    es = np.asarray(err(xs), dtype=np.float64)
    out: List[Tuple[float, float]] = []

    def refine(il: int, ir: int, sign: float) -> Tuple[float, float]:
        x = _golden_max(lambda t: sign * float(err(t)), xs[il], xs[ir])
        return x, float(err(x))

    # endpoints are extrema of the restricted interval
    out.append((lo, float(es[0])))
    interior: List[Tuple[float, float]] = []
    d = np.diff(es)
    for i in range(1, len(xs) - 1):
        if (d[i - 1] >= 0.0 and d[i] < 0.0) or (d[i - 1] > 0.0 and d[i] <= 0.0):
            interior.append(refine(i - 1, i + 1, 1.0))
        elif (d[i - 1] <= 0.0 and d[i] > 0.0) or (d[i - 1] < 0.0 and d[i] >= 0.0):
            interior.append(refine(i - 1, i + 1, -1.0))
    out.extend(interior)
    out.append((hi, float(es[-1])))
    out.sort(key=lambda t: t[0])
    # drop duplicates from refinement landing on an endpoint
    dedup: List[Tuple[float, float]] = []
    for x, e in out:
        if dedup and abs(x - dedup[-1][0]) < 10 * _ABSCISSA_TOL:
            if abs(e) > abs(dedup[-1][1]):
                dedup[-1] = (x, e)
        else:
            dedup.append((x, e))
    return dedup


def find_error_extrema(target: TargetT, approximant, interval: Tuple[float, float],
                       samples: int = _SCAN_SAMPLES) -> List[Tuple[float, float]]:
    """All local extrema of target(x) - approximant(x), ascending in x."""
    fn = approximant if callable(approximant) else approximant.form

    def err(x):
        return target_values(target, x) - fn(x)

    return _scan_extrema(err, interval[0], interval[1], samples)


def _alternating_subset(extrema: Sequence[Tuple[float, float]],
                        count: int) -> List[Tuple[float, float]]:
    """Reduce an extremum list to ``count`` sign-alternating points.

    Same-sign runs collapse to their largest member; if more alternating
    points remain than needed, the consecutive window with the largest
    minimum magnitude is kept.
    """
    merged: List[Tuple[float, float]] = []
    for x, e in extrema:
        if merged and (e >= 0.0) == (merged[-1][1] >= 0.0):
            if abs(e) > abs(merged[-1][1]):
                merged[-1] = (x, e)
        else:
            merged.append((x, e))
    if len(merged) < count:
        return []
    best_k, best_min = 0, -1.0
    for k in range(len(merged) - count + 1):
        w_min = min(abs(e) for _, e in merged[k:k + count])
        if w_min > best_min:
            best_k, best_min = k, w_min
    return merged[best_k:best_k + count]


def _to_power_poly(cheb_coef: np.ndarray, interval: Tuple[float, float]) -> Polynomial:
    """Chebyshev-on-interval coefficients -> power coefficients in the original x."""
    series = _cheb.Chebyshev(cheb_coef, domain=list(interval))
    power = series.convert(kind=_npoly.Polynomial)
    return Polynomial(tuple(float(c) for c in power.coef))


def _noise_floor(fvals: np.ndarray) -> float:
    return 1e-14 * max(1.0, float(np.max(np.abs(fvals))))


# Relative equioscillation spread accepted when the iteration has otherwise
# stalled: extremum magnitudes cannot agree beyond the rounding noise of the
# error evaluations, which for the supported targets sits well below 1e-6.
_STALL_SPREAD = 1e-6


def _equioscillated(spread: float, eps: float, eps_prev: float, tol: float) -> bool:
    """Converged when the reference equioscillates to within ``10*tol``, or the
    max error has stalled while the reference alternates at the noise floor."""
    if spread <= 10.0 * tol:
        return True
    return (math.isfinite(eps_prev)
            and abs(eps - eps_prev) <= 1e-10 * eps
            and spread <= _STALL_SPREAD)


def remez_poly(problem: RemezProblem) -> RemezResult:
    """Minimax polynomial of degree n via the Remez exchange algorithm."""
    if problem.den_degree != 0:
        raise ValueError("remez_poly requires den_degree == 0")
    n = problem.num_degree
    lo, hi = problem.interval
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    n_ref = n + 2

    def to_s(x):
        return (np.asarray(x, dtype=np.float64) - mid) / half

    ref = np.asarray(initial_reference(problem.interval, n_ref))
    coef = None
    converged = False
    iterations = 0
    eps = math.inf
    eps_prev = math.inf
    for iterations in range(1, problem.max_iterations + 1):
        fvals = np.asarray(target_values(problem.target, ref), dtype=np.float64)
        design = _cheb.chebvander(to_s(ref), n)
        sigma = np.where(np.arange(n_ref) % 2 == 0, 1.0, -1.0)
        system = np.hstack([design, sigma[:, None]])
        try:
            sol = np.linalg.solve(system, fvals)
        except np.linalg.LinAlgError as exc:
            raise IllConditioned(str(exc)) from None
        if not np.all(np.isfinite(sol)):
            raise IllConditioned("non-finite coefficient solution")
        coef = sol[:n + 1]

        def err(x, c=coef):
            s = to_s(x)
            return (np.asarray(target_values(problem.target, x), dtype=np.float64)
                    - _cheb.chebval(s, c))

        extrema = _scan_extrema(err, lo, hi)
        eps = max(abs(e) for _, e in extrema)
        if eps <= _noise_floor(fvals):
            converged = True
            ref = np.asarray([x for x, _ in extrema][:n_ref])
            break
        new_ref = _alternating_subset(extrema, n_ref)
        if not new_ref:
            eps_prev = eps
            continue
        mags = [abs(e) for _, e in new_ref]
        spread = max(mags) / min(mags) - 1.0 if min(mags) > 0 else math.inf
        ref = np.asarray([x for x, _ in new_ref])
        if _equioscillated(spread, eps, eps_prev, problem.convergence_tol):
            converged = True
            break
        eps_prev = eps
    if not converged:
        raise NotConverged(
            f"polynomial Remez did not converge in {problem.max_iterations} iterations")
    poly = _to_power_poly(coef, problem.interval)
    approx = Approximant(poly, problem.interval, float(eps), problem.target)
    return RemezResult(approx, float(eps), tuple(float(x) for x in ref),
                       iterations, converged)


def _solve_rational_reference(fvals, s_ref, n, m, sigma, tol):
    """Fixed-point solve of the levelled rational reference system.

    Returns (p_coef, q_coef, E) in the Chebyshev basis, q normalized to unit
    constant term.
    """
    n_ref = len(s_ref)
    vp = _cheb.chebvander(s_ref, n)
    vq = _cheb.chebvander(s_ref, m)
    qv = np.ones(n_ref)
    e_level = 0.0
    p_coef = q_coef = None
    for _ in range(60):
        cols = [vp]
        if m > 0:
            cols.append(-fvals[:, None] * vq[:, 1:])
        cols.append((sigma * qv)[:, None])
        system = np.hstack(cols)
        try:
            sol = np.linalg.solve(system, fvals)
        except np.linalg.LinAlgError as exc:
            raise IllConditioned(str(exc)) from None
        if not np.all(np.isfinite(sol)):
            raise IllConditioned("non-finite rational solution")
        p_coef = sol[:n + 1]
        q_coef = np.concatenate([[1.0], sol[n + 1:n + 1 + m]])
        e_new = sol[-1]
        qv_new = vq @ q_coef
        if np.any(qv_new <= 0.0):
            raise DegenerateDenominator("denominator lost positivity on reference")
        qv = qv_new
        if abs(e_new - e_level) <= max(1e-16, tol * abs(e_new)):
            e_level = e_new
            break
        e_level = e_new
    return p_coef, q_coef, e_level


def remez_rational(problem: RemezProblem) -> RemezResult:
    """Minimax rational (degrees n/m) via the second Remez exchange algorithm."""
    if problem.den_degree <= 0:
        raise ValueError("remez_rational requires den_degree > 0")
    n, m = problem.num_degree, problem.den_degree
    lo, hi = problem.interval
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    n_ref = n + m + 2

    def to_s(x):
        return (np.asarray(x, dtype=np.float64) - mid) / half

    sigma0 = np.where(np.arange(n_ref) % 2 == 0, 1.0, -1.0)
    s_check = np.linspace(-1.0, 1.0, 2048)

    def attempt(ref0: np.ndarray) -> RemezResult:
        ref = ref0.copy()
        converged = False
        iterations = 0
        eps = math.inf
        eps_prev = math.inf
        p_coef = q_coef = None
        for iterations in range(1, problem.max_iterations + 1):
            fvals = np.asarray(target_values(problem.target, ref), dtype=np.float64)
            p_coef, q_coef, _ = _solve_rational_reference(
                fvals, to_s(ref), n, m, sigma0, problem.convergence_tol)
            if np.any(_cheb.chebval(s_check, q_coef) <= 0.0):
                raise DegenerateDenominator("denominator developed a root in-interval")

            def err(x, p=p_coef, q=q_coef):
                s = to_s(x)
                return (np.asarray(target_values(problem.target, x), dtype=np.float64)
                        - _cheb.chebval(s, p) / _cheb.chebval(s, q))

            extrema = _scan_extrema(err, lo, hi)
            eps = max(abs(e) for _, e in extrema)
            if eps <= _noise_floor(fvals):
                converged = True
                ref = np.asarray([x for x, _ in extrema][:n_ref])
                break
            new_ref = _alternating_subset(extrema, n_ref)
            if not new_ref:
                eps_prev = eps
                continue
            mags = [abs(e) for _, e in new_ref]
            spread = max(mags) / min(mags) - 1.0 if min(mags) > 0 else math.inf
            ref = np.asarray([x for x, _ in new_ref])
            if _equioscillated(spread, eps, eps_prev, problem.convergence_tol):
                converged = True
                break
            eps_prev = eps
        if not converged:
            raise NotConverged(
                f"rational Remez did not converge in {problem.max_iterations} iterations")
        num = _to_power_poly(p_coef, problem.interval)
        den = _to_power_poly(q_coef, problem.interval)
        form = Rational(num, den)
        approx = Approximant(form, problem.interval, float(eps), problem.target)
        return RemezResult(approx, float(eps), tuple(float(x) for x in ref),
                           iterations, converged)

    ref0 = np.asarray(initial_reference(problem.interval, n_ref))
    try:
        return attempt(ref0)
    except DegenerateDenominator:
        # restart once from a slightly contracted reference before giving up
        shrunk = mid + 0.95 * (ref0 - mid)
        shrunk[0], shrunk[-1] = ref0[0], ref0[-1]
        return attempt(shrunk)
