"""Sugeno integrals: crossing-point bisection, monotone fixed-point
shortcuts, and an exhaustive level-grid oracle.

The integral of a nonnegative f over A is sup over levels of
min(level, mu(A intersect {f >= level})).  The map h(level) = mu(...) is
nonincreasing, so the supremum sits at the crossing of h with the diagonal
and bisection on the sign of h(level) - level brackets it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .errors import EvalDomainError, PreconditionError
from .exprdsl import MonotonicityClass, PiecewiseFn, classify_monotonicity
from .measures import (ClippedPiece, FuzzyMeasure, IntervalUnion, clip_pieces,
                       level_length, inf_on)

__all__ = ["SugenoResult", "sugeno_integral", "sugeno_oracle",
           "fixed_point_increasing", "fixed_point_decreasing"]

DEFAULT_TOL = 1e-9
DEFAULT_ORACLE_N = 100_000
_ROOT_TOL = 1e-12


@dataclass(frozen=True)
class SugenoResult:
    value: float
    alpha_star: float
    method: str  # 'crossing' | 'fixed-point' | 'oracle'
    tol: float

    def to_dict(self) -> dict:
        return {"value": self.value, "alpha_star": self.alpha_star,
                "method": self.method, "tol": self.tol}


def _require_nonnegative(f: PiecewiseFn, base: IntervalUnion):
    lo = inf_on(f, base)
    if lo < -1e-12:
        raise EvalDomainError(
            f"integrand is negative on the base set (min {lo!r})")
    xs = []
    for a, b in base.intervals:
        xs.append(np.linspace(a, b, 65))
    if xs:
        sampled = float(np.min(f.eval_many(np.concatenate(xs))))
        if sampled < -1e-12:
            raise EvalDomainError(
                f"integrand is negative on the base set (sampled {sampled!r})")


def sugeno_integral(f: PiecewiseFn, A: Optional[IntervalUnion] = None,
                    mu: Optional[FuzzyMeasure] = None,
                    tol: float = DEFAULT_TOL) -> SugenoResult:
    """Sugeno integral of f over A by bisection on h(alpha) - alpha.

    Returns the max of min(alpha, h(alpha)) over the final bracket
    endpoints, which stays conservative across jumps of h (plateaus of f).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    mu = mu or FuzzyMeasure.lebesgue()
    A = A if A is not None else IntervalUnion.whole(f.domain)
    if A.is_empty:
        return SugenoResult(0.0, 0.0, "crossing", tol)
    _require_nonnegative(f, A)
    clipped = clip_pieces(f, A)
    sup_f = max(max(cp.v_lo, cp.v_hi) for cp in clipped)
    mu_A = mu.apply_length(math.fsum(hi - lo for lo, hi in A.intervals))

    def h(alpha: float) -> float:
        return mu.apply_length(level_length(clipped, alpha, _ROOT_TOL))

    hi = min(sup_f, mu_A)
    if hi <= 0.0:
        return SugenoResult(0.0, 0.0, "crossing", tol)
    if h(hi) >= hi:
        return SugenoResult(hi, hi, "crossing", tol)
    lo = 0.0
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if h(mid) - mid >= 0.0:
            lo = mid
        else:
            hi = mid
    h_hi = h(hi)
    if h_hi > lo:
        value, alpha_star = h_hi, hi
    else:
        value, alpha_star = lo, lo
    value = min(value, min(sup_f, mu_A))
    return SugenoResult(value, alpha_star, "crossing", tol)


def _piece_lengths_vector(cp: ClippedPiece, alphas: np.ndarray,
                          tol: float) -> np.ndarray:
    """Length of {f >= alpha} inside one clipped piece, for every alpha."""
    K = backend.kernels
    p = cp.piece
    width = cp.hi - cp.lo
    out = np.zeros(alphas.shape)
    if p.kind == "const":
        out[alphas <= cp.v_lo] = width
        return out
    if p.kind == "inc":
        out[alphas <= cp.v_lo] = width
        mid = (alphas > cp.v_lo) & (alphas <= cp.v_hi)
        if np.any(mid):
            roots = K.bisect_root_sorted(p.program, cp.lo, cp.hi, cp.v_lo,
                                         cp.v_hi, alphas[mid], tol)
            out[mid] = cp.hi - roots
        return out
    out[alphas <= cp.v_hi] = width
    mid = (alphas > cp.v_hi) & (alphas <= cp.v_lo)
    if np.any(mid):
        roots = K.bisect_root_sorted(p.program, cp.lo, cp.hi, cp.v_lo,
                                     cp.v_hi, alphas[mid], tol)
        out[mid] = roots - cp.lo
    return out


def sugeno_oracle(f: PiecewiseFn, A: Optional[IntervalUnion] = None,
                  mu: Optional[FuzzyMeasure] = None,
                  n: int = DEFAULT_ORACLE_N) -> SugenoResult:
    """Exhaustive maximisation of min(alpha, h(alpha)) over an alpha grid.

    The grid is uniform on [0, sup f] plus every value f attains at a piece
    endpoint, so plateau levels are probed exactly.  The result is a lower
    bound on the integral, within sup f / n of it.
    """
    if n < 100:
        raise ValueError("oracle needs at least 100 grid points")
    mu = mu or FuzzyMeasure.lebesgue()
    A = A if A is not None else IntervalUnion.whole(f.domain)
    if A.is_empty:
        return SugenoResult(0.0, 0.0, "oracle", 0.0)
    _require_nonnegative(f, A)
    clipped = clip_pieces(f, A)
    sup_f = max(max(cp.v_lo, cp.v_hi) for cp in clipped)
    attained = [cp.v_lo for cp in clipped] + [cp.v_hi for cp in clipped]
    alphas = np.union1d(np.linspace(0.0, sup_f, n),
                        np.clip(np.array(attained), 0.0, sup_f))
    lengths = np.zeros(alphas.shape)
    for cp in clipped:
        lengths += _piece_lengths_vector(cp, alphas, 1e-9)
    hs = mu.apply_lengths(lengths)
    scores = np.minimum(alphas, hs)
    i = int(np.argmax(scores))
    return SugenoResult(float(scores[i]), float(alphas[i]), "oracle",
                        sup_f / n if n else 0.0)


# ---------------------------------------------------------------------------
# Fixed-point shortcuts for strictly monotone integrands under Lebesgue
# measure on [0, a]: increasing f crosses at f(a - p) = p, decreasing f at
# f(p) = p, and either p equals the integral whenever 0 < p < a.

def _check_monotone(f: PiecewiseFn, want: MonotonicityClass, a: float):
    if abs(f.a) > 1e-12 or abs(f.b - a) > 1e-12:
        raise PreconditionError(
            f"fixed-point solver needs domain [0, {a!r}], got [{f.a!r}, {f.b!r}]")
    got = classify_monotonicity(f)
    if got is not want:
        raise PreconditionError(
            f"integrand must be {want.value}, classified {got.value}")
    if inf_on(f, None) < -1e-12:
        raise EvalDomainError("integrand must be nonnegative")


def _residual_bisect(phi, lo: float, hi: float, tol: float) -> float:
    # phi is strictly decreasing with phi(lo) >= 0 > phi(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = phi(mid)
        if abs(r) <= tol or hi - lo <= 1e-16 * max(1.0, hi):
            return mid
        if r > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fixed_point_increasing(f: PiecewiseFn, a: Optional[float] = None,
                           tol: float = DEFAULT_TOL) -> float:
    """Solve f(a - p) = p for strictly increasing continuous f on [0, a]."""
    a = f.b if a is None else float(a)
    _check_monotone(f, MonotonicityClass.STRICTLY_INCREASING, a)

    def phi(p: float) -> float:
        return f.eval(a - p) - p

    if phi(a) >= 0.0:
        return a
    return _residual_bisect(phi, 0.0, a, tol)


def fixed_point_decreasing(f: PiecewiseFn, a: Optional[float] = None,
                           tol: float = DEFAULT_TOL) -> float:
    """Solve f(p) = p for strictly decreasing continuous f on [0, a]."""
    a = f.b if a is None else float(a)
    _check_monotone(f, MonotonicityClass.STRICTLY_DECREASING, a)

    def phi(p: float) -> float:
        return f.eval(p) - p

    if phi(a) >= 0.0:
        return a
    return _residual_bisect(phi, 0.0, a, tol)
