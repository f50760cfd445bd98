"""Interval unions, monotone set functions on them, and level sets.

Every level set of a piecewise-monotone function restricted to a finite
union of intervals is again a finite union of closed intervals, so that is
the only set representation needed.  Both implemented measures (Lebesgue
and distortions of Lebesgue) vanish on points, which is why closed
intervals can be used throughout without affecting any measure value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from . import backend
from .errors import EvalDomainError, MeasureError
from .exprdsl import (Expr, Piece, PiecewiseFn, compile_expr, format_expr,
                      parse_expr)

__all__ = [
    "IntervalUnion", "FuzzyMeasure", "SupMeasureDensity",
    "level_set", "measure", "ess_sup",
]

TOL_ROOT = 1e-12


# ---------------------------------------------------------------------------
# Interval unions

@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise-disjoint closed intervals; touching intervals merge."""

    intervals: tuple[tuple[float, float], ...]

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[float, float]]) -> "IntervalUnion":
        items = sorted((float(lo), float(hi)) for lo, hi in pairs if hi >= lo)
        merged: list[list[float]] = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return IntervalUnion(tuple((lo, hi) for lo, hi in merged))

    @staticmethod
    def empty() -> "IntervalUnion":
        return IntervalUnion(())

    @staticmethod
    def whole(domain: tuple[float, float]) -> "IntervalUnion":
        return IntervalUnion(((float(domain[0]), float(domain[1])),))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def total_length(self) -> float:
        return math.fsum(hi - lo for lo, hi in self.intervals)

    def contains_point(self, x: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= x <= hi + tol for lo, hi in self.intervals)

    def contains_union(self, other: "IntervalUnion", tol: float = 0.0) -> bool:
        """True iff every interval of ``other`` sits inside one of ours."""
        i = 0
        for lo, hi in other.intervals:
            while i < len(self.intervals) and self.intervals[i][1] < lo - tol:
                i += 1
            if i == len(self.intervals):
                return False
            slo, shi = self.intervals[i]
            if not (slo - tol <= lo and hi <= shi + tol):
                return False
        return True

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if hi >= lo:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion(tuple(out))

    def to_list(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.intervals]


# ---------------------------------------------------------------------------
# Fuzzy measures on interval unions

_DISTORTION_PROBES = 257


class FuzzyMeasure:
    """Lebesgue measure or a distortion T(length) of it.

    A distortion must satisfy T(0) = 0 and be nondecreasing and nonnegative
    on [0, span]; this is probed at construction and violations raise
    :class:`MeasureError`.
    """

    __slots__ = ("kind", "t_expr", "_t_program", "span")

    def __init__(self, kind: str, t_expr: Optional[Expr] = None, span: float = 1.0):
        self.kind = kind
        self.t_expr = t_expr
        self.span = float(span)
        self._t_program = None
        if kind == "lebesgue":
            return
        if kind != "distorted":
            raise MeasureError(f"unknown measure kind {kind!r}")
        if t_expr is None:
            raise MeasureError("distorted measure needs a distortion expression")
        self._t_program = compile_expr(t_expr)
        self._validate_distortion()

    @classmethod
    def lebesgue(cls) -> "FuzzyMeasure":
        return cls("lebesgue")

    @classmethod
    def distorted(cls, t: Union[Expr, str], span: float = 1.0) -> "FuzzyMeasure":
        expr = parse_expr(t, var="t") if isinstance(t, str) else t
        return cls("distorted", expr, span)

    @classmethod
    def from_config(cls, obj, span: float = 1.0) -> "FuzzyMeasure":
        if obj is None:
            return cls.lebesgue()
        if isinstance(obj, FuzzyMeasure):
            return obj
        kind = obj.get("type", "lebesgue")
        if kind == "lebesgue":
            return cls.lebesgue()
        if kind == "distorted":
            return cls.distorted(obj["T"], span=obj.get("span", span))
        raise MeasureError(f"unknown measure type {kind!r}")

    def _validate_distortion(self):
        ts = np.linspace(0.0, self.span, _DISTORTION_PROBES)
        vals = backend.kernels.eval_many(self._t_program, ts)
        if not np.all(np.isfinite(vals)):
            raise MeasureError("distortion does not evaluate finitely on [0, span]")
        if abs(float(vals[0])) > 1e-12:
            raise MeasureError(f"distortion violates T(0)=0 (got {vals[0]!r})")
        if float(np.min(vals)) < -1e-12:
            raise MeasureError("distortion takes negative values")
        if float(np.min(np.diff(vals))) < -1e-12:
            raise MeasureError("distortion is decreasing on probe points")

    def apply_length(self, length: float) -> float:
        if self.kind == "lebesgue":
            return length
        v = backend.kernels.eval_scalar(self._t_program, float(length))
        if not math.isfinite(v):
            raise MeasureError(f"distortion not finite at length {length!r}")
        if v < 0.0:
            if v < -1e-12:
                raise MeasureError(f"distortion negative at length {length!r}")
            v = 0.0
        return v

    def apply_lengths(self, lengths: np.ndarray) -> np.ndarray:
        if self.kind == "lebesgue":
            return lengths
        vals = backend.kernels.eval_many(self._t_program, lengths)
        return np.maximum(vals, 0.0)

    def measure(self, union: IntervalUnion) -> float:
        return self.apply_length(union.total_length)

    def describe(self) -> dict:
        if self.kind == "lebesgue":
            return {"type": "lebesgue"}
        return {"type": "distorted", "T": format_expr(self.t_expr, var="t"),
                "span": self.span}

    def __repr__(self):
        return f"FuzzyMeasure({self.describe()})"


def measure(mu: FuzzyMeasure, union: IntervalUnion) -> float:
    return mu.measure(union)


# ---------------------------------------------------------------------------
# Level sets

@dataclass(frozen=True)
class ClippedPiece:
    """A monotone piece restricted to one component of the base set."""
    piece: Piece
    lo: float
    hi: float
    v_lo: float
    v_hi: float


def clip_pieces(f: PiecewiseFn, base: Optional[IntervalUnion]) -> list[ClippedPiece]:
    K = backend.kernels
    if base is None:
        base = IntervalUnion.whole(f.domain)
    out = []
    for p in f.monotone_pieces():
        for lo, hi in base.intervals:
            c = max(p.lo, lo)
            d = min(p.hi, hi)
            if d < c:
                continue
            v_lo = p.v_lo if c == p.lo else K.eval_scalar(p.program, c)
            v_hi = p.v_hi if d == p.hi else K.eval_scalar(p.program, d)
            out.append(ClippedPiece(p, c, d, v_lo, v_hi))
    return out


def _piece_level_interval(cp: ClippedPiece, alpha: float,
                          tol: float) -> Optional[tuple[float, float]]:
    K = backend.kernels
    p = cp.piece
    if p.kind == "const":
        return (cp.lo, cp.hi) if cp.v_lo >= alpha else None
    if p.kind == "inc":
        if cp.v_hi < alpha:
            return None
        if cp.v_lo >= alpha:
            return (cp.lo, cp.hi)
        r = K.bisect_root(p.program, cp.lo, cp.hi, cp.v_lo, cp.v_hi, alpha, tol)
        if math.isnan(r):
            raise EvalDomainError("level boundary search hit a domain fault")
        return (r, cp.hi)
    if cp.v_lo < alpha:
        return None
    if cp.v_hi >= alpha:
        return (cp.lo, cp.hi)
    r = K.bisect_root(p.program, cp.lo, cp.hi, cp.v_lo, cp.v_hi, alpha, tol)
    if math.isnan(r):
        raise EvalDomainError("level boundary search hit a domain fault")
    return (cp.lo, r)


def level_set(f: PiecewiseFn, alpha: float, base: Optional[IntervalUnion] = None,
              tol: float = TOL_ROOT) -> IntervalUnion:
    """The set {x in base : f(x) >= alpha} as an interval union.

    Monotone stretches are resolved by bisection against ``alpha``; constant
    stretches are included or excluded whole.
    """
    pairs = []
    for cp in clip_pieces(f, base):
        iv = _piece_level_interval(cp, alpha, tol)
        if iv is not None:
            pairs.append(iv)
    return IntervalUnion.from_pairs(pairs)


def level_length(clipped: list[ClippedPiece], alpha: float,
                 tol: float = TOL_ROOT) -> float:
    """Total length of the level set, without building the union object."""
    acc = []
    for cp in clipped:
        iv = _piece_level_interval(cp, alpha, tol)
        if iv is not None:
            acc.append(iv[1] - iv[0])
    return math.fsum(acc)


def sup_on(f: PiecewiseFn, base: Optional[IntervalUnion] = None) -> float:
    """Supremum of f over the closure of the base set (exact for monotone pieces)."""
    clipped = clip_pieces(f, base)
    if not clipped:
        raise EvalDomainError("supremum over an empty set")
    return max(max(cp.v_lo, cp.v_hi) for cp in clipped)


def inf_on(f: PiecewiseFn, base: Optional[IntervalUnion] = None) -> float:
    clipped = clip_pieces(f, base)
    if not clipped:
        raise EvalDomainError("infimum over an empty set")
    return min(min(cp.v_lo, cp.v_hi) for cp in clipped)


# ---------------------------------------------------------------------------
# Sup-measure densities

class SupMeasureDensity:
    """Continuous density for an essential-supremum measure."""

    __slots__ = ("psi",)

    def __init__(self, psi: PiecewiseFn):
        self.psi = psi
        self._check_continuity()

    def _check_continuity(self):
        K = backend.kernels
        segs = self.psi.segments
        for left, right in zip(segs, segs[1:]):
            a = K.eval_scalar(left.program, left.hi)
            b = K.eval_scalar(right.program, right.lo)
            scale = max(1.0, abs(a), abs(b))
            if abs(a - b) > 1e-9 * scale:
                raise EvalDomainError(
                    f"density is discontinuous at {left.hi!r} ({a!r} vs {b!r})")

    @classmethod
    def from_config(cls, obj, domain=(0.0, 1.0)) -> "SupMeasureDensity":
        return cls(PiecewiseFn.from_config(obj, domain))

    def describe(self) -> dict:
        return {"psi": self.psi.to_config()}


def ess_sup(psi: SupMeasureDensity, union: IntervalUnion,
            tol: float = 1e-9, max_rounds: int = 14) -> float:
    """Supremum of the density over a nonempty union, by grid refinement.

    Continuity makes the essential supremum equal the plain supremum on the
    closure, so a refining grid plus the breakpoints converges.
    """
    if union.is_empty:
        raise EvalDomainError("ess_sup of an empty set is undefined")
    f = psi.psi if isinstance(psi, SupMeasureDensity) else psi
    breaks = f.breakpoints()
    best_prev = None
    n = 129
    for _ in range(max_rounds):
        pts = [np.asarray(breaks)]
        for lo, hi in union.intervals:
            pts.append(np.linspace(lo, hi, n))
        xs = np.concatenate(pts)
        keep = np.zeros(len(xs), dtype=bool)
        for lo, hi in union.intervals:
            keep |= (xs >= lo) & (xs <= hi)
        xs = xs[keep]
        best = float(np.max(f.eval_many(xs)))
        if best_prev is not None and abs(best - best_prev) < tol:
            return best
        best_prev = best
        n = 2 * n - 1
    return best_prev
