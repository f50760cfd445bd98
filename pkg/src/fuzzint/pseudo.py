"""Pseudo-arithmetic semirings and their integrals.

A generator g (strictly monotone, continuous, into [0, inf)) induces
x (+) y = g^{-1}(g(x) + g(y)) and x (*) y = g^{-1}(g(x) g(y)) on a value
interval [a, b].  The generated integral is g^{-1} of the ordinary integral
of g(f); the max-plus family replaces (+) with max while (*) stays
generated; and a sup-measure with continuous density turns the integral
into a supremum, reached as the limit of the lambda-th generator powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import backend
from .errors import (EvalDomainError, PreconditionError, QuadratureError,
                     RangeEscapeError)
from .exprdsl import (Binary, Const, Expr, Power, PiecewiseFn, Program, Unary,
                      Var, compile_expr, format_expr, parse_expr, substitute)
from .measures import SupMeasureDensity, inf_on, sup_on

__all__ = [
    "Generator", "GGenerated", "MaxPlusFamily", "SupMeasure", "Semiring",
    "PseudoIntegralResult", "pseudo_add", "pseudo_mul", "g_integral",
    "pseudo_product_integral", "sup_integral", "sup_product_integral",
    "lambda_limit_integral", "semiring_from_config", "semiring_law_deviations",
]

TOL_INV = 1e-12
_GRID = 257


def _detect_family(e: Expr):
    """Recognise t^p and exp(p*t), which admit exact inverses."""
    if isinstance(e, Var):
        return ("power", 1.0)
    if isinstance(e, Power) and isinstance(e.base, Var):
        return ("power", float(e.exponent))
    if isinstance(e, Unary) and e.op == "exp":
        arg = e.arg
        if isinstance(arg, Var):
            return ("exp", 1.0)
        if isinstance(arg, Binary) and arg.op == "*":
            if isinstance(arg.left, Const) and isinstance(arg.right, Var):
                return ("exp", arg.left.value)
            if isinstance(arg.left, Var) and isinstance(arg.right, Const):
                return ("exp", arg.right.value)
    return None


class Generator:
    """Strictly monotone continuous map from a value interval into [0, inf)."""

    __slots__ = ("expr", "interval", "program", "increasing", "family",
                 "_g_lo", "_g_hi")

    def __init__(self, expr: Union[Expr, str], interval: tuple[float, float]):
        if isinstance(expr, str):
            expr = parse_expr(expr, var="t")
        self.expr = expr
        self.interval = (float(interval[0]), float(interval[1]))
        if not self.interval[0] < self.interval[1]:
            raise PreconditionError("generator needs a nondegenerate interval")
        self.program = compile_expr(expr)
        ts = np.linspace(self.interval[0], self.interval[1], _GRID)
        vals = backend.kernels.eval_many(self.program, ts)
        if not np.all(np.isfinite(vals)):
            raise EvalDomainError("generator does not evaluate finitely")
        if float(np.min(vals)) < -1e-12:
            raise PreconditionError("generator must map into [0, inf)")
        d = np.diff(vals)
        if np.all(d > 0):
            self.increasing = True
        elif np.all(d < 0):
            self.increasing = False
        else:
            raise PreconditionError("generator is not strictly monotone on its interval")
        self.family = _detect_family(expr)
        self._g_lo = float(vals[0])
        self._g_hi = float(vals[-1])

    # -- forward map ----------------------------------------------------------

    def g(self, x: float) -> float:
        return backend.kernels.eval_scalar(self.program, float(x))

    def g_many(self, xs: np.ndarray) -> np.ndarray:
        return backend.kernels.eval_many(self.program, np.asarray(xs, dtype=np.float64))

    def g_range(self) -> tuple[float, float]:
        lo, hi = sorted((self._g_lo, self._g_hi))
        return lo, hi

    # -- inverse --------------------------------------------------------------

    def inv(self, y: float) -> float:
        if self.family is not None:
            kind, p = self.family
            if kind == "power":
                if y < 0:
                    if y < -1e-12:
                        raise RangeEscapeError(f"no preimage for {y!r} under t^{p}")
                    y = 0.0
                return y ** (1.0 / p)
            if y <= 0:
                raise RangeEscapeError(f"no preimage for {y!r} under exp({p}*t)")
            return math.log(y) / p
        lo, hi = self.g_range()
        slack = 1e-9 * max(1.0, abs(hi))
        if y < lo - slack or y > hi + slack:
            raise RangeEscapeError(
                f"value {y!r} outside generator range [{lo!r}, {hi!r}]")
        y = min(max(y, lo), hi)
        a, b = self.interval
        return backend.kernels.bisect_root(self.program, a, b, self._g_lo,
                                           self._g_hi, y, TOL_INV)

    def inv_many(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=np.float64)
        if self.family is not None:
            kind, p = self.family
            if kind == "power":
                return np.maximum(ys, 0.0) ** (1.0 / p)
            return np.log(ys) / p
        lo, hi = self.g_range()
        clipped = np.clip(ys, lo, hi)
        a, b = self.interval
        return backend.kernels.bisect_root_many(self.program, a, b, self._g_lo,
                                                self._g_hi, clipped, TOL_INV)

    def lambda_power_value(self, ln_integral: float, lam: float) -> float:
        """(g^lam)^{-1} applied to a quantity given by its logarithm."""
        return self.inv(math.exp(ln_integral / lam))

    def describe(self) -> dict:
        return {"g": format_expr(self.expr, var="t"),
                "interval": [self.interval[0], self.interval[1]]}


# ---------------------------------------------------------------------------
# Semiring variants

@dataclass(frozen=True)
class GGenerated:
    gen: Generator

    def describe(self) -> dict:
        return {"type": "g", **self.gen.describe()}


@dataclass(frozen=True)
class MaxPlusFamily:
    gen: Generator
    lam: float

    def describe(self) -> dict:
        return {"type": "maxplus", "lambda": self.lam, **self.gen.describe()}


@dataclass(frozen=True)
class SupMeasure:
    psi: SupMeasureDensity
    gen: Generator

    def describe(self) -> dict:
        return {"type": "supmeasure", **self.gen.describe(), **self.psi.describe()}

    @staticmethod
    def neutral_density(gen: Generator, domain=(0.0, 1.0)) -> SupMeasureDensity:
        """Density equal to the multiplicative unit, so f (*) psi = f."""
        one = gen.inv(1.0)
        return SupMeasureDensity(PiecewiseFn.from_expr(Const(one), domain))


Semiring = Union[GGenerated, MaxPlusFamily, SupMeasure]


def _gen_of(sr) -> Generator:
    if isinstance(sr, Generator):
        return sr
    return sr.gen


def _check_in_interval(gen: Generator, label: str, *values: float):
    a, b = gen.interval
    for v in values:
        if v < a - 1e-9 or v > b + 1e-9:
            raise RangeEscapeError(
                f"{label} {v!r} outside value interval [{a!r}, {b!r}]")


def pseudo_add(sr: Semiring, x: float, y: float) -> float:
    """Pseudo-addition: generated g^{-1}(g(x)+g(y)), or max for the sup families."""
    if isinstance(sr, (MaxPlusFamily, SupMeasure)):
        return max(x, y)
    gen = _gen_of(sr)
    _check_in_interval(gen, "operand", x, y)
    out = gen.inv(gen.g(x) + gen.g(y))
    _check_in_interval(gen, f"{x!r} (+) {y!r} =", out)
    return out


def pseudo_mul(sr: Semiring, x: float, y: float) -> float:
    """Pseudo-multiplication g^{-1}(g(x)g(y)); powers of g induce the same product."""
    gen = _gen_of(sr)
    _check_in_interval(gen, "operand", x, y)
    if gen.family is not None:
        kind, p = gen.family
        out = x * y if kind == "power" else x + y
    else:
        out = gen.inv(gen.g(x) * gen.g(y))
    _check_in_interval(gen, f"{x!r} (*) {y!r} =", out)
    return out


# ---------------------------------------------------------------------------
# Generated integrals

@dataclass(frozen=True)
class PseudoIntegralResult:
    value: float
    quadrature_n: int
    semiring: dict

    def to_dict(self) -> dict:
        return {"value": self.value, "quadrature_n": self.quadrature_n,
                "semiring": self.semiring}


def _validate_range(gen: Generator, f: PiecewiseFn):
    a, b = gen.interval
    lo, hi = inf_on(f), sup_on(f)
    if lo < a - 1e-9 or hi > b + 1e-9:
        raise RangeEscapeError(
            f"integrand range [{lo!r}, {hi!r}] escapes value interval [{a!r}, {b!r}]")


def _refined_cells(fns: Sequence[PiecewiseFn],
                   interval: Optional[tuple[float, float]]):
    """(u, v, program) cells of the g-space product over common breakpoints."""
    c, d = interval if interval is not None else fns[0].domain
    pts = {c, d}
    for f in fns:
        pts.update(float(p) for p in f.breakpoints() if c < p < d)
    return sorted(pts), c, d


def _product_programs(gen: Generator, fns: Sequence[PiecewiseFn],
                      pts: Sequence[float]) -> list[tuple[float, float, Program]]:
    cells = []
    for u, v in zip(pts, pts[1:]):
        mid = 0.5 * (u + v)
        expr = None
        for f in fns:
            piece = substitute(gen.expr, f.segment_at(mid).expr)
            expr = piece if expr is None else Binary("*", expr, piece)
        cells.append((u, v, compile_expr(expr)))
    return cells


def pseudo_product_integral(sr, fns: Sequence[PiecewiseFn],
                            interval: Optional[tuple[float, float]] = None,
                            tol: float = 1e-9, n0: int = 16,
                            max_panels: int = 2 ** 20) -> PseudoIntegralResult:
    """Generated integral of the pseudo-product of ``fns``.

    Uses g((*) f_i) = prod g(f_i), so the quadrature runs on a plain product
    of composed expressions; breakpoints of every operand are forced panel
    boundaries.  Panels double per segment until the inverted value is
    stable to ``tol``.
    """
    gen = _gen_of(sr)
    for f in fns:
        _validate_range(gen, f)
    pts, c, d = _refined_cells(fns, interval)
    if d <= c:
        raise PreconditionError("empty integration interval")
    cells = _product_programs(gen, fns, pts)
    K = backend.kernels
    n = n0
    prev = None
    while n <= max_panels:
        total = math.fsum(K.simpson(prog, u, v, n) for u, v, prog in cells)
        if not math.isfinite(total):
            raise EvalDomainError("quadrature hit a domain fault")
        value = gen.inv(total)
        if prev is not None and abs(value - prev) < tol:
            a, b = gen.interval
            if value < a - 1e-9 or value > b + 1e-9:
                raise RangeEscapeError(
                    f"integral value {value!r} escapes [{a!r}, {b!r}]")
            return PseudoIntegralResult(value, n * len(cells),
                                        sr.describe() if hasattr(sr, "describe")
                                        else {"type": "g", **gen.describe()})
        prev = value
        n *= 2
    raise QuadratureError(
        f"no convergence to {tol} within {max_panels} panels per segment")


def g_integral(sr, f: PiecewiseFn,
               interval: Optional[tuple[float, float]] = None,
               tol: float = 1e-9, n0: int = 16,
               max_panels: int = 2 ** 20) -> PseudoIntegralResult:
    """Generated integral g^{-1}(integral of g(f)) by composite Simpson."""
    return pseudo_product_integral(sr, [f], interval=interval, tol=tol,
                                   n0=n0, max_panels=max_panels)


# ---------------------------------------------------------------------------
# Sup-measure integrals

def sup_product_integral(sr: SupMeasure, fns: Sequence[PiecewiseFn],
                         tol: float = 1e-9, max_rounds: int = 12) -> PseudoIntegralResult:
    """sup over x of ((*) f_i)(x) (*) psi(x), via refining grids.

    Works in g-space: the product of g-values is extremised and inverted
    once, which commutes with sup because the inverse is monotone.
    """
    gen = sr.gen
    psi = sr.psi.psi
    for f in fns:
        _validate_range(gen, f)
    domain = fns[0].domain
    breaks = [f.breakpoints() for f in fns] + [psi.breakpoints()]
    base = np.unique(np.concatenate(breaks))
    n = 1025
    prev = None
    for _ in range(max_rounds):
        xs = np.union1d(base, np.linspace(domain[0], domain[1], n))
        m = gen.g_many(psi.eval_many(xs))
        for f in fns:
            m = m * gen.g_many(f.eval_many(xs))
        ext = float(np.max(m)) if gen.increasing else float(np.min(m))
        value = gen.inv(ext)
        if prev is not None and abs(value - prev) < tol:
            return PseudoIntegralResult(value, int(xs.size), sr.describe())
        prev = value
        n = 2 * n - 1
    return PseudoIntegralResult(prev, int(xs.size), sr.describe())


def sup_integral(f: PiecewiseFn, sr: SupMeasure,
                 tol: float = 1e-9) -> PseudoIntegralResult:
    """sup over x of f(x) (*) psi(x) under the sup-measure semiring."""
    return sup_product_integral(sr, [f], tol=tol)


# ---------------------------------------------------------------------------
# Lambda-limit integrals (log-domain to survive large powers)

def _log_simpson_cells(cells, n: int, lam: float) -> float:
    """log of sum over cells of Simpson-weighted u(x)^lam, u = the cell program."""
    K = backend.kernels
    parts = []
    with np.errstate(divide="ignore"):
        for u, v, prog in cells:
            xs = np.linspace(u, v, 2 * n + 1)
            vals = K.eval_many(prog, xs)
            if np.any(vals < -1e-12) or np.any(np.isnan(vals)):
                raise EvalDomainError("lambda integrand must stay nonnegative")
            logs = lam * np.log(np.maximum(vals, 0.0))
            h = (v - u) / n
            w = np.full(xs.shape, 2.0 * h / 6.0)
            w[1::2] = 4.0 * h / 6.0
            w[0] = w[-1] = h / 6.0
            parts.append(logs + np.log(w))
    arr = np.concatenate(parts)
    m = float(np.max(arr))
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.sum(np.exp(arr - m))))


def _lambda_value(gen: Generator, fns: Sequence[PiecewiseFn],
                  psi: Optional[PiecewiseFn], lam: float,
                  interval: Optional[tuple[float, float]] = None,
                  tol: float = 1e-9, n0: int = 64,
                  max_panels: int = 2 ** 17) -> float:
    all_fns = list(fns) + ([psi] if psi is not None else [])
    pts, c, d = _refined_cells(all_fns, interval)
    cells = _product_programs(gen, all_fns, pts)
    n = n0
    prev = None
    while n <= max_panels:
        ln_i = _log_simpson_cells(cells, n, lam)
        value = gen.lambda_power_value(ln_i, lam) if ln_i > -math.inf else gen.inv(0.0)
        if prev is not None and abs(value - prev) < tol:
            return value
        prev = value
        n *= 2
    return prev


def lambda_limit_integral(gen: Generator, f: PiecewiseFn,
                          interval: Optional[tuple[float, float]] = None,
                          lambdas: Sequence[float] = (1, 4, 16, 64, 256)) -> list[float]:
    """The g^lambda-integral of f for each lambda in an increasing schedule.

    As lambda grows the values approach the sup-integral of f under the
    limiting max semiring (with the unit density).
    """
    lams = [float(l) for l in lambdas]
    if any(l <= 0 for l in lams) or any(b <= a for a, b in zip(lams, lams[1:])):
        raise PreconditionError("lambda schedule must be positive and increasing")
    _validate_range(gen, f)
    return [_lambda_value(gen, [f], None, lam, interval) for lam in lams]


def lambda_product_trace(sr: SupMeasure, fns: Sequence[PiecewiseFn],
                         lambdas: Sequence[float]) -> list[float]:
    """Lambda-integrals of the psi-weighted pseudo-product, one per lambda."""
    return [_lambda_value(sr.gen, fns, sr.psi.psi, float(l)) for l in lambdas]


# ---------------------------------------------------------------------------
# Config plumbing and law probes

def semiring_from_config(obj, domain=(0.0, 1.0)) -> Semiring:
    if isinstance(obj, (GGenerated, MaxPlusFamily, SupMeasure)):
        return obj
    kind = obj.get("type", "g")
    if kind == "g":
        gen = Generator(obj["g"], tuple(obj.get("interval", (0.0, 1.0))))
        return GGenerated(gen)
    if kind == "maxplus":
        gen = Generator(obj.get("g", "exp(t)"),
                        tuple(obj.get("interval", (0.0, 100.0))))
        return MaxPlusFamily(gen, float(obj.get("lambda", 1.0)))
    if kind == "supmeasure":
        gen = Generator(obj.get("g", "exp(t)"),
                        tuple(obj.get("interval", (0.0, 100.0))))
        psi = SupMeasureDensity.from_config(obj.get("psi", "0"), domain)
        return SupMeasure(psi, gen)
    raise PreconditionError(f"unknown semiring type {kind!r}")


def semiring_law_deviations(sr: Semiring, n_triples: int = 1000,
                            seed: int = 0) -> dict:
    """Largest violation of each semiring law over random probe triples."""
    gen = _gen_of(sr)
    rng = np.random.default_rng(seed)
    g_lo, g_hi = gen.g_range()
    span = g_hi - g_lo
    cap = g_lo + min(span / 3.0, span ** (1.0 / 3.0) if span > 0 else span)
    us = rng.uniform(g_lo, cap, size=(n_triples, 3))
    xs = gen.inv_many(us.reshape(-1)).reshape(n_triples, 3)
    out = {"commut_add": 0.0, "assoc_add": 0.0, "commut_mul": 0.0,
           "assoc_mul": 0.0, "distrib": 0.0, "zero": 0.0, "one": 0.0}
    add = lambda p, q: pseudo_add(sr, p, q)
    mul = lambda p, q: pseudo_mul(sr, p, q)
    a, b = gen.interval
    zero = None
    if isinstance(sr, (MaxPlusFamily, SupMeasure)):
        zero = a  # max(x, a) = x on [a, b]
    elif g_lo <= 1e-12:
        zero = gen.inv(0.0)
    one = gen.inv(1.0) if g_lo <= 1.0 <= g_hi else None
    for x, y, z in xs:
        out["commut_add"] = max(out["commut_add"], abs(add(x, y) - add(y, x)))
        out["assoc_add"] = max(out["assoc_add"],
                               abs(add(add(x, y), z) - add(x, add(y, z))))
        out["commut_mul"] = max(out["commut_mul"], abs(mul(x, y) - mul(y, x)))
        out["assoc_mul"] = max(out["assoc_mul"],
                               abs(mul(mul(x, y), z) - mul(x, mul(y, z))))
        out["distrib"] = max(out["distrib"],
                             abs(mul(x, add(y, z)) - add(mul(x, y), mul(x, z))))
        if zero is not None:
            out["zero"] = max(out["zero"], abs(add(x, zero) - x))
        if one is not None:
            out["one"] = max(out["one"], abs(mul(x, one) - x))
    return out
