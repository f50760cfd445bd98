"""Expression DSL for piecewise-defined functions on a closed interval.

The language is a small infix grammar over one variable:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ['-'] atom ('^' factor)?
    atom   := number | variable | func '(' expr ')' | '(' expr ')'
    func   := 'sqrt' | 'exp' | 'ln' | 'abs' | 'neg'

Exponents must be constant.  Integer and p/q exponents keep their exact
rational form so odd roots of negative bases stay well defined; everything
else is treated as a real power of a nonnegative base.

Piecewise functions are ordered lists of (subinterval, expression) segments
that tile a closed domain exactly, with every boundary point owned by
exactly one segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from . import backend
from ._ops import (OP_ABS, OP_ADD, OP_CONST, OP_DIV, OP_EXP, OP_LN, OP_MUL,
                   OP_NEG, OP_POW, OP_SQRT, OP_SUB, OP_VAR, STACK_LIMIT)
from .errors import DomainMismatchError, EvalDomainError, ParseError

__all__ = [
    "Expr", "Const", "Var", "Unary", "Binary", "Power",
    "parse_expr", "format_expr", "eval_expr", "substitute", "compile_expr",
    "Program", "Segment", "PiecewiseFn", "Piece", "MonotonicityClass",
    "classify_monotonicity", "comonotone", "countermonotone",
    "pw_pow", "pw_product", "pw_combine", "pw_map", "pw_reflect",
    "pw_precompose_power",
]

DEFAULT_GRID_N = 257
TOL_COMONO = 1e-12

_FUNCS = ("sqrt", "exp", "ln", "abs", "neg")


# ---------------------------------------------------------------------------
# AST

class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # 'neg' | 'sqrt' | 'exp' | 'ln' | 'abs'
    arg: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # '+' | '-' | '*' | '/'
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Power(Expr):
    base: Expr
    exponent: Union[Fraction, float]

    def exponent_value(self) -> float:
        return float(self.exponent)


def substitute(e: Expr, replacement: Expr) -> Expr:
    """Replace every variable occurrence in ``e`` with ``replacement``."""
    if isinstance(e, Var):
        return replacement
    if isinstance(e, Const):
        return e
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.arg, replacement))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, replacement),
                      substitute(e.right, replacement))
    if isinstance(e, Power):
        return Power(substitute(e.base, replacement), e.exponent)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Parsing

class _Parser:
    def __init__(self, text: str, var: str):
        self.text = text
        self.var = var
        self.pos = 0

    def fail(self, message: str, offset: int | None = None):
        raise ParseError(message, self.pos if offset is None else offset)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Expr:
        e = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.fail(f"unexpected input {self.text[self.pos]!r}")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while True:
            self.skip_ws()
            c = self.peek()
            if c == "+" or c == "-":
                self.pos += 1
                left = Binary(c, left, self.term())
            else:
                return left

    def term(self) -> Expr:
        left = self.factor()
        while True:
            self.skip_ws()
            c = self.peek()
            if c == "*" or c == "/":
                self.pos += 1
                left = Binary(c, left, self.factor())
            else:
                return left

    def factor(self) -> Expr:
        self.skip_ws()
        if self.peek() == "-":
            self.pos += 1
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Unary("neg", inner)
        base = self.atom()
        self.skip_ws()
        if self.peek() == "^":
            caret = self.pos
            self.pos += 1
            exponent = self.factor()
            return Power(base, self._fold_exponent(exponent, caret))
        return base

    def atom(self) -> Expr:
        self.skip_ws()
        c = self.peek()
        if c == "(":
            self.pos += 1
            e = self.expr()
            self.skip_ws()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.pos += 1
            return e
        if c.isdigit() or c == ".":
            return self.number()
        if c.isalpha() or c == "_":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                                 or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name == self.var:
                return Var()
            if name in _FUNCS:
                self.skip_ws()
                if self.peek() != "(":
                    self.fail(f"expected '(' after {name}")
                self.pos += 1
                arg = self.expr()
                self.skip_ws()
                if self.peek() != ")":
                    self.fail("expected ')'")
                self.pos += 1
                return Unary(name, arg)
            self.fail(f"unknown identifier {name!r}", start)
        if c == "":
            self.fail("unexpected end of input")
        self.fail(f"unexpected character {c!r}")

    def number(self) -> Expr:
        start = self.pos
        seen_digit = False
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
            seen_digit = True
        if self.peek() == ".":
            self.pos += 1
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
                seen_digit = True
        if not seen_digit:
            self.fail("malformed number", start)
        if self.peek() in ("e", "E"):
            mark = self.pos
            self.pos += 1
            if self.peek() in ("+", "-"):
                self.pos += 1
            if not self.peek().isdigit():
                self.pos = mark  # the 'e' belongs to an identifier, not the number
            else:
                while self.pos < len(self.text) and self.text[self.pos].isdigit():
                    self.pos += 1
        try:
            return Const(float(self.text[start:self.pos]))
        except ValueError:
            self.fail("malformed number", start)

    def _fold_exponent(self, e: Expr, caret: int) -> Union[Fraction, float]:
        value = self._const_of(e, caret)
        if isinstance(value, float):
            if math.isnan(value) or math.isinf(value):
                self.fail("exponent does not evaluate to a finite constant", caret)
            if value.is_integer() and abs(value) < 2**53:
                return Fraction(int(value))
        return value

    def _const_of(self, e: Expr, caret: int) -> Union[Fraction, float]:
        if isinstance(e, Var):
            self.fail("exponent must be a constant", caret)
        if isinstance(e, Const):
            v = e.value
            if v.is_integer() and abs(v) < 2**53:
                return Fraction(int(v))
            return v
        if isinstance(e, Unary):
            v = self._const_of(e.arg, caret)
            if e.op == "neg":
                return -v
            fv = float(v)
            try:
                out = {"sqrt": math.sqrt, "exp": math.exp,
                       "ln": math.log, "abs": abs}[e.op](fv)
            except ValueError:
                self.fail("exponent does not evaluate to a finite constant", caret)
            return out
        if isinstance(e, Binary):
            a = self._const_of(e.left, caret)
            b = self._const_of(e.right, caret)
            if isinstance(a, Fraction) and isinstance(b, Fraction):
                if e.op == "/" and b == 0:
                    self.fail("division by zero in exponent", caret)
                return {"+": a + b, "-": a - b, "*": a * b,
                        "/": a / b if b != 0 else a}[e.op]
            fa, fb = float(a), float(b)
            if e.op == "/" and fb == 0.0:
                self.fail("division by zero in exponent", caret)
            return {"+": fa + fb, "-": fa - fb, "*": fa * fb, "/": fa / fb}[e.op]
        if isinstance(e, Power):
            base = float(self._const_of(e.base, caret))
            try:
                return base ** e.exponent_value()
            except (ValueError, OverflowError):
                self.fail("exponent does not evaluate to a finite constant", caret)
        raise TypeError(e)


def parse_expr(text: str, var: str = "x") -> Expr:
    """Parse expression text into an AST.

    Raises :class:`ParseError` with a byte offset on syntax errors and on
    unknown identifiers.  ``var`` names the single free variable.
    """
    if not text:
        raise ParseError("empty expression", 0)
    for i, ch in enumerate(text):
        if ord(ch) > 127:
            raise ParseError("expression must be ASCII", i)
    return _Parser(text, var).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _fmt_float(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _prec(e: Expr) -> int:
    if isinstance(e, (Var, Unary)):
        return _PREC_ATOM
    if isinstance(e, Const):
        return _PREC_ATOM if e.value >= 0 else 0
    if isinstance(e, Power):
        return _PREC_POW
    return _PREC_MUL if e.op in "*/" else _PREC_ADD


def format_expr(e: Expr, var: str = "x") -> str:
    """Pretty-print an AST; ``parse_expr(format_expr(e))`` rebuilds ``e``."""
    def wrap(child: Expr, minimum: int) -> str:
        s = format_expr(child, var)
        return f"({s})" if _prec(child) < minimum else s

    if isinstance(e, Const):
        s = _fmt_float(e.value)
        return s
    if isinstance(e, Var):
        return var
    if isinstance(e, Unary):
        return f"{e.op}({format_expr(e.arg, var)})"
    if isinstance(e, Binary):
        # parsing is left-associative, so right children at the same
        # precedence need parentheses to round-trip structurally
        if e.op in "+-":
            return f"{wrap(e.left, _PREC_ADD)}{e.op}{wrap(e.right, _PREC_MUL)}"
        return f"{wrap(e.left, _PREC_MUL)}{e.op}{wrap(e.right, _PREC_POW)}"
    if isinstance(e, Power):
        base = wrap(e.base, _PREC_ATOM)
        exp = e.exponent
        if isinstance(exp, Fraction):
            if exp.denominator == 1:
                s = str(exp.numerator)
                return f"{base}^{s}" if exp.numerator >= 0 else f"{base}^({s})"
            return f"{base}^({exp.numerator}/{exp.denominator})"
        s = _fmt_float(exp)
        return f"{base}^{s}" if exp >= 0 else f"{base}^({s})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Reference (tree-walking) evaluation; the compiled programs are the fast path.

def eval_expr(e: Expr, x: float) -> float:
    """Evaluate an AST at a point, raising ``EvalDomainError`` on domain faults."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Unary):
        v = eval_expr(e.arg, x)
        if e.op == "neg":
            return -v
        if e.op == "abs":
            return abs(v)
        if e.op == "sqrt":
            if v < 0:
                raise EvalDomainError(f"sqrt of negative value {v!r} at x={x!r}")
            return math.sqrt(v)
        if e.op == "exp":
            try:
                return math.exp(v)
            except OverflowError:
                raise EvalDomainError(f"exp overflow at x={x!r}") from None
        if e.op == "ln":
            if v <= 0:
                raise EvalDomainError(f"ln of non-positive value {v!r} at x={x!r}")
            return math.log(v)
        raise TypeError(f"unknown unary op {e.op!r}")
    if isinstance(e, Binary):
        a = eval_expr(e.left, x)
        b = eval_expr(e.right, x)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise EvalDomainError(f"division by zero at x={x!r}")
        return a / b
    if isinstance(e, Power):
        base = eval_expr(e.base, x)
        return _pow_value(base, e.exponent, x)
    raise TypeError(f"not an expression node: {e!r}")


def _pow_value(base: float, exponent: Union[Fraction, float], x: float) -> float:
    if isinstance(exponent, Fraction):
        p, q = exponent.numerator, exponent.denominator
        ev = p / q
        if base > 0:
            return base ** ev
        if base == 0:
            if ev > 0:
                return 0.0
            if ev == 0:
                return 1.0
            raise EvalDomainError(f"zero to negative power at x={x!r}")
        if q % 2 == 1:
            r = (-base) ** ev
            return -r if p % 2 == 1 else r
        raise EvalDomainError(
            f"negative base {base!r} with even-root exponent {p}/{q} at x={x!r}")
    ev = exponent
    if base > 0:
        try:
            return base ** ev
        except OverflowError:
            raise EvalDomainError(f"power overflow at x={x!r}") from None
    if base == 0:
        if ev > 0:
            return 0.0
        if ev == 0:
            return 1.0
        raise EvalDomainError(f"zero to negative power at x={x!r}")
    raise EvalDomainError(f"negative base {base!r} with real exponent at x={x!r}")


# ---------------------------------------------------------------------------
# Compilation to postfix programs for the kernel backends

@dataclass(frozen=True)
class Program:
    ops: np.ndarray     # int32
    args: np.ndarray    # int32
    consts: np.ndarray  # float64
    stack_size: int


def compile_expr(e: Expr) -> Program:
    ops: list[int] = []
    args: list[int] = []
    consts: list[float] = []

    def emit(op: int, arg: int = 0):
        ops.append(op)
        args.append(arg)

    def walk(n: Expr):
        if isinstance(n, Const):
            consts.append(n.value)
            emit(OP_CONST, len(consts) - 1)
        elif isinstance(n, Var):
            emit(OP_VAR)
        elif isinstance(n, Unary):
            walk(n.arg)
            emit({"neg": OP_NEG, "sqrt": OP_SQRT, "exp": OP_EXP,
                  "ln": OP_LN, "abs": OP_ABS}[n.op])
        elif isinstance(n, Binary):
            walk(n.left)
            walk(n.right)
            emit({"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}[n.op])
        elif isinstance(n, Power):
            walk(n.base)
            idx = len(consts)
            if isinstance(n.exponent, Fraction):
                consts.extend((float(n.exponent.numerator),
                               float(n.exponent.denominator)))
            else:
                consts.extend((float(n.exponent), 0.0))
            emit(OP_POW, idx)
        else:
            raise TypeError(f"not an expression node: {n!r}")

    walk(e)
    depth = peak = 0
    for op in ops:
        if op in (OP_CONST, OP_VAR):
            depth += 1
        elif op in (OP_ADD, OP_SUB, OP_MUL, OP_DIV):
            depth -= 1
        peak = max(peak, depth)
    if peak > STACK_LIMIT:
        raise ValueError(f"expression too deep (stack {peak})")
    return Program(np.ascontiguousarray(ops, dtype=np.int32),
                   np.ascontiguousarray(args, dtype=np.int32),
                   np.ascontiguousarray(consts, dtype=np.float64),
                   peak)


# ---------------------------------------------------------------------------
# Piecewise functions

IntervalSpec = Union[str, tuple]


def _num_token(tok: str) -> float:
    tok = tok.strip()
    if "/" in tok:
        num, den = tok.split("/", 1)
        return float(num) / float(den)
    return float(tok)


def parse_interval(spec: IntervalSpec) -> tuple[float, float, bool, bool]:
    """Read "[lo,hi)", "[lo,hi]" or "(lo,hi)" into endpoint/closedness form."""
    if isinstance(spec, tuple):
        if len(spec) == 2:
            return float(spec[0]), float(spec[1]), True, True
        lo, hi, clo, chi = spec
        return float(lo), float(hi), bool(clo), bool(chi)
    s = spec.strip()
    if len(s) < 5 or s[0] not in "[(" or s[-1] not in "])":
        raise ValueError(f"malformed interval {spec!r}")
    inner = s[1:-1].split(",")
    if len(inner) != 2:
        raise ValueError(f"malformed interval {spec!r}")
    return (_num_token(inner[0]), _num_token(inner[1]),
            s[0] == "[", s[-1] == "]")


def format_interval(lo: float, hi: float, closed_lo: bool, closed_hi: bool) -> str:
    return (("[" if closed_lo else "(") + _fmt_float(lo) + "," +
            _fmt_float(hi) + ("]" if closed_hi else ")"))


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    closed_lo: bool
    closed_hi: bool
    expr: Expr
    program: Program

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.closed_lo:
            return False
        if x == self.hi and not self.closed_hi:
            return False
        return True

    def interval_str(self) -> str:
        return format_interval(self.lo, self.hi, self.closed_lo, self.closed_hi)


@dataclass(frozen=True)
class Piece:
    """Maximal monotone-or-constant stretch of one segment (closure values)."""
    lo: float
    hi: float
    kind: str       # 'inc' | 'dec' | 'const'
    v_lo: float
    v_hi: float
    program: Program


class MonotonicityClass(Enum):
    STRICTLY_INCREASING = "strictly-increasing"
    STRICTLY_DECREASING = "strictly-decreasing"
    CONSTANT = "constant"
    NON_MONOTONE = "non-monotone"


_VALIDATION_SAMPLES = 33
_PIECE_SAMPLES = 513


class PiecewiseFn:
    """A function on a closed interval given as finitely many expression segments.

    Immutable after construction; construction validates that the segments
    tile the domain exactly and that every expression evaluates finitely on
    the closure of its subinterval.
    """

    __slots__ = ("segments", "a", "b", "_his", "_closed_hi", "_pieces")

    def __init__(self, segments: Sequence[Segment]):
        if not segments:
            raise ValueError("a piecewise function needs at least one segment")
        segs = sorted(segments, key=lambda s: (s.lo, s.hi))
        for s in segs:
            if s.hi < s.lo:
                raise ValueError(f"segment {s.interval_str()} is reversed")
            if s.hi == s.lo and not (s.closed_lo and s.closed_hi):
                raise ValueError(f"degenerate segment {s.interval_str()} must be closed")
        if not segs[0].closed_lo or not segs[-1].closed_hi:
            raise ValueError("domain endpoints must belong to their segments")
        for left, right in zip(segs, segs[1:]):
            if right.lo < left.hi:
                raise ValueError(
                    f"segments {left.interval_str()} and {right.interval_str()} overlap")
            if right.lo > left.hi:
                raise ValueError(
                    f"gap between {left.interval_str()} and {right.interval_str()}")
            owners = int(left.closed_hi) + int(right.closed_lo)
            if owners != 1:
                word = "both claim" if owners == 2 else "neither claims"
                raise ValueError(
                    f"boundary {left.hi!r}: {word} the point "
                    f"({left.interval_str()} vs {right.interval_str()})")
        self.segments = tuple(segs)
        self.a = segs[0].lo
        self.b = segs[-1].hi
        self._his = np.array([s.hi for s in segs])
        self._closed_hi = np.array([s.closed_hi for s in segs], dtype=bool)
        self._pieces = None
        self._validate_finite()

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[IntervalSpec, Union[Expr, str]]],
                   var: str = "x") -> "PiecewiseFn":
        segs = []
        for interval, expr in pairs:
            lo, hi, clo, chi = parse_interval(interval)
            ast = parse_expr(expr, var) if isinstance(expr, str) else expr
            segs.append(Segment(lo, hi, clo, chi, ast, compile_expr(ast)))
        return cls(segs)

    @classmethod
    def from_expr(cls, expr: Union[Expr, str], domain: tuple[float, float] = (0.0, 1.0),
                  var: str = "x") -> "PiecewiseFn":
        return cls.from_pairs([((domain[0], domain[1]), expr)], var=var)

    @classmethod
    def from_config(cls, obj, domain: tuple[float, float] = (0.0, 1.0)) -> "PiecewiseFn":
        """Build from a config value: an expression string or a segment list."""
        if isinstance(obj, str):
            return cls.from_expr(obj, domain)
        if isinstance(obj, dict) and "segments" in obj:
            dom = obj.get("domain", domain)
            return cls.from_config(obj["segments"], (float(dom[0]), float(dom[1])))
        pairs = []
        for entry in obj:
            pairs.append((entry["interval"], entry["expr"]))
        return cls.from_pairs(pairs)

    def to_config(self) -> list[dict]:
        return [{"interval": s.interval_str(), "expr": format_expr(s.expr)}
                for s in self.segments]

    def __repr__(self):
        parts = ", ".join(f"{s.interval_str()}: {format_expr(s.expr)}"
                          for s in self.segments)
        return f"PiecewiseFn({parts})"

    # -- validation ----------------------------------------------------------

    def _validate_finite(self):
        K = backend.kernels
        for i, s in enumerate(self.segments):
            if s.hi > s.lo:
                xs = np.linspace(s.lo, s.hi, _VALIDATION_SAMPLES)
            else:
                xs = np.array([s.lo])
            vals = K.eval_many(s.program, xs)
            if not np.all(np.isfinite(vals)):
                j = int(np.argmin(np.isfinite(vals)))
                # re-run the tree evaluator for a descriptive error
                try:
                    eval_expr(s.expr, float(xs[j]))
                except EvalDomainError as exc:
                    raise EvalDomainError(
                        f"segment {i} ({s.interval_str()}): {exc}") from None
                raise EvalDomainError(
                    f"segment {i} ({s.interval_str()}): non-finite value at x={xs[j]!r}")

    # -- basic queries ---------------------------------------------------------

    @property
    def domain(self) -> tuple[float, float]:
        return (self.a, self.b)

    def breakpoints(self) -> np.ndarray:
        pts = [self.a]
        pts.extend(s.hi for s in self.segments)
        return np.unique(np.array(pts))

    def segment_index_at(self, x: float) -> int:
        if x < self.a or x > self.b:
            raise EvalDomainError(f"x={x!r} outside domain [{self.a!r}, {self.b!r}]")
        i = int(np.searchsorted(self._his, x, side="left"))
        i = min(i, len(self.segments) - 1)
        if x == self.segments[i].hi and not self.segments[i].closed_hi:
            i += 1
        return i

    def segment_at(self, x: float) -> Segment:
        return self.segments[self.segment_index_at(x)]

    def eval(self, x: float) -> float:
        """Value at ``x``; boundary points resolve to their owning segment."""
        seg = self.segment_at(x)
        v = backend.kernels.eval_scalar(seg.program, float(x))
        if not math.isfinite(v):
            eval_expr(seg.expr, float(x))  # raises with a description
            raise EvalDomainError(f"non-finite value at x={x!r}")
        return v

    def __call__(self, x: float) -> float:
        return self.eval(x)

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised evaluation; ``xs`` must lie in the domain (sorted not required)."""
        xs = np.asarray(xs, dtype=np.float64)
        if xs.size == 0:
            return np.empty(0)
        lo, hi = xs.min(), xs.max()
        if lo < self.a - 1e-12 or hi > self.b + 1e-12:
            raise EvalDomainError(
                f"points outside domain [{self.a!r}, {self.b!r}]")
        xs = np.clip(xs, self.a, self.b)
        idx = np.searchsorted(self._his, xs, side="left")
        idx = np.minimum(idx, len(self.segments) - 1)
        bump = (xs == self._his[idx]) & ~self._closed_hi[idx]
        idx = np.minimum(idx + bump, len(self.segments) - 1)
        out = np.empty_like(xs)
        K = backend.kernels
        for i in np.unique(idx):
            mask = idx == i
            out[mask] = K.eval_many(self.segments[i].program, xs[mask])
        return out

    def sample_grid(self, n: int = DEFAULT_GRID_N) -> np.ndarray:
        return np.union1d(np.linspace(self.a, self.b, n), self.breakpoints())

    # -- monotone decomposition -----------------------------------------------

    def monotone_pieces(self) -> tuple[Piece, ...]:
        if self._pieces is None:
            pieces: list[Piece] = []
            for s in self.segments:
                pieces.extend(_split_segment(s))
            self._pieces = tuple(pieces)
        return self._pieces


def _split_segment(s: Segment) -> list[Piece]:
    K = backend.kernels
    if s.hi == s.lo:
        v = K.eval_scalar(s.program, s.lo)
        return [Piece(s.lo, s.hi, "const", v, v, s.program)]
    if isinstance(s.expr, Const):
        v = s.expr.value
        return [Piece(s.lo, s.hi, "const", v, v, s.program)]
    xs = np.linspace(s.lo, s.hi, _PIECE_SAMPLES)
    ys = K.eval_many(s.program, xs)
    d = np.diff(ys)
    scale = max(1.0, float(np.max(np.abs(ys))))
    pos = d > 1e-14 * scale
    neg = d < -1e-14 * scale
    cuts = [s.lo]
    direction = 0  # +1 rising, -1 falling
    for i in range(len(d)):
        step = 1 if pos[i] else (-1 if neg[i] else 0)
        if step == 0:
            continue
        if direction == 0:
            direction = step
        elif step != direction:
            # interior extremum between xs[i-1] and xs[i+1]
            cuts.append(_refine_extremum(s.program, xs[max(i - 1, 0)],
                                         xs[min(i + 1, len(xs) - 1)],
                                         maximum=(direction > 0)))
            direction = step
    cuts.append(s.hi)
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        v_lo = K.eval_scalar(s.program, lo)
        v_hi = K.eval_scalar(s.program, hi)
        if abs(v_hi - v_lo) <= 1e-13 * scale:
            kind = "const"
        else:
            kind = "inc" if v_hi > v_lo else "dec"
        pieces.append(Piece(lo, hi, kind, v_lo, v_hi, s.program))
    return pieces


def _refine_extremum(program: Program, lo: float, hi: float, maximum: bool) -> float:
    K = backend.kernels
    for _ in range(200):
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        f1 = K.eval_scalar(program, m1)
        f2 = K.eval_scalar(program, m2)
        if (f1 < f2) == maximum:
            lo = m1
        else:
            hi = m2
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Shape analysis

def classify_monotonicity(f: PiecewiseFn, grid_n: int = DEFAULT_GRID_N) -> MonotonicityClass:
    """Classify from adjacent comparisons on a uniform grid plus breakpoints.

    The strict classes require strict inequality at every comparison, so a
    plateau anywhere yields NON_MONOTONE rather than a weak class.
    """
    if grid_n < 3:
        raise ValueError("grid_n must be at least 3")
    xs = f.sample_grid(grid_n)
    ys = f.eval_many(xs)
    d = np.diff(ys)
    if np.all(d > 0):
        return MonotonicityClass.STRICTLY_INCREASING
    if np.all(d < 0):
        return MonotonicityClass.STRICTLY_DECREASING
    if np.all(d == 0):
        return MonotonicityClass.CONSTANT
    return MonotonicityClass.NON_MONOTONE


def _shared_grid(f: PiecewiseFn, g: PiecewiseFn, grid_n: int) -> np.ndarray:
    if grid_n < 3:
        raise ValueError("grid_n must be at least 3")
    if abs(f.a - g.a) > 1e-12 or abs(f.b - g.b) > 1e-12:
        raise DomainMismatchError(
            f"domains differ: [{f.a}, {f.b}] vs [{g.a}, {g.b}]")
    xs = np.union1d(np.linspace(f.a, f.b, grid_n), f.breakpoints())
    return np.union1d(xs, np.clip(g.breakpoints(), f.a, f.b))


def comonotone(f: PiecewiseFn, g: PiecewiseFn, grid_n: int = DEFAULT_GRID_N,
               tol: float = TOL_COMONO) -> bool:
    """True iff (f(x)-f(y))*(g(x)-g(y)) >= -tol for all grid pairs x, y."""
    xs = _shared_grid(f, g, grid_n)
    fv = f.eval_many(xs)
    gv = g.eval_many(xs)
    prod = np.subtract.outer(fv, fv) * np.subtract.outer(gv, gv)
    return bool(prod.min() >= -tol)


def countermonotone(f: PiecewiseFn, g: PiecewiseFn, grid_n: int = DEFAULT_GRID_N,
                    tol: float = TOL_COMONO) -> bool:
    xs = _shared_grid(f, g, grid_n)
    fv = f.eval_many(xs)
    gv = g.eval_many(xs)
    prod = np.subtract.outer(fv, fv) * np.subtract.outer(gv, gv)
    return bool(prod.max() <= tol)


# ---------------------------------------------------------------------------
# Piecewise combinators

def pw_map(f: PiecewiseFn, mapper) -> PiecewiseFn:
    """Apply ``mapper: Expr -> Expr`` to every segment expression."""
    segs = []
    for s in f.segments:
        e = mapper(s.expr)
        segs.append(Segment(s.lo, s.hi, s.closed_lo, s.closed_hi, e, compile_expr(e)))
    return PiecewiseFn(segs)


def pw_pow(f: PiecewiseFn, exponent) -> PiecewiseFn:
    if isinstance(exponent, int):
        exponent = Fraction(exponent)
    elif isinstance(exponent, float) and exponent.is_integer():
        exponent = Fraction(int(exponent))
    return pw_map(f, lambda e: Power(e, exponent))


def pw_combine(f: PiecewiseFn, g: PiecewiseFn, op: str = "*") -> PiecewiseFn:
    """Pointwise combination on the refined segmentation of two functions."""
    if abs(f.a - g.a) > 1e-12 or abs(f.b - g.b) > 1e-12:
        raise DomainMismatchError(
            f"domains differ: [{f.a}, {f.b}] vs [{g.a}, {g.b}]")
    pts = sorted(set(float(p) for p in f.breakpoints()) |
                 set(float(p) for p in g.breakpoints()))
    segs: list[Segment] = []
    for u, v in zip(pts, pts[1:]):
        mid = 0.5 * (u + v)
        fs = f.segment_at(mid)
        gs = g.segment_at(mid)
        clo = fs.contains(u) and gs.contains(u)
        chi = fs.contains(v) and gs.contains(v)
        e = Binary(op, fs.expr, gs.expr)
        segs.append(Segment(u, v, clo, chi, e, compile_expr(e)))
    # every boundary point must keep an owner; add point segments where the
    # refined neighbours disagree about who holds it
    fixed: list[Segment] = []
    for i, seg in enumerate(segs):
        if i > 0 and not segs[i - 1].closed_hi and not seg.closed_lo:
            x = seg.lo
            e = Binary(op, f.segment_at(x).expr, g.segment_at(x).expr)
            fixed.append(Segment(x, x, True, True, e, compile_expr(e)))
        fixed.append(seg)
    return PiecewiseFn(fixed)


def pw_product(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    return pw_combine(f, g, "*")


def pw_reflect(f: PiecewiseFn) -> PiecewiseFn:
    """The function x -> f(a+b-x) on the same domain."""
    total = f.a + f.b
    inner = Binary("-", Const(total), Var())
    segs = []
    for s in f.segments:
        e = substitute(s.expr, inner)
        segs.append(Segment(total - s.hi, total - s.lo, s.closed_hi, s.closed_lo,
                            e, compile_expr(e)))
    return PiecewiseFn(segs)


def pw_precompose_power(f: PiecewiseFn, c: float) -> PiecewiseFn:
    """The function x -> f(x^(1/c)) for c > 0, for functions on [0, 1]."""
    if not (f.a == 0.0 and f.b == 1.0):
        raise DomainMismatchError("power precomposition requires domain [0, 1]")
    if c <= 0:
        raise ValueError("c must be positive")
    if float(c).is_integer():
        exponent: Union[Fraction, float] = Fraction(1, int(c))
    else:
        exponent = 1.0 / c
    inner = Power(Var(), exponent)
    segs = []
    for s in f.segments:
        e = substitute(s.expr, inner)
        segs.append(Segment(s.lo ** c, s.hi ** c, s.closed_lo, s.closed_hi,
                            e, compile_expr(e)))
    return PiecewiseFn(segs)
