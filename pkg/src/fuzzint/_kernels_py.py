"""Pure-Python/numpy kernel backend.

Semantics match the compiled backend: domain faults produce NaN and the
caller decides whether NaN is an error.  Vectorised entry points use numpy;
the scalar ones use plain floats, which is faster for the bisection loops.
"""

from __future__ import annotations

import math

import numpy as np

from ._ops import (OP_ABS, OP_ADD, OP_CONST, OP_DIV, OP_EXP, OP_LN, OP_MUL,
                   OP_NEG, OP_POW, OP_SQRT, OP_SUB, OP_VAR)

BACKEND_NAME = "pure-python"

_NAN = float("nan")


def _pow_scalar(a: float, p: float, q: float) -> float:
    if q == 0.0:  # real exponent p
        if a > 0.0:
            try:
                return a ** p
            except OverflowError:
                return math.inf
        if a == 0.0:
            return 0.0 if p > 0.0 else (1.0 if p == 0.0 else _NAN)
        return _NAN
    e = p / q
    if a > 0.0:
        try:
            return a ** e
        except OverflowError:
            return math.inf
    if a == 0.0:
        return 0.0 if e > 0.0 else (1.0 if e == 0.0 else _NAN)
    if int(q) % 2 == 1:
        try:
            r = (-a) ** e
        except OverflowError:
            r = math.inf
        return -r if int(p) % 2 == 1 else r
    return _NAN


def eval_scalar(prog, x: float) -> float:
    ops = prog.ops
    args = prog.args
    consts = prog.consts
    stack: list[float] = []
    push = stack.append
    for i in range(len(ops)):
        op = ops[i]
        if op == OP_CONST:
            push(consts[args[i]])
        elif op == OP_VAR:
            push(x)
        elif op == OP_NEG:
            stack[-1] = -stack[-1]
        elif op == OP_SQRT:
            a = stack[-1]
            stack[-1] = math.sqrt(a) if a >= 0.0 else _NAN
        elif op == OP_EXP:
            try:
                stack[-1] = math.exp(stack[-1])
            except OverflowError:
                stack[-1] = math.inf
        elif op == OP_LN:
            a = stack[-1]
            stack[-1] = math.log(a) if a > 0.0 else _NAN
        elif op == OP_ABS:
            stack[-1] = abs(stack[-1])
        elif op == OP_ADD:
            b = stack.pop()
            stack[-1] = stack[-1] + b
        elif op == OP_SUB:
            b = stack.pop()
            stack[-1] = stack[-1] - b
        elif op == OP_MUL:
            b = stack.pop()
            stack[-1] = stack[-1] * b
        elif op == OP_DIV:
            b = stack.pop()
            stack[-1] = stack[-1] / b if b != 0.0 else _NAN
        elif op == OP_POW:
            j = args[i]
            stack[-1] = _pow_scalar(stack[-1], consts[j], consts[j + 1])
        else:
            raise ValueError(f"bad opcode {op}")
    return float(stack[-1])


def _pow_array(a: np.ndarray, p: float, q: float) -> np.ndarray:
    out = np.full(a.shape, np.nan)
    if q == 0.0:
        e = p
        pos = a > 0.0
        out[pos] = np.power(a[pos], e)
        zero = a == 0.0
        out[zero] = 0.0 if e > 0.0 else (1.0 if e == 0.0 else np.nan)
        return out
    e = p / q
    pos = a > 0.0
    out[pos] = np.power(a[pos], e)
    zero = a == 0.0
    out[zero] = 0.0 if e > 0.0 else (1.0 if e == 0.0 else np.nan)
    if int(q) % 2 == 1:
        neg = a < 0.0
        r = np.power(-a[neg], e)
        out[neg] = -r if int(p) % 2 == 1 else r
    return out


def eval_many(prog, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    ops = prog.ops
    args = prog.args
    consts = prog.consts
    stack: list[np.ndarray] = []
    push = stack.append
    with np.errstate(all="ignore"):
        for i in range(len(ops)):
            op = ops[i]
            if op == OP_CONST:
                push(np.full(xs.shape, consts[args[i]]))
            elif op == OP_VAR:
                push(xs.astype(np.float64, copy=True))
            elif op == OP_NEG:
                stack[-1] = -stack[-1]
            elif op == OP_SQRT:
                a = stack[-1]
                stack[-1] = np.where(a >= 0.0, np.sqrt(np.abs(a)), np.nan)
            elif op == OP_EXP:
                stack[-1] = np.exp(stack[-1])
            elif op == OP_LN:
                a = stack[-1]
                stack[-1] = np.where(a > 0.0, np.log(np.where(a > 0.0, a, 1.0)), np.nan)
            elif op == OP_ABS:
                stack[-1] = np.abs(stack[-1])
            elif op == OP_ADD:
                b = stack.pop()
                stack[-1] = stack[-1] + b
            elif op == OP_SUB:
                b = stack.pop()
                stack[-1] = stack[-1] - b
            elif op == OP_MUL:
                b = stack.pop()
                stack[-1] = stack[-1] * b
            elif op == OP_DIV:
                b = stack.pop()
                stack[-1] = np.where(b != 0.0,
                                     stack[-1] / np.where(b != 0.0, b, 1.0), np.nan)
            elif op == OP_POW:
                j = args[i]
                stack[-1] = _pow_array(stack[-1], consts[j], consts[j + 1])
            else:
                raise ValueError(f"bad opcode {op}")
    return stack[-1]


def bisect_root(prog, lo: float, hi: float, flo: float, fhi: float,
                target: float, tol: float, maxiter: int = 200) -> float:
    """x in [lo, hi] with f(x) = target for f monotone on the bracket."""
    inc = fhi >= flo
    for _ in range(maxiter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = eval_scalar(prog, mid)
        if fm != fm:  # NaN
            return _NAN
        if (fm >= target) == inc:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def bisect_root_many(prog, lo: float, hi: float, flo: float, fhi: float,
                     targets, tol: float, maxiter: int = 200) -> np.ndarray:
    targets = np.asarray(targets, dtype=np.float64)
    inc = fhi >= flo
    los = np.full(targets.shape, lo)
    his = np.full(targets.shape, hi)
    for _ in range(maxiter):
        if his.size == 0 or np.max(his - los) <= tol:
            break
        mids = 0.5 * (los + his)
        fm = eval_many(prog, mids)
        high_side = (fm >= targets) == inc
        his = np.where(high_side, mids, his)
        los = np.where(high_side, los, mids)
    return 0.5 * (los + his)


def bisect_root_sorted(prog, lo: float, hi: float, flo: float, fhi: float,
                       targets, tol: float, maxiter: int = 200) -> np.ndarray:
    """Roots for an ascending target array; same contract as bisect_root_many."""
    return bisect_root_many(prog, lo, hi, flo, fhi, targets, tol, maxiter)


def simpson(prog, a: float, b: float, n: int) -> float:
    """Composite Simpson rule with n panels over [a, b]."""
    if n < 1:
        raise ValueError("need at least one panel")
    xs = np.linspace(a, b, 2 * n + 1)
    ys = eval_many(prog, xs)
    h = (b - a) / n
    return float(h / 6.0 * (ys[0] + ys[-1] + 2.0 * np.sum(ys[2:-1:2])
                            + 4.0 * np.sum(ys[1::2])))
