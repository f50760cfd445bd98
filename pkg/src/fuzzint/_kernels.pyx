# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend: postfix program evaluation, monotone bisection
and composite Simpson quadrature.  Mirrors _kernels_py semantics exactly."""

import numpy as np

from libc.math cimport NAN, exp, fabs, isnan, log, pow, sqrt

BACKEND_NAME = "cython"

DEF STACK_CAP = 64

# opcode values mirror fuzzint._ops
DEF OP_CONST = 0
DEF OP_VAR = 1
DEF OP_NEG = 2
DEF OP_SQRT = 3
DEF OP_EXP = 4
DEF OP_LN = 5
DEF OP_ABS = 6
DEF OP_ADD = 7
DEF OP_SUB = 8
DEF OP_MUL = 9
DEF OP_DIV = 10
DEF OP_POW = 11


cdef inline double _pow_rule(double a, double p, double q) noexcept nogil:
    cdef double e, r
    cdef long lp, lq
    if q == 0.0:
        if a > 0.0:
            return pow(a, p)
        if a == 0.0:
            if p > 0.0:
                return 0.0
            if p == 0.0:
                return 1.0
            return NAN
        return NAN
    e = p / q
    if a > 0.0:
        return pow(a, e)
    if a == 0.0:
        if e > 0.0:
            return 0.0
        if e == 0.0:
            return 1.0
        return NAN
    lq = <long> q
    if lq % 2 == 1:
        r = pow(-a, e)
        lp = <long> p
        if lp % 2 == 1 or lp % 2 == -1:
            return -r
        return r
    return NAN


cdef double _eval(const int* ops, const int* args, const double* consts,
                  Py_ssize_t n, double x) noexcept nogil:
    cdef double stack[STACK_CAP]
    cdef Py_ssize_t i, sp = 0
    cdef int op
    cdef double a, b
    for i in range(n):
        op = ops[i]
        if op == OP_CONST:
            stack[sp] = consts[args[i]]
            sp += 1
        elif op == OP_VAR:
            stack[sp] = x
            sp += 1
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        elif op == OP_SQRT:
            a = stack[sp - 1]
            stack[sp - 1] = sqrt(a) if a >= 0.0 else NAN
        elif op == OP_EXP:
            stack[sp - 1] = exp(stack[sp - 1])
        elif op == OP_LN:
            a = stack[sp - 1]
            stack[sp - 1] = log(a) if a > 0.0 else NAN
        elif op == OP_ABS:
            stack[sp - 1] = fabs(stack[sp - 1])
        elif op == OP_ADD:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] + stack[sp]
        elif op == OP_SUB:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] - stack[sp]
        elif op == OP_MUL:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] * stack[sp]
        elif op == OP_DIV:
            sp -= 1
            b = stack[sp]
            stack[sp - 1] = stack[sp - 1] / b if b != 0.0 else NAN
        elif op == OP_POW:
            stack[sp - 1] = _pow_rule(stack[sp - 1], consts[args[i]],
                                      consts[args[i] + 1])
    return stack[sp - 1]


def eval_scalar(prog, double x):
    cdef int[::1] ops = prog.ops
    cdef int[::1] args = prog.args
    cdef double[::1] consts = prog.consts
    return _eval(&ops[0], &args[0], &consts[0], ops.shape[0], x)


def eval_many(prog, xs):
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    cdef int[::1] ops = prog.ops
    cdef int[::1] args = prog.args
    cdef double[::1] consts = prog.consts
    out = np.empty(xs.shape[0], dtype=np.float64)
    cdef double[::1] xv = xs
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = xv.shape[0], m = ops.shape[0]
    cdef const int* po = &ops[0]
    cdef const int* pa = &args[0]
    cdef const double* pc = &consts[0]
    with nogil:
        for i in range(n):
            ov[i] = _eval(po, pa, pc, m, xv[i])
    return out


cdef double _bisect(const int* ops, const int* args, const double* consts,
                    Py_ssize_t m, double lo, double hi, bint inc,
                    double target, double tol, int maxiter) noexcept nogil:
    cdef double mid, fm
    cdef int it
    for it in range(maxiter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = _eval(ops, args, consts, m, mid)
        if isnan(fm):
            return NAN
        if (fm >= target) == inc:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def bisect_root(prog, double lo, double hi, double flo, double fhi,
                double target, double tol, int maxiter=200):
    """x in [lo, hi] with f(x) = target for f monotone on the bracket."""
    cdef int[::1] ops = prog.ops
    cdef int[::1] args = prog.args
    cdef double[::1] consts = prog.consts
    return _bisect(&ops[0], &args[0], &consts[0], ops.shape[0],
                   lo, hi, fhi >= flo, target, tol, maxiter)


def bisect_root_many(prog, double lo, double hi, double flo, double fhi,
                     targets, double tol, int maxiter=200):
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    cdef int[::1] ops = prog.ops
    cdef int[::1] args = prog.args
    cdef double[::1] consts = prog.consts
    out = np.empty(targets.shape[0], dtype=np.float64)
    cdef double[::1] tv = targets
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = tv.shape[0], m = ops.shape[0]
    cdef bint inc = fhi >= flo
    cdef const int* po = &ops[0]
    cdef const int* pa = &args[0]
    cdef const double* pc = &consts[0]
    with nogil:
        for i in range(n):
            ov[i] = _bisect(po, pa, pc, m, lo, hi, inc, tv[i], tol, maxiter)
    return out


cdef void _bisect_sorted(const int* ops, const int* args, const double* consts,
                         Py_ssize_t m, double lo, double hi, bint inc,
                         const double* targets, double* out,
                         Py_ssize_t i0, Py_ssize_t i1,
                         double tol, int maxiter) noexcept nogil:
    # targets[i0:i1] ascending; monotonicity orders the roots, so the middle
    # root splits the bracket for both halves
    cdef Py_ssize_t mid
    cdef double r
    if i1 <= i0:
        return
    mid = (i0 + i1) // 2
    r = _bisect(ops, args, consts, m, lo, hi, inc, targets[mid], tol, maxiter)
    out[mid] = r
    if inc:
        _bisect_sorted(ops, args, consts, m, lo, min(hi, r + tol), inc,
                       targets, out, i0, mid, tol, maxiter)
        _bisect_sorted(ops, args, consts, m, max(lo, r - tol), hi, inc,
                       targets, out, mid + 1, i1, tol, maxiter)
    else:
        _bisect_sorted(ops, args, consts, m, max(lo, r - tol), hi, inc,
                       targets, out, i0, mid, tol, maxiter)
        _bisect_sorted(ops, args, consts, m, lo, min(hi, r + tol), inc,
                       targets, out, mid + 1, i1, tol, maxiter)


def bisect_root_sorted(prog, double lo, double hi, double flo, double fhi,
                       targets, double tol, int maxiter=200):
    """Roots for an ascending target array; same contract as bisect_root_many."""
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    cdef int[::1] ops = prog.ops
    cdef int[::1] args = prog.args
    cdef double[::1] consts = prog.consts
    out = np.empty(targets.shape[0], dtype=np.float64)
    cdef double[::1] tv = targets
    cdef double[::1] ov = out
    cdef Py_ssize_t n = tv.shape[0], m = ops.shape[0]
    if n == 0:
        return out
    cdef bint inc = fhi >= flo
    with nogil:
        _bisect_sorted(&ops[0], &args[0], &consts[0], m, lo, hi, inc,
                       &tv[0], &ov[0], 0, n, tol, maxiter)
    return out


def simpson(prog, double a, double b, int n):
    """Composite Simpson rule with n panels over [a, b]."""
    if n < 1:
        raise ValueError("need at least one panel")
    cdef int[::1] ops = prog.ops
    cdef int[::1] args = prog.args
    cdef double[::1] consts = prog.consts
    cdef Py_ssize_t m = ops.shape[0]
    cdef const int* po = &ops[0]
    cdef const int* pa = &args[0]
    cdef const double* pc = &consts[0]
    cdef double h = (b - a) / n
    cdef double s = 0.0, fa, fb, fm, x0
    cdef int i
    with nogil:
        fa = _eval(po, pa, pc, m, a)
        for i in range(n):
            x0 = a + i * h
            fm = _eval(po, pa, pc, m, x0 + 0.5 * h)
            fb = _eval(po, pa, pc, m, a + (i + 1) * h) if i < n - 1 \
                else _eval(po, pa, pc, m, b)
            s += fa + 4.0 * fm + fb
            fa = fb
    return s * h / 6.0
