"""Inequality checkers: each evaluates the two sides of one inequality and
returns a self-contained report.

Slack is always signed so that nonnegative slack means the inequality holds
in the expected direction for the instance.  Failed comonotonicity
preconditions do not abort a check: the verdict is still computed and the
report is marked advisory, because several checks are interesting exactly
on operands that break the hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import PreconditionError
from .exprdsl import (Expr, PiecewiseFn, comonotone, countermonotone,
                      classify_monotonicity, MonotonicityClass, format_expr,
                      pw_pow, pw_product, pw_precompose_power, substitute)
from .measures import FuzzyMeasure, SupMeasureDensity
from .pseudo import (Generator, GGenerated, SupMeasure,
                     Semiring, g_integral, lambda_product_trace,
                     pseudo_mul, pseudo_product_integral, sup_integral,
                     sup_product_integral, _gen_of)
from .sugeno import sugeno_integral

__all__ = [
    "InequalityReport", "TOL_INEQ",
    "check_classical_diaz_metcalf", "check_sugeno_diaz_metcalf",
    "check_pseudo_diaz_metcalf", "check_sup_diaz_metcalf",
    "check_phi_diaz_metcalf", "check_pseudo_chebyshev", "check_stolarsky",
]

TOL_INEQ = 1e-7
_PHI_PROBES = 100


@dataclass
class InequalityReport:
    """One checker run; context carries everything needed to reproduce it."""

    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    advisory: bool = False
    advisory_reason: Optional[str] = None
    direction: str = "forward"
    context: dict = field(default_factory=dict)
    tol: float = TOL_INEQ

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "advisory": self.advisory,
            "advisory_reason": self.advisory_reason,
            "direction": self.direction,
            "context": self.context,
            "tol": self.tol,
        }


def _fn_config(f: PiecewiseFn) -> list[dict]:
    return f.to_config()


def _mk_report(name, lhs, rhs, slack, tol, context, advisory=False,
               reason=None, direction="forward") -> InequalityReport:
    return InequalityReport(name=name, lhs=float(lhs), rhs=float(rhs),
                            slack=float(slack), holds=bool(slack >= -tol),
                            advisory=advisory, advisory_reason=reason,
                            direction=direction, context=context, tol=tol)


def _comono_advisory(f, g) -> tuple[bool, Optional[str]]:
    if comonotone(f, g):
        return False, None
    return True, "operands are not comonotone on the sampled grid"


# ---------------------------------------------------------------------------
# Classical form under Sugeno integrals

def check_classical_diaz_metcalf(f: PiecewiseFn, g: PiecewiseFn,
                                 mu: Optional[FuzzyMeasure] = None,
                                 m_bound: float = 0.0, M_bound: float = 1.0,
                                 tol: float = TOL_INEQ) -> InequalityReport:
    """Reverse-Cauchy-Schwarz bound with Sugeno integrals substituted.

    Sides: int(f^2) * int(g^2) against ((M+m)^2 / 4Mm) * (int(f*g))^2, with
    the ratio precondition 0 <= m*g <= f <= M*g verified on a sample grid.
    """
    mu = mu or FuzzyMeasure.lebesgue()
    if m_bound <= 0 or M_bound <= 0:
        raise PreconditionError("ratio bounds must be positive")
    xs = np.union1d(f.sample_grid(), g.breakpoints())
    fv = f.eval_many(xs)
    gv = g.eval_many(xs)
    scale = max(1.0, float(np.max(np.abs(fv))), float(np.max(np.abs(gv))))
    worst_low = float(np.max(m_bound * gv - fv))
    worst_high = float(np.max(fv - M_bound * gv))
    if min(float(np.min(fv)), float(np.min(gv))) < -1e-9 * scale:
        raise PreconditionError("operands must be nonnegative")
    if worst_low > 1e-9 * scale or worst_high > 1e-9 * scale:
        raise PreconditionError(
            f"ratio precondition violated: max(m*g - f) = {worst_low!r}, "
            f"max(f - M*g) = {worst_high!r}")
    int_f2 = sugeno_integral(pw_pow(f, 2), mu=mu).value
    int_g2 = sugeno_integral(pw_pow(g, 2), mu=mu).value
    int_fg = sugeno_integral(pw_product(f, g), mu=mu).value
    factor = (M_bound + m_bound) ** 2 / (4.0 * M_bound * m_bound)
    bound = factor * int_fg ** 2
    product = int_f2 * int_g2
    context = {
        "f": _fn_config(f), "g": _fn_config(g), "measure": mu.describe(),
        "m": m_bound, "M": M_bound, "factor": factor,
        "integrals": {"f^2": int_f2, "g^2": int_g2, "f*g": int_fg},
    }
    return _mk_report("classical-diaz-metcalf", bound, product,
                      bound - product, tol, context)


# ---------------------------------------------------------------------------
# Sugeno form

def check_sugeno_diaz_metcalf(f: PiecewiseFn, g: PiecewiseFn, s: float,
                              mu: Optional[FuzzyMeasure] = None,
                              tol: float = TOL_INEQ) -> InequalityReport:
    """int(f^s) * int(g^s) <= int((f*g)^s) under a fuzzy measure, s > 1."""
    if not s > 1:
        raise PreconditionError("power s must exceed 1")
    mu = mu or FuzzyMeasure.lebesgue()
    advisory, reason = _comono_advisory(f, g)
    int_fs = sugeno_integral(pw_pow(f, s), mu=mu).value
    int_gs = sugeno_integral(pw_pow(g, s), mu=mu).value
    int_prod = sugeno_integral(pw_pow(pw_product(f, g), s), mu=mu).value
    lhs = int_fs * int_gs
    rhs = int_prod
    context = {
        "f": _fn_config(f), "g": _fn_config(g), "s": s,
        "measure": mu.describe(),
        "integrals": {"f^s": int_fs, "g^s": int_gs, "(f*g)^s": int_prod},
    }
    return _mk_report("sugeno-diaz-metcalf", lhs, rhs, rhs - lhs, tol,
                      context, advisory, reason)


# ---------------------------------------------------------------------------
# Generated (pseudo) form

def check_pseudo_diaz_metcalf(f: PiecewiseFn, h: PiecewiseFn, s: float,
                              sr: Union[GGenerated, Generator],
                              tol: float = TOL_INEQ) -> InequalityReport:
    """Generated integral of f^s (*) h^s against the product of integrals."""
    if not s > 1:
        raise PreconditionError("power s must exceed 1")
    gen = _gen_of(sr)
    sr = sr if isinstance(sr, GGenerated) else GGenerated(sr)
    advisory, reason = _comono_advisory(f, h)
    fs = pw_pow(f, s)
    hs = pw_pow(h, s)
    lhs = pseudo_product_integral(sr, [fs, hs]).value
    int_fs = g_integral(sr, fs).value
    int_hs = g_integral(sr, hs).value
    rhs = pseudo_mul(sr, int_fs, int_hs)
    context = {
        "f": _fn_config(f), "h": _fn_config(h), "s": s,
        "semiring": sr.describe(),
        "integrals": {"f^s": int_fs, "h^s": int_hs, "product": lhs},
    }
    return _mk_report("pseudo-diaz-metcalf", lhs, rhs, lhs - rhs, tol,
                      context, advisory, reason)


# ---------------------------------------------------------------------------
# Sup-measure form, with the lambda convergence trace

def check_sup_diaz_metcalf(f: PiecewiseFn, h: PiecewiseFn, s: float,
                           gen: Generator, psi: SupMeasureDensity,
                           lambdas: Sequence[float] = (1, 4, 16, 64, 256),
                           tol: float = TOL_INEQ) -> InequalityReport:
    """Sup-integral form of the generated inequality.

    Both sides are sup-integrals against the density; the report also
    carries the lambda-schedule values of each side to exhibit convergence
    of the generator-power integrals to the sup form.
    """
    if not s > 1:
        raise PreconditionError("power s must exceed 1")
    sr = SupMeasure(psi, gen)
    advisory, reason = _comono_advisory(f, h)
    fs = pw_pow(f, s)
    hs = pw_pow(h, s)
    lhs = sup_product_integral(sr, [fs, hs]).value
    int_fs = sup_integral(fs, sr).value
    int_hs = sup_integral(hs, sr).value
    rhs = pseudo_mul(sr, int_fs, int_hs)
    lams = [float(l) for l in lambdas]
    trace_lhs = lambda_product_trace(sr, [fs, hs], lams)
    trace_f = lambda_product_trace(sr, [fs], lams)
    trace_h = lambda_product_trace(sr, [hs], lams)
    trace_rhs = [pseudo_mul(sr, a, b) for a, b in zip(trace_f, trace_h)]
    context = {
        "f": _fn_config(f), "h": _fn_config(h), "s": s,
        "semiring": sr.describe(),
        "integrals": {"f^s": int_fs, "h^s": int_hs, "product": lhs},
        "lambda_trace": {"lambdas": lams, "lhs": trace_lhs, "rhs": trace_rhs},
    }
    return _mk_report("sup-diaz-metcalf", lhs, rhs, lhs - rhs, tol,
                      context, advisory, reason)


# ---------------------------------------------------------------------------
# Transformed form: phi must commute with the pseudo-multiplication

def _phi_probe_commutation(phi: Generator, sr: Semiring):
    gen = _gen_of(sr)
    a, b = gen.interval
    lattice = np.linspace(a + 0.02 * (b - a), a + 0.7 * (b - a), 10)
    checked = 0
    worst = 0.0
    for x in lattice:
        for y in lattice:
            try:
                left = phi.g(pseudo_mul(sr, float(x), float(y)))
                right = pseudo_mul(sr, phi.g(float(x)), phi.g(float(y)))
            except Exception:
                continue
            checked += 1
            worst = max(worst, abs(left - right))
    if checked < _PHI_PROBES // 2:
        raise PreconditionError("could not probe commutation inside the value interval")
    if worst > 1e-9:
        raise PreconditionError(
            f"phi does not commute with the pseudo-multiplication "
            f"(worst deviation {worst!r})")


def check_phi_diaz_metcalf(f: PiecewiseFn, h: PiecewiseFn, s: float,
                           sr: Union[GGenerated, Generator],
                           phi: Union[Expr, str, Generator],
                           tol: float = TOL_INEQ) -> InequalityReport:
    """Transformed inequality phi^{-1}(int phi((f (*) h)^s)) vs the product side.

    Requires phi continuous, strictly increasing and commuting with the
    pseudo-multiplication.  Comonotone operands keep the forward direction;
    countermonotone operands flip it, and the slack is signed against the
    flipped expectation.
    """
    if not s > 1:
        raise PreconditionError("power s must exceed 1")
    gen = _gen_of(sr)
    sr = sr if isinstance(sr, GGenerated) else GGenerated(sr)
    if not isinstance(phi, Generator):
        phi = Generator(phi, gen.interval)
    if not phi.increasing:
        raise PreconditionError("phi must be strictly increasing")
    _phi_probe_commutation(phi, sr)
    co = comonotone(f, h)
    counter = countermonotone(f, h)
    direction = "forward" if co or not counter else "reversed"
    advisory = not (co or counter)
    reason = ("operands are neither comonotone nor countermonotone on the "
              "sampled grid") if advisory else None

    def phi_of(fn: PiecewiseFn) -> PiecewiseFn:
        from .exprdsl import pw_map
        return pw_map(fn, lambda e: substitute(phi.expr, e))

    fs = pw_pow(f, s)
    hs = pw_pow(h, s)
    # commutation makes phi((f (*) h)^s) = phi(f^s) (*) phi(h^s)
    lhs = phi.inv(pseudo_product_integral(sr, [phi_of(fs), phi_of(hs)]).value)
    int_f = phi.inv(g_integral(sr, phi_of(fs)).value)
    int_h = phi.inv(g_integral(sr, phi_of(hs)).value)
    rhs = pseudo_mul(sr, int_f, int_h)
    slack = lhs - rhs if direction == "forward" else rhs - lhs
    context = {
        "f": _fn_config(f), "h": _fn_config(h), "s": s,
        "semiring": sr.describe(),
        "phi": format_expr(phi.expr, var="t"),
        "integrals": {"phi(f^s)": int_f, "phi(h^s)": int_h, "product": lhs},
    }
    return _mk_report("phi-diaz-metcalf", lhs, rhs, slack, tol, context,
                      advisory, reason, direction)


# ---------------------------------------------------------------------------
# Chebyshev-type product inequality (no power)

def check_pseudo_chebyshev(u: PiecewiseFn, v: PiecewiseFn,
                           sr: Union[GGenerated, Generator],
                           tol: float = TOL_INEQ) -> InequalityReport:
    """int (u (*) v) >= (int u) (*) (int v) for comonotone operands."""
    sr = sr if isinstance(sr, GGenerated) else GGenerated(sr)
    advisory, reason = _comono_advisory(u, v)
    lhs = pseudo_product_integral(sr, [u, v]).value
    int_u = g_integral(sr, u).value
    int_v = g_integral(sr, v).value
    rhs = pseudo_mul(sr, int_u, int_v)
    context = {
        "u": _fn_config(u), "v": _fn_config(v), "semiring": sr.describe(),
        "integrals": {"u": int_u, "v": int_v, "product": lhs},
    }
    return _mk_report("pseudo-chebyshev", lhs, rhs, lhs - rhs, tol,
                      context, advisory, reason)


# ---------------------------------------------------------------------------
# Stolarsky-type inequality for decreasing integrands on [0, 1]

def check_stolarsky(f: PiecewiseFn, a: float, b: float,
                    tol: float = TOL_INEQ) -> InequalityReport:
    """int f(x^(1/(a+b))) >= int f(x^(1/a)) * int f(x^(1/b)), Lebesgue Sugeno."""
    if a <= 0 or b <= 0:
        raise PreconditionError("exponent parameters must be positive")
    cls = classify_monotonicity(f)
    if cls is not MonotonicityClass.STRICTLY_DECREASING:
        raise PreconditionError(
            f"integrand must be strictly decreasing, classified {cls.value}")
    from .measures import inf_on, sup_on
    if inf_on(f) < -1e-9 or sup_on(f) > 1.0 + 1e-9:
        raise PreconditionError("integrand must map [0, 1] into [0, 1]")
    lhs = sugeno_integral(pw_precompose_power(f, a + b)).value
    int_a = sugeno_integral(pw_precompose_power(f, a)).value
    int_b = sugeno_integral(pw_precompose_power(f, b)).value
    rhs = int_a * int_b
    context = {
        "f": _fn_config(f), "a": a, "b": b,
        "measure": {"type": "lebesgue"},
        "integrals": {"joint": lhs, "a": int_a, "b": int_b},
    }
    return _mk_report("stolarsky", lhs, rhs, lhs - rhs, tol, context)
