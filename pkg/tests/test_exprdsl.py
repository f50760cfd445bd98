import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fuzzint import (EvalDomainError, MonotonicityClass, ParseError,
                     PiecewiseFn, classify_monotonicity, comonotone,
                     countermonotone, format_expr, parse_expr,
                     pw_pow, pw_product, pw_reflect)
from fuzzint.exprdsl import Binary, Const, Power, Unary, Var, eval_expr

from conftest import plateau_f, plateau_g


class TestParsing:
    def test_scaled_sqrt(self):
        e = parse_expr("0.5*sqrt(x)")
        assert e == Binary("*", Const(0.5), Unary("sqrt", Var()))

    def test_bare_variable(self):
        assert parse_expr("x") == Var()

    def test_cubed_affine(self):
        e = parse_expr("(x+1)^3")
        assert e == Power(Binary("+", Var(), Const(1.0)), Fraction(3))

    def test_precedence_pow_over_div(self):
        e = parse_expr("x^2/4")
        assert e == Binary("/", Power(Var(), Fraction(2)), Const(4.0))

    def test_rational_exponent_keeps_fraction(self):
        e = parse_expr("x^(1/3)")
        assert e == Power(Var(), Fraction(1, 3))

    def test_pow_right_associative(self):
        e = parse_expr("x^2^3")
        assert e == Power(Var(), Fraction(8))

    def test_unknown_identifier_offset(self):
        with pytest.raises(ParseError) as exc:
            parse_expr("0.5*sqrt(y)")
        assert exc.value.offset == 9

    def test_syntax_error_offset(self):
        with pytest.raises(ParseError) as exc:
            parse_expr("x+*2")
        assert exc.value.offset == 2

    def test_empty_and_non_ascii(self):
        with pytest.raises(ParseError):
            parse_expr("")
        with pytest.raises(ParseError):
            parse_expr("x²")

    def test_non_constant_exponent(self):
        with pytest.raises(ParseError):
            parse_expr("x^x")

    def test_custom_variable(self):
        e = parse_expr("t^2", var="t")
        assert e == Power(Var(), Fraction(2))
        with pytest.raises(ParseError):
            parse_expr("x", var="t")


# -- round-trip stability ----------------------------------------------------

_consts = st.one_of(
    st.integers(min_value=-50, max_value=50).map(float),
    st.floats(min_value=-100.0, max_value=100.0, allow_nan=False,
              allow_infinity=False, width=64),
)
_exponents = st.one_of(
    st.fractions(min_value=-6, max_value=6, max_denominator=5),
    st.floats(min_value=0.1, max_value=4.0, allow_nan=False).filter(
        lambda v: not float(v).is_integer()),
)


def _exprs(depth):
    if depth == 0:
        return st.one_of(st.just(Var()), _consts.map(Const))
    sub = _exprs(depth - 1)
    return st.one_of(
        st.just(Var()),
        _consts.map(Const),
        st.tuples(st.sampled_from(["neg", "sqrt", "exp", "ln", "abs"]), sub)
          .map(lambda t: Unary(*t)),
        st.tuples(st.sampled_from(["+", "-", "*", "/"]), sub, sub)
          .map(lambda t: Binary(*t)),
        st.tuples(sub, _exponents).map(lambda t: Power(*t)),
    )


@settings(max_examples=300, deadline=None)
@given(_exprs(3))
def test_roundtrip_parse_print_parse(e):
    text = format_expr(e)
    again = parse_expr(text)
    assert again == e
    assert parse_expr(format_expr(again)) == again


# -- evaluation ---------------------------------------------------------------

def test_eval_matches_closures(reference_fns, rng):
    for name, (f, closure) in reference_fns.items():
        a, b = f.domain
        xs = rng.uniform(a, b, 100)
        for x in xs:
            assert abs(f.eval(float(x)) - closure(float(x))) <= 1e-12, name


def test_eval_boundary_ownership():
    f = plateau_f()
    assert f.eval(0.3) == pytest.approx(math.sqrt(2) / 2, abs=1e-12)
    assert f.eval(0.25) == pytest.approx(0.5, abs=1e-15)  # closed on the left piece
    assert f.eval(0.5) == pytest.approx(math.sqrt(0.5), abs=1e-15)
    g = plateau_g()
    assert g.eval(0.5) == pytest.approx(math.sqrt(0.5), abs=1e-15)


def test_eval_simple_points():
    assert PiecewiseFn.from_expr("x/2").eval(1.0) == 0.5
    assert PiecewiseFn.from_expr("3.25").eval(0.7) == 3.25


def test_eval_outside_domain():
    f = PiecewiseFn.from_expr("x")
    with pytest.raises(EvalDomainError):
        f.eval(1.5)


def test_domain_faults_raise_not_nan():
    with pytest.raises(EvalDomainError):
        eval_expr(parse_expr("sqrt(x-2)"), 1.0)
    with pytest.raises(EvalDomainError):
        eval_expr(parse_expr("ln(x)"), 0.0)
    with pytest.raises(EvalDomainError):
        eval_expr(parse_expr("1/x"), 0.0)
    # construction validates finiteness on the closure
    with pytest.raises(EvalDomainError):
        PiecewiseFn.from_expr("ln(x)", (0.0, 1.0))


def test_rational_powers_of_negative_base():
    cube_root = PiecewiseFn.from_expr("(x-1)^(1/3)")
    assert cube_root.eval(0.0) == pytest.approx(-1.0, abs=1e-12)
    assert cube_root.eval(0.875) == pytest.approx(-0.5, abs=1e-12)
    even_p = PiecewiseFn.from_expr("(x-1)^(2/3)")
    assert even_p.eval(0.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(EvalDomainError):
        PiecewiseFn.from_expr("(x-1)^(1/2)")
    with pytest.raises(EvalDomainError):
        PiecewiseFn.from_expr("(x-1)^1.5")


# -- piecewise validation -----------------------------------------------------

class TestTiling:
    def test_gap_rejected(self):
        with pytest.raises(ValueError, match="gap"):
            PiecewiseFn.from_pairs([((0, 0.4), "x"), ((0.5, 1), "x")])

    def test_overlap_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            PiecewiseFn.from_pairs([((0, 0.6), "x"), ((0.5, 1), "x")])

    def test_double_ownership_rejected(self):
        with pytest.raises(ValueError, match="both claim"):
            PiecewiseFn.from_pairs([((0, 0.5, True, True), "x"),
                                    ((0.5, 1, True, True), "x")])

    def test_orphan_boundary_rejected(self):
        with pytest.raises(ValueError, match="neither claims"):
            PiecewiseFn.from_pairs([((0, 0.5, True, False), "x"),
                                    ((0.5, 1, False, True), "x")])

    def test_open_domain_endpoint_rejected(self):
        with pytest.raises(ValueError):
            PiecewiseFn.from_pairs([((0, 1, False, True), "x")])

    def test_interval_strings(self):
        f = PiecewiseFn.from_pairs([("[0, 1/4]", "x"), ("(1/4, 1]", "1/4")])
        assert f.eval(0.25) == 0.25
        assert f.eval(0.3) == 0.25


# -- monotonicity and comonotonicity ------------------------------------------

class TestShape:
    def test_classify_examples(self):
        assert classify_monotonicity(PiecewiseFn.from_expr("x/2")) \
            is MonotonicityClass.STRICTLY_INCREASING
        assert classify_monotonicity(PiecewiseFn.from_expr("1/(x+1)")) \
            is MonotonicityClass.STRICTLY_DECREASING
        assert classify_monotonicity(PiecewiseFn.from_expr("0.7")) \
            is MonotonicityClass.CONSTANT
        assert classify_monotonicity(plateau_f()) \
            is MonotonicityClass.NON_MONOTONE

    def test_grid_n_validation(self):
        with pytest.raises(ValueError):
            classify_monotonicity(PiecewiseFn.from_expr("x"), grid_n=2)

    def test_reflection_flips_direction(self):
        for text in ("x", "x^2", "0.3*x+0.7*x^3"):
            f = PiecewiseFn.from_expr(text)
            assert classify_monotonicity(f) is MonotonicityClass.STRICTLY_INCREASING
            assert classify_monotonicity(pw_reflect(f)) \
                is MonotonicityClass.STRICTLY_DECREASING

    def test_comonotone_examples(self):
        half = PiecewiseFn.from_expr("x/2")
        ident = PiecewiseFn.from_expr("x")
        assert comonotone(half, ident)
        up = PiecewiseFn.from_expr("x+1")
        down = PiecewiseFn.from_expr("1/(x+1)")
        assert not comonotone(up, down)
        assert countermonotone(up, down)
        const = PiecewiseFn.from_expr("2")
        assert comonotone(const, down)
        assert comonotone(const, up)

    def test_comonotone_self_and_symmetry(self, reference_fns):
        for name, (f, _) in reference_fns.items():
            assert comonotone(f, f), name
        f, _ = reference_fns["plateau-f"]
        g, _ = reference_fns["plateau-g"]
        assert comonotone(f, g) == comonotone(g, f)
        assert comonotone(f, g)  # plateau does not break comonotonicity


# -- combinators ---------------------------------------------------------------

class TestCombinators:
    def test_product_of_plateau_pair(self):
        f, g = plateau_f(), plateau_g()
        prod = pw_product(f, g)
        for x in (0.0, 0.1, 0.25, 0.3, 0.5, 0.7, 1.0):
            assert prod.eval(x) == pytest.approx(f.eval(x) * g.eval(x), abs=1e-12)

    def test_point_segment_for_orphan_boundary(self):
        f = PiecewiseFn.from_pairs([((0, 0.5, True, False), "x"),
                                    ((0.5, 1, True, True), "x+1")])
        g = PiecewiseFn.from_pairs([((0, 0.5, True, True), "2*x"),
                                    ((0.5, 1, False, True), "x")])
        prod = pw_product(f, g)
        # at 0.5 the owners disagree: f uses x+1, g uses 2*x
        assert prod.eval(0.5) == pytest.approx((0.5 + 1) * (2 * 0.5), abs=1e-12)
        assert prod.eval(0.499) == pytest.approx(0.499 * 0.998, abs=1e-12)
        assert prod.eval(0.501) == pytest.approx(1.501 * 0.501, abs=1e-12)

    def test_pw_pow_integer_and_real(self, rng):
        f = plateau_g()
        sq = pw_pow(f, 2)
        ps = pw_pow(f, 1.5)
        for x in rng.uniform(0, 1, 25):
            x = float(x)
            assert sq.eval(x) == pytest.approx(f.eval(x) ** 2, abs=1e-12)
            assert ps.eval(x) == pytest.approx(f.eval(x) ** 1.5, abs=1e-12)

    def test_combine_requires_shared_domain(self):
        from fuzzint import DomainMismatchError
        with pytest.raises(DomainMismatchError):
            pw_product(PiecewiseFn.from_expr("x", (0, 1)),
                       PiecewiseFn.from_expr("x", (0, 2)))

    def test_config_roundtrip(self):
        f = plateau_f()
        again = PiecewiseFn.from_config(f.to_config())
        xs = np.linspace(0, 1, 37)
        assert np.allclose(f.eval_many(xs), again.eval_many(xs), atol=0)
