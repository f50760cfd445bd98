import math

import numpy as np
import pytest
from scipy.integrate import quad

from fuzzint import (Generator, GGenerated, MaxPlusFamily,
                     PiecewiseFn, PreconditionError, QuadratureError,
                     RangeEscapeError, SupMeasure, SupMeasureDensity,
                     g_integral, lambda_limit_integral, pseudo_add,
                     pseudo_mul, pseudo_product_integral,
                     semiring_law_deviations, sup_integral)

UNIT = (0.0, 1.0)


def gg(text, interval=UNIT):
    return GGenerated(Generator(text, interval))


class TestGenerator:
    def test_family_detection(self):
        assert Generator("t", UNIT).family == ("power", 1.0)
        assert Generator("t^2", UNIT).family == ("power", 2.0)
        assert Generator("exp(t)", UNIT).family == ("exp", 1.0)
        assert Generator("exp(2*t)", UNIT).family == ("exp", 2.0)
        assert Generator("t^2+t", (0.0, 10.0)).family is None

    def test_rejects_non_monotone_or_negative(self):
        with pytest.raises(PreconditionError):
            Generator("t*(1-t)", UNIT)
        with pytest.raises(PreconditionError):
            Generator("0-t", UNIT)

    def test_inverse_roundtrip(self, rng):
        for text, interval in (("t", UNIT), ("t^2", UNIT), ("t^3", (0.0, 2.0)),
                               ("exp(2*t)", (0.0, 3.0)), ("t^2+t", (0.0, 10.0)),
                               ("1/(t+1)", (0.0, 5.0))):
            gen = Generator(text, interval)
            xs = rng.uniform(interval[0], interval[1], 100)
            for x in xs:
                x = float(x)
                assert abs(gen.inv(gen.g(x)) - x) <= 1e-9, text


class TestPseudoOps:
    def test_identity_generator_recovers_arithmetic(self):
        sr = gg("t", (0.0, 10.0))
        assert pseudo_add(sr, 2.0, 3.0) == pytest.approx(5.0, abs=1e-12)
        assert pseudo_mul(sr, 2.0, 3.0) == pytest.approx(6.0, abs=1e-12)

    def test_quadratic_generator(self):
        sr = gg("t^2", (0.0, 20.0))
        assert pseudo_add(sr, 3.0, 4.0) == pytest.approx(5.0, abs=1e-12)
        assert pseudo_mul(sr, 3.0, 4.0) == pytest.approx(12.0, abs=1e-12)

    def test_maxplus(self):
        sr = MaxPlusFamily(Generator("exp(t)", (0.0, 100.0)), 64.0)
        assert pseudo_add(sr, 2.0, 3.0) == 3.0
        assert pseudo_mul(sr, 2.0, 3.0) == pytest.approx(5.0, abs=1e-12)

    def test_unit_element(self):
        for sr in (gg("t^2", (0.0, 10.0)),
                   GGenerated(Generator("t^2+t", (0.0, 10.0)))):
            one = sr.gen.inv(1.0)
            for x in (0.0, 0.3, 2.5):
                assert pseudo_mul(sr, one, x) == pytest.approx(x, abs=1e-9)

    def test_range_escape(self):
        sr = gg("t^2", UNIT)
        with pytest.raises(RangeEscapeError):
            pseudo_add(sr, 0.9, 0.9)
        with pytest.raises(RangeEscapeError):
            pseudo_add(sr, 1.5, 0.1)

    def test_law_probes(self):
        families = [gg("t", UNIT), gg("t^2", UNIT), gg("t^3", UNIT),
                    GGenerated(Generator("exp(t)", (0.0, 10.0))),
                    GGenerated(Generator("t^2+t", (0.0, 10.0))),
                    MaxPlusFamily(Generator("exp(t)", (0.0, 50.0)), 16.0)]
        for sr in families:
            dev = semiring_law_deviations(sr, n_triples=100, seed=5)
            assert max(dev.values()) <= 1e-9, (sr, dev)


class TestSemiringConfig:
    def test_generated_config(self):
        from fuzzint import semiring_from_config
        sr = semiring_from_config({"type": "g", "g": "t^2", "interval": [0, 10]})
        assert isinstance(sr, GGenerated)
        assert pseudo_mul(sr, 2.0, 3.0) == pytest.approx(6.0, abs=1e-12)
        assert pseudo_add(sr, 3.0, 4.0) == pytest.approx(5.0, abs=1e-12)

    def test_maxplus_config(self):
        from fuzzint import semiring_from_config
        sr = semiring_from_config({"type": "maxplus", "lambda": 64})
        assert isinstance(sr, MaxPlusFamily)
        assert sr.lam == 64.0
        assert pseudo_add(sr, 2.0, 3.0) == 3.0
        assert pseudo_mul(sr, 2.0, 3.0) == pytest.approx(5.0, abs=1e-12)

    def test_supmeasure_config(self):
        from fuzzint import semiring_from_config
        sr = semiring_from_config({"type": "supmeasure", "psi": "0",
                                   "g": "exp(t)"})
        assert isinstance(sr, SupMeasure)
        assert sup_integral(PiecewiseFn.from_expr("x"), sr).value \
            == pytest.approx(1.0, abs=1e-9)

    def test_unknown_type(self):
        from fuzzint import semiring_from_config
        with pytest.raises(PreconditionError):
            semiring_from_config({"type": "bogus"})


class TestGIntegral:
    def test_identity_generator_is_ordinary_integral(self, reference_fns):
        sr = gg("t", (0.0, 10.0))
        for name, (f, closure) in reference_fns.items():
            got = g_integral(sr, f).value
            want, err = quad(closure, 0.0, 1.0, limit=200,
                             points=[float(p) for p in f.breakpoints()])
            assert abs(got - want) <= 1e-9, (name, got, want)

    def test_quadratic_generator_values(self):
        sr = gg("t^2")
        got = g_integral(sr, PiecewiseFn.from_expr("x")).value
        assert got == pytest.approx(math.sqrt(1 / 3), abs=1e-9)
        got2 = g_integral(sr, PiecewiseFn.from_expr("x^2/2")).value
        assert got2 == pytest.approx(math.sqrt(1 / 20), abs=1e-9)

    def test_breakpoints_are_panel_boundaries(self):
        f = PiecewiseFn.from_pairs([((0, 0.3, True, False), "x"),
                                    ((0.3, 1, True, True), "0.3")])
        got = g_integral(gg("t"), f).value
        assert got == pytest.approx(0.3 ** 2 / 2 + 0.7 * 0.3, abs=1e-12)

    def test_range_validation(self):
        f = PiecewiseFn.from_expr("x")
        with pytest.raises(RangeEscapeError):
            g_integral(gg("t^2", (0.0, 0.4)), f)

    def test_non_convergence_raises(self):
        f = PiecewiseFn.from_expr("x^0.1")
        with pytest.raises(QuadratureError):
            g_integral(gg("t"), f, max_panels=2 ** 14)

    def test_product_integral_matches_independent_quadrature(self):
        # lhs of the sqrt-pair scenario: integrand in g-space is x^4/4
        sr = gg("t^2")
        f2 = PiecewiseFn.from_expr("x")       # (sqrt x)^2
        h2 = PiecewiseFn.from_expr("x/2")     # (sqrt(x/2))^2
        got = pseudo_product_integral(sr, [f2, h2]).value
        want = math.sqrt(quad(lambda x: (x * x) * (x * x / 4), 0, 1)[0])
        assert got == pytest.approx(want, abs=1e-9)
        assert got == pytest.approx(math.sqrt(1 / 20), abs=1e-9)


class TestSupIntegral:
    def test_maxplus_zero_density(self):
        sr = SupMeasure(SupMeasureDensity(PiecewiseFn.from_expr("0")),
                        Generator("exp(t)", (0.0, 4.0)))
        assert sup_integral(PiecewiseFn.from_expr("x"), sr).value \
            == pytest.approx(1.0, abs=1e-9)

    def test_maxplus_linear_density(self):
        # additive combination: max of x^2 - x over [0, 1] is 0 at the ends
        psi = SupMeasureDensity(PiecewiseFn.from_expr("0-x", (0.0, 1.0)))
        sr = SupMeasure(psi, Generator("exp(t)", (-3.0, 3.0)))
        assert sup_integral(PiecewiseFn.from_expr("x^2"), sr).value \
            == pytest.approx(0.0, abs=1e-9)

    def test_product_semiring_hump(self):
        # generated product: max of x * (1 - x) is 1/4
        psi = SupMeasureDensity(PiecewiseFn.from_expr("1-x"))
        sr = SupMeasure(psi, Generator("t^2", UNIT))
        assert sup_integral(PiecewiseFn.from_expr("x"), sr).value \
            == pytest.approx(0.25, abs=1e-6)


class TestLambdaLimit:
    def test_closed_form_sequence(self):
        gen = Generator("t", UNIT)
        f = PiecewiseFn.from_expr("x")
        lams = (1, 2, 4, 8, 16, 32, 64, 128, 256)
        got = lambda_limit_integral(gen, f, lambdas=lams)
        want = [(1.0 / (l + 1)) ** (1.0 / l) for l in lams]
        assert np.allclose(got, want, atol=1e-6)

    def test_constant_is_fixed(self):
        gen = Generator("t", UNIT)
        f = PiecewiseFn.from_expr("0.73")
        got = lambda_limit_integral(gen, f, lambdas=(1, 4, 16))
        assert np.allclose(got, 0.73, atol=1e-9)

    def test_reflection_symmetry(self):
        gen = Generator("t", UNIT)
        a = lambda_limit_integral(gen, PiecewiseFn.from_expr("x"),
                                  lambdas=(1, 4, 16))
        b = lambda_limit_integral(gen, PiecewiseFn.from_expr("1-x"),
                                  lambdas=(1, 4, 16))
        assert np.allclose(a, b, atol=1e-9)

    def test_schedule_validation(self):
        gen = Generator("t", UNIT)
        f = PiecewiseFn.from_expr("x")
        with pytest.raises(PreconditionError):
            lambda_limit_integral(gen, f, lambdas=(4, 1))
        with pytest.raises(PreconditionError):
            lambda_limit_integral(gen, f, lambdas=(-1, 2))

    def test_approaches_supremum(self):
        from fuzzint.harness import random_positive_plateau
        gen = Generator("t", UNIT)
        f = random_positive_plateau(np.random.default_rng([7, 0]))
        vals = lambda_limit_integral(gen, f, lambdas=(1, 4, 16, 64, 256))
        errors = [abs(v - 1.0) for v in vals]
        assert errors[-1] <= 1e-2
        assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))
