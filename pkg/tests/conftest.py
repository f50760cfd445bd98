"""Shared fixtures: the reference operand functions with independent
hand-coded closures, used as evaluation oracles throughout the suite."""

import math

import numpy as np
import pytest

from fuzzint import PiecewiseFn


def plateau_f() -> PiecewiseFn:
    return PiecewiseFn.from_pairs([
        ((0.0, 0.25, True, True), "sqrt(x)"),
        ((0.25, 0.5, False, False), "sqrt(2)/2"),
        ((0.5, 1.0, True, True), "sqrt(x)"),
    ])


def plateau_g() -> PiecewiseFn:
    return PiecewiseFn.from_pairs([
        ((0.0, 0.5, True, False), "x"),
        ((0.5, 1.0, True, True), "sqrt(x)"),
    ])


def _plateau_f_closure(x: float) -> float:
    if x <= 0.25 or x >= 0.5:
        return math.sqrt(x)
    return math.sqrt(2.0) / 2.0


def _plateau_g_closure(x: float) -> float:
    return x if x < 0.5 else math.sqrt(x)


# name -> (builder, independent closure)
REFERENCE_FNS = {
    "linear": (lambda: PiecewiseFn.from_expr("x"), lambda x: x),
    "half-linear": (lambda: PiecewiseFn.from_expr("x/2"), lambda x: x / 2.0),
    "quarter-linear": (lambda: PiecewiseFn.from_expr("x/4"), lambda x: x / 4.0),
    "half-sqrt": (lambda: PiecewiseFn.from_expr("sqrt(x)/2"),
                  lambda x: math.sqrt(x) / 2.0),
    "square": (lambda: PiecewiseFn.from_expr("x^2"), lambda x: x * x),
    "square-quarter": (lambda: PiecewiseFn.from_expr("x^2/4"),
                       lambda x: x * x / 4.0),
    "square-16th": (lambda: PiecewiseFn.from_expr("x^2/16"),
                    lambda x: x * x / 16.0),
    "cube-64th": (lambda: PiecewiseFn.from_expr("x^3/64"),
                  lambda x: x ** 3 / 64.0),
    "affine-up": (lambda: PiecewiseFn.from_expr("x+1"), lambda x: x + 1.0),
    "affine-up-cubed": (lambda: PiecewiseFn.from_expr("(x+1)^3"),
                        lambda x: (x + 1.0) ** 3),
    "reciprocal-shift": (lambda: PiecewiseFn.from_expr("1/(x+1)"),
                         lambda x: 1.0 / (x + 1.0)),
    "reciprocal-shift-cubed": (lambda: PiecewiseFn.from_expr("(1/(x+1))^3"),
                               lambda x: (1.0 / (x + 1.0)) ** 3),
    "plateau-f": (plateau_f, _plateau_f_closure),
    "plateau-g": (plateau_g, _plateau_g_closure),
}


@pytest.fixture(scope="session")
def reference_fns():
    return {name: (build(), closure)
            for name, (build, closure) in REFERENCE_FNS.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
