"""Sugeno and generated (pseudo) integrals of piecewise functions, with
checkers for the ratio-bounded product inequalities they satisfy."""

from . import backend
from .errors import (ConfigError, DomainMismatchError, EvalDomainError,
                     FuzzintError, MeasureError, ParseError,
                     PreconditionError, QuadratureError, RangeEscapeError)
from .exprdsl import (Expr, MonotonicityClass, PiecewiseFn,
                      classify_monotonicity, comonotone, countermonotone,
                      eval_expr, format_expr, parse_expr, pw_combine, pw_map,
                      pw_pow, pw_precompose_power, pw_product, pw_reflect)
from .measures import (FuzzyMeasure, IntervalUnion, SupMeasureDensity,
                       ess_sup, level_set, measure)
from .sugeno import (SugenoResult, fixed_point_decreasing,
                     fixed_point_increasing, sugeno_integral, sugeno_oracle)
from .pseudo import (Generator, GGenerated, MaxPlusFamily, PseudoIntegralResult,
                     SupMeasure, g_integral, lambda_limit_integral,
                     pseudo_add, pseudo_mul, pseudo_product_integral,
                     semiring_from_config, semiring_law_deviations,
                     sup_integral, sup_product_integral)
from .inequalities import (InequalityReport, check_classical_diaz_metcalf,
                           check_phi_diaz_metcalf, check_pseudo_chebyshev,
                           check_pseudo_diaz_metcalf, check_stolarsky,
                           check_sugeno_diaz_metcalf, check_sup_diaz_metcalf)
from .harness import (SuiteResult, fuzz_sweep, reproduce_reference_suite,
                      run_config)

__version__ = "0.1.0"
