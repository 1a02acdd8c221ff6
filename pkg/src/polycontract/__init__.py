"""Exact verification and synthesis of polynomial-type contraction certificates."""

__version__ = "0.1.0"

from .errors import InputError
from .exprlang import Expression, ParseError, evaluate, parse
from .metricspace import (
    FiniteMetricSpace,
    IntervalGridSpace,
    MetricVerdict,
    MetricViolation,
    discrete_space,
    power_distance,
    validate_metric,
)
from .mapping import (
    Branch,
    OrbitDecomposition,
    PiecewiseMap,
    TableMap,
    apply,
    discretize,
    fixed_points,
    is_picard_continuous,
    is_weakly_picard,
    orbit,
)
from .contraction import (
    AlmostPolynomialCertificate,
    CoefficientFamily,
    PolynomialCertificate,
    Verdict,
    check_lower_bound_condition,
    check_continuity_hypotheses,
    check_proposition_23_hypotheses,
    pair_values,
    verify_almost_contraction,
    verify_almost_polynomial,
    verify_banach,
    verify_kannan,
    verify_polynomial,
)
from .picard import (
    PicardTrace,
    apriori_bound,
    check_bound_against_trace,
    iterate,
    sigma_j0,
)
from .lp import Constraint, FeasibilityProblem, LPResult, lp_feasible
from .certsearch import SynthesisResult, synthesize_almost, synthesize_polynomial
