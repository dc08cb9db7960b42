"""Taylor-type expansion of matrix functions f(lam + tau) around a diagonal matrix."""

__version__ = "0.1.0"

from .contour import (
    Contour,
    QuadratureSettings,
    cauchy_coefficient,
    choose_contour,
    matrix_function_resolvent,
    resolvent_term,
    resolvent_terms,
)
from .divided import cluster_nodes, coefficient_A, coefficient_A1, divided_difference
from .errors import (
    BudgetError,
    ContourError,
    ConvergenceError,
    DepthError,
    DimensionError,
    DomainError,
    ExpansionError,
    ParseError,
    RadiusError,
    SolveError,
    ZeroEigenvalueError,
)
from .expansion import (
    ConvergenceProfile,
    ExpansionResult,
    convergence_profile,
    expand,
    matrix_taylor_oracle,
)
from .functions import (
    AnalyticFunction,
    cosine,
    eval_derivative,
    evaluate,
    exponential,
    logarithm,
    monomial,
    parse_function,
    polynomial,
    reciprocal_shift,
    sine,
    taylor_coefficient,
)
from .lemma import (
    coefficient_from_B,
    conjugation_identity_check,
    epsilon_matrix,
    expand_monomial_lemma,
    path_coefficient_B,
    path_coefficient_B_direct,
)
from .problem import format_problem, parse_problem
