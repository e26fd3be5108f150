"""Hyperbolic-type metrics on punctured spaces.

Constructors for the one-point, averaged, and supremum scale-invariant
Cassinian metrics (plus the j-style boundary-distance metrics), a
four-point-condition delta engine with exact and sampled enumeration, and
numerical checkers for every metric axiom and quasi-triangle inequality
those constructions rely on.
"""

from .cassinian import (
    LOG2,
    ONE_POINT_VARIANTS,
    VARIANTS,
    PuncturedSpec,
    avg_tau,
    j_metric,
    j_tilde_metric,
    mu_P,
    mu_p,
    punctured_matrix,
    sup_tau,
    tau_p,
    tilde_avg_tau,
    tilde_tau_p,
)
from .delta import DeltaReport, exact_delta, quadruple_delta, sampled_delta
from .errors import InputError, PunctureDomainError
from .scenarios import (
    AVG_TAU_BOUND,
    AVG_TAU_BOUND_ALT,
    AVG_TILDE_BOUND,
    ONE_POINT_TAU_BOUND,
    ONE_POINT_TILDE_BOUND,
    ScenarioResult,
    arctan_family,
    four_point_counterexample,
    hyperbolicity_sweep,
)
from .spaces import (
    METRIC_NAMES,
    DistanceMatrix,
    PointCloud,
    arctan_split_distance,
    build_distance_matrix,
    euclidean_distance,
    load_distance_matrix,
    load_point_cloud,
    pairwise_distances,
    random_cloud,
    taxicab_distance,
)
from .verify import (
    DEFAULT_TOL,
    Violation,
    ViolationReport,
    check_lemma_K,
    check_lemma_nine,
    check_metric_axioms,
    check_mu_P_quasi_triangle,
    check_mu_bounds,
    check_product_lemma,
    check_ptolemaic,
    check_quasi_ptolemy,
    check_quasi_ptolemy_many,
    check_sandwich,
)

__version__ = "0.1.0"

__all__ = [
    "AVG_TAU_BOUND",
    "AVG_TAU_BOUND_ALT",
    "AVG_TILDE_BOUND",
    "DEFAULT_TOL",
    "DeltaReport",
    "DistanceMatrix",
    "InputError",
    "LOG2",
    "METRIC_NAMES",
    "ONE_POINT_TAU_BOUND",
    "ONE_POINT_TILDE_BOUND",
    "ONE_POINT_VARIANTS",
    "PointCloud",
    "PuncturedSpec",
    "PunctureDomainError",
    "ScenarioResult",
    "VARIANTS",
    "Violation",
    "ViolationReport",
    "arctan_family",
    "arctan_split_distance",
    "avg_tau",
    "build_distance_matrix",
    "check_lemma_K",
    "check_lemma_nine",
    "check_metric_axioms",
    "check_mu_P_quasi_triangle",
    "check_mu_bounds",
    "check_product_lemma",
    "check_ptolemaic",
    "check_quasi_ptolemy",
    "check_quasi_ptolemy_many",
    "check_sandwich",
    "euclidean_distance",
    "exact_delta",
    "four_point_counterexample",
    "hyperbolicity_sweep",
    "j_metric",
    "j_tilde_metric",
    "load_distance_matrix",
    "load_point_cloud",
    "mu_P",
    "mu_p",
    "pairwise_distances",
    "punctured_matrix",
    "quadruple_delta",
    "random_cloud",
    "sampled_delta",
    "sup_tau",
    "tau_p",
    "taxicab_distance",
    "tilde_avg_tau",
    "tilde_tau_p",
]
