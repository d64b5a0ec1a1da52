"""Query-budgeted detection of planted dense subgraphs.

Instance generators with lazy seeded edges, a budgeted edge-query oracle,
scan and degree detectors, query-complexity bound evaluators, and a Monte
Carlo risk harness.
"""

from .bounds import (
    BoundReport,
    PhasePoint,
    chi_square_overlap_estimate,
    classify_phase,
    hypergeom_tail_upper,
    planted_count_bound,
    budget_bounds,
)
from .detectors import (
    DegreeConfig,
    DetectorVerdict,
    ScanConfig,
    degree_test,
    scan_test,
)
from .divergences import BernPair, Bernoulli, DistributionPair, Gaussian, binom2, chi_square, kl
from .harness import RiskEstimate, TrialConfig, estimate_risk, run_trial, sweep
from .model import H0, H1, Instance, ModelParams, edge_value, edge_values, sample_instance
from .oracle import BudgetedOracle
from .strategies import (
    QueryPlan,
    bipartite_pattern_plan,
    clique_pattern_plan,
    greedy_adaptive_rule,
    uniform_plan,
)

__all__ = [
    "BernPair", "Bernoulli", "BoundReport", "BudgetedOracle", "DegreeConfig",
    "DetectorVerdict", "DistributionPair", "Gaussian", "H0", "H1", "Instance",
    "ModelParams", "PhasePoint", "QueryPlan", "RiskEstimate", "ScanConfig",
    "TrialConfig", "binom2", "bipartite_pattern_plan", "chi_square",
    "chi_square_overlap_estimate", "classify_phase", "clique_pattern_plan",
    "degree_test", "edge_value", "edge_values", "estimate_risk",
    "greedy_adaptive_rule", "hypergeom_tail_upper", "kl",
    "planted_count_bound", "run_trial", "sample_instance", "scan_test",
    "sweep", "budget_bounds", "uniform_plan",
]
