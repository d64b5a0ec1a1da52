"""Closed-form query-complexity bound evaluators, the hypergeometric tail
bound, a Monte Carlo estimator of the lower-bound chi-square overlap quantity,
and the exponent-plane phase classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .divergences import BernPair, chi_square, kl, kl_bernoulli
from .errors import ParameterError
from .strategies import NON_ADAPTIVE, QueryPlan

IMPOSSIBLE = "impossible"
CONJECTURALLY_HARD = "conjecturally_hard"
HARD = "hard"
EASY = "easy"

NON_ADAPTIVE_MODE = "non_adaptive"
ADAPTIVE_MODE = "adaptive"


@dataclass(frozen=True)
class BoundReport:
    statistical_lower_Q: float
    adaptive_lower_Q: float
    scan_sufficient_Q: float
    scan_sufficient_Q_chi: float
    degree_sufficient_Q: float
    min_k: float
    inputs: dict = field(default_factory=dict)
    # log(n) variants of the log(n/k) formulas, populated when they differ
    # from the primary values by more than 1%
    log_n_variants: dict | None = None

    def to_json(self) -> dict:
        out = {
            "statistical_lower_Q": self.statistical_lower_Q,
            "adaptive_lower_Q": self.adaptive_lower_Q,
            "scan_sufficient_Q": self.scan_sufficient_Q,
            "scan_sufficient_Q_chi": self.scan_sufficient_Q_chi,
            "degree_sufficient_Q": self.degree_sufficient_Q,
            "min_k": self.min_k,
            "inputs": dict(self.inputs),
        }
        if self.log_n_variants:
            out["log_n_variants"] = dict(self.log_n_variants)
        return out


def budget_bounds(n: int, k: int, pair: BernPair, epsilon: float = 0.0,
                    delta: float = 1.0, chi_constant: float = 8.0,
                    degree_constant: float = 1.0, epsilon0: float | None = None,
                    base: float = math.e) -> BoundReport:
    """Evaluate every query-complexity bound formula at the given parameters.

    `chi_constant` is the constant (at least 8) in the chi-square-flavored scan
    condition; `degree_constant` is the undetermined constant hidden by the
    big-O of the degree-test bound, default 1 and calibrated empirically.
    """
    if not (0.0 <= pair.q < pair.p <= 1.0):
        raise ParameterError(f"need 0 <= q < p <= 1, got p={pair.p}, q={pair.q}")
    if not (0.0 < pair.q < 1.0):
        raise ParameterError(f"q={pair.q} must lie strictly in (0,1)")
    if not 0.0 <= epsilon < 2.0:
        raise ParameterError(f"epsilon={epsilon} must be in [0,2)")
    if not 0.0 < delta <= 1.0:
        raise ParameterError(f"delta={delta} must be in (0,1]")
    if epsilon0 is None:
        epsilon0 = epsilon
    dist = pair.pair()
    chi2 = chi_square(dist)
    chi4 = chi2 * chi2
    dkl = kl(dist, base=base)
    ln = math.log(base)  # one "log" unit in the chosen base, measured in nats

    def log_b(x):
        return math.log(x) / ln

    ratio = n * n / (k * k)
    log_nk_sq = log_b(n / k) ** 2
    log_n_sq = log_b(n) ** 2
    stat_lower = (2.0 - epsilon) * ratio / chi4 * log_nk_sq
    scan_kl = (2.0 + epsilon) * ratio / (dkl * dkl) * log_nk_sq
    scan_chi = (2.0 + epsilon) * chi_constant * ratio / chi4 * log_nk_sq
    degree_q = degree_constant * (n ** 3 / k ** 3) * log_b(n) ** 3 / chi2
    variants = None
    if abs(log_n_sq - log_nk_sq) > 0.01 * log_nk_sq:
        scale = log_n_sq / log_nk_sq
        variants = {
            "statistical_lower_Q": stat_lower * scale,
            "adaptive_lower_Q": delta * stat_lower * scale,
            "scan_sufficient_Q": scan_kl * scale,
            "scan_sufficient_Q_chi": scan_chi * scale,
        }
    return BoundReport(
        statistical_lower_Q=stat_lower,
        adaptive_lower_Q=delta * stat_lower,
        scan_sufficient_Q=scan_kl,
        scan_sufficient_Q_chi=scan_chi,
        degree_sufficient_Q=degree_q,
        min_k=(2.0 + epsilon0) * log_b(n) / dkl,
        inputs={"n": n, "k": k, "p": pair.p, "q": pair.q, "epsilon": epsilon,
                "delta": delta, "chi_constant": chi_constant,
                "degree_constant": degree_constant, "epsilon0": epsilon0,
                "log_base": base, "chi_square": chi2, "kl": dkl},
        log_n_variants=variants,
    )


def planted_count_bound(budget: int, n: int, k: int, delta: float,
                         mode: str = NON_ADAPTIVE_MODE,
                         chi2_prime: float = 0.0) -> float:
    """High-probability (1 - delta) upper bound on the planted-query count."""
    if budget < 1:
        raise ParameterError("budget must be at least 1")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta={delta} must be in (0,1)")
    if chi2_prime < 0.0:
        raise ParameterError("chi2_prime must be nonnegative")
    base_rate = budget * k * k / (n * n)
    if mode == NON_ADAPTIVE_MODE:
        return base_rate * (1.0 + (1.0 / math.sqrt(delta)) * n / (k * math.sqrt(budget)))
    if mode == ADAPTIVE_MODE:
        return (base_rate / delta
                * math.sqrt(1.0 + n * n / (budget * k * k))
                * math.sqrt(1.0 + chi2_prime))
    raise ParameterError(f"unknown mode {mode!r}")


def hypergeom_tail_upper(n: int, k: int, h: int) -> float:
    """Analytic bound on P(H >= h) for H ~ Hypergeometric(n, k, k) overlaps."""
    if not 0 <= h <= k <= n:
        raise ParameterError(f"need 0 <= h <= k <= n, got h={h}, k={k}, n={n}")
    rho = k / n
    a = h / k
    if a < rho:
        raise ParameterError(f"tail bound needs h/k >= k/n, got {a} < {rho}")
    return math.exp(-k * kl_bernoulli(a, rho))


def chi_square_overlap_estimate(plan: QueryPlan, n: int, k: int, chi2: float,
                                trials: int, seed) -> tuple[float, float]:
    """Monte Carlo estimate (value, standard error) of the chi-square of the
    induced testing problem, via the overlap decomposition: the mean over
    independent planted-set pairs of (1 + chi2)^(shared planted queries) - 1.
    """
    if plan.kind != NON_ADAPTIVE:
        raise ParameterError("the overlap decomposition needs a non-adaptive plan")
    if not math.isfinite(chi2) or chi2 < 0.0:
        raise ParameterError("per-entry chi-square must be finite and nonnegative")
    if trials < 1:
        raise ParameterError("need at least one trial")
    rng = np.random.default_rng(seed)
    pair_keys = set((plan.pairs[:, 0] * np.int64(n) + plan.pairs[:, 1]).tolist())
    # restrict sampling bookkeeping to vertices the plan actually touches
    touched = np.unique(plan.pairs)
    touched_set = frozenset(touched.tolist())
    values = np.empty(trials)
    for t in range(trials):
        k1 = rng.choice(n, size=k, replace=False)
        k2 = rng.choice(n, size=k, replace=False)
        common = np.intersect1d(k1, k2, assume_unique=True)
        common = [v for v in common.tolist() if v in touched_set]
        count = 0
        for a in range(len(common)):
            for b in range(a + 1, len(common)):
                if common[a] * n + common[b] in pair_keys:
                    count += 1
        values[t] = (1.0 + chi2) ** count - 1.0
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


@dataclass(frozen=True)
class PhasePoint:
    alpha: float  # query exponent, Q ~ n^alpha
    beta: float  # planted-size exponent, k ~ n^beta

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ParameterError(f"alpha={self.alpha} must be in (0,2)")
        if not 0.0 < self.beta < 1.0:
            raise ParameterError(f"beta={self.beta} must be in (0,1)")


def classify_phase(point: PhasePoint) -> str:
    """Assign the exponent pair to its detectability region.

    Boundaries resolve conservatively: the impossibility line belongs to
    `impossible`, and region borders go to the harder label.
    """
    alpha, beta = point.alpha, point.beta
    if alpha <= 2.0 - 2.0 * beta:
        return IMPOSSIBLE
    if beta <= 0.5:
        return HARD
    if alpha <= 3.0 - 3.0 * beta:
        return CONJECTURALLY_HARD
    return EASY
