"""The two detectors: a combinatorial scan over a sampled panel and a
polynomial-time high-degree count over a bipartite probe pattern.

Both consume nothing but oracle answers; panel sampling is driven by the
detector seed, never by the instance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .divergences import binom2
from .errors import InfeasibleConfigError
from .model import ModelParams
from .oracle import BudgetedOracle
from .strategies import QueryPlan, bipartite_pattern_plan, clique_pattern_plan

CHERNOFF_GAMMA = "chernoff_gamma"
BERNSTEIN_MIDPOINT = "bernstein_midpoint"

EXACT = "exact"
LOCAL_SEARCH = "local_search"
AUTO = "auto"

DEFAULT_ENUMERATION_CAP = 5_000_000
DEFAULT_RESTARTS = 50


@dataclass(frozen=True)
class DetectorVerdict:
    statistic: float
    threshold: float
    decision: int  # 1 = alternative, 0 = null
    mode: str
    approximate: bool = False

    def to_json(self) -> dict:
        return {
            "statistic": self.statistic,
            "threshold": self.threshold,
            "decision": self.decision,
            "mode": self.mode,
            "approximate_flag": self.approximate,
        }


def _derived_count(frac: float, k: int, m: int, n: int) -> int:
    # guard against float representation pushing an exact integer below itself
    return int(math.floor(frac * k * m / n + 1e-9))


@dataclass(frozen=True)
class ScanConfig:
    sample_size: int  # panel size M; implied budget C(M, 2)
    epsilon: float  # slack in (0,1) for the captured-vertex count
    gamma: float | None = None  # threshold level in [q, p]; None picks the default
    threshold_mode: str = CHERNOFF_GAMMA
    search_mode: str = AUTO
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    restarts: int = DEFAULT_RESTARTS

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise InfeasibleConfigError(f"epsilon={self.epsilon} must be in (0,1)")
        if self.threshold_mode not in (CHERNOFF_GAMMA, BERNSTEIN_MIDPOINT):
            raise InfeasibleConfigError(f"unknown threshold mode {self.threshold_mode!r}")
        if self.search_mode not in (EXACT, LOCAL_SEARCH, AUTO):
            raise InfeasibleConfigError(f"unknown search mode {self.search_mode!r}")

    def budget(self) -> int:
        return binom2(self.sample_size)

    def n0(self, params: ModelParams) -> int:
        return _derived_count(1.0 - self.epsilon, params.k, self.sample_size, params.n)

    def effective_gamma(self, params: ModelParams, n0: int) -> float:
        if self.gamma is not None:
            return self.gamma
        p = params.dist.planted.mean
        q = params.dist.noise.mean
        if p >= 1.0:
            # keep the noiseless statistic strictly above the threshold
            return 1.0 - 1.0 / (2.0 * binom2(n0))
        return p - (p - q) / 10.0

    def threshold(self, params: ModelParams, n0: int) -> float:
        if self.threshold_mode == BERNSTEIN_MIDPOINT:
            mid = (params.dist.planted.mean + params.dist.noise.mean) / 2.0
            return binom2(n0) * mid
        return binom2(n0) * self.effective_gamma(params, n0)


@dataclass(frozen=True)
class DegreeConfig:
    panel_size: int  # n'
    probe_count: int  # |M|, probes drawn inside the panel
    epsilon: float
    log_base: float = math.e

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise InfeasibleConfigError(f"epsilon={self.epsilon} must be in (0,1)")
        if self.probe_count > self.panel_size:
            raise InfeasibleConfigError("probe count cannot exceed the panel size")

    def budget(self) -> int:
        # unique unordered pairs of the bipartite pattern
        return (self.probe_count * self.panel_size - self.probe_count
                - binom2(self.probe_count))

    def n0(self, params: ModelParams) -> int:
        return _derived_count(1.0 - self.epsilon, params.k, self.panel_size, params.n)

    def tau_deg(self, params: ModelParams, n0: int) -> float:
        p = params.dist.planted.mean
        q = params.dist.noise.mean
        return self.panel_size * q + n0 * (p - q) / 2.0

    def verdict_threshold(self) -> float:
        return 2.0 * math.log(self.panel_size) / math.log(self.log_base)


def _subset_sums(adjacency: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    """Within-subset edge sums for each row of vertex indices in `subsets`."""
    n0 = subsets.shape[1]
    sums = np.zeros(subsets.shape[0])
    for a in range(n0):
        for b in range(a + 1, n0):
            sums += adjacency[subsets[:, a], subsets[:, b]]
    return sums


def scan_statistic_exact(adjacency: np.ndarray, n0: int,
                         chunk: int = 100_000) -> float:
    """Max within-subset edge sum over all size-n0 subsets, by enumeration."""
    m = adjacency.shape[0]
    best = -math.inf
    combos = itertools.combinations(range(m), n0)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            break
        arr = np.array(block, dtype=np.int64)
        best = max(best, float(_subset_sums(adjacency, arr).max()))
    return best


def scan_statistic_local_search(adjacency: np.ndarray, n0: int, seed,
                                restarts: int = DEFAULT_RESTARTS) -> float:
    """Greedy swap ascent with random restarts; never exceeds the exact max."""
    m = adjacency.shape[0]
    rng = np.random.default_rng(seed)
    best = -math.inf
    for _ in range(restarts):
        members = np.zeros(m, dtype=bool)
        members[rng.choice(m, size=n0, replace=False)] = True
        degree_to_set = adjacency @ members  # per-vertex edge count into the set
        while True:
            inside = np.flatnonzero(members)
            outside = np.flatnonzero(~members)
            # delta of swapping i (in) for o (out): deg(o) - A[o,i] - deg(i)
            delta = (degree_to_set[outside][None, :]
                     - adjacency[np.ix_(inside, outside)]
                     - degree_to_set[inside][:, None])
            pos = np.unravel_index(np.argmax(delta), delta.shape)
            if delta[pos] <= 0:
                break
            i, o = inside[pos[0]], outside[pos[1]]
            members[i] = False
            members[o] = True
            degree_to_set += adjacency[o] - adjacency[i]
        inside = np.flatnonzero(members)
        best = max(best, float(degree_to_set[inside].sum() / 2.0))
    return best


def _panel_adjacency(plan: QueryPlan, answers: np.ndarray) -> np.ndarray:
    panel = plan.subset
    m = panel.size
    pos = {int(v): idx for idx, v in enumerate(panel)}
    a = np.fromiter((pos[int(v)] for v in plan.pairs[:, 0]), dtype=np.int64,
                    count=plan.unique_count)
    b = np.fromiter((pos[int(v)] for v in plan.pairs[:, 1]), dtype=np.int64,
                    count=plan.unique_count)
    adjacency = np.zeros((m, m))
    adjacency[a, b] = answers
    adjacency[b, a] = answers
    return adjacency


def scan_test(oracle: BudgetedOracle, params: ModelParams, cfg: ScanConfig,
              seed) -> DetectorVerdict:
    """Query all pairs inside a random panel; threshold the densest-subset sum."""
    n0 = cfg.n0(params)
    if n0 < 2:
        raise InfeasibleConfigError(
            f"derived subset size {n0} < 2; grow the panel or shrink epsilon"
        )
    if n0 > cfg.sample_size:
        raise InfeasibleConfigError("derived subset size exceeds the panel")
    plan = clique_pattern_plan(params.n, cfg.sample_size, seed)
    answers = plan.execute(oracle)
    adjacency = _panel_adjacency(plan, answers)
    use_exact = cfg.search_mode == EXACT or (
        cfg.search_mode == AUTO
        and math.comb(cfg.sample_size, n0) <= cfg.enumeration_cap
    )
    if use_exact:
        statistic = scan_statistic_exact(adjacency, n0)
        approximate = False
    else:
        statistic = scan_statistic_local_search(adjacency, n0, seed,
                                                restarts=cfg.restarts)
        approximate = True
    threshold = cfg.threshold(params, n0)
    return DetectorVerdict(statistic=statistic, threshold=threshold,
                           decision=int(statistic > threshold),
                           mode="scan", approximate=approximate)


def degree_test(oracle: BudgetedOracle, params: ModelParams, cfg: DegreeConfig,
                seed) -> DetectorVerdict:
    """Count probes whose within-panel degree clears tau_deg."""
    n0 = cfg.n0(params)
    if n0 < 1:
        raise InfeasibleConfigError(
            f"derived planted count {n0} < 1; grow the panel or shrink epsilon"
        )
    plan = bipartite_pattern_plan(params.n, cfg.panel_size, cfg.probe_count, seed)
    answers = plan.execute(oracle)
    probes = plan.probes
    degrees = np.zeros(probes.size)
    for col in (0, 1):
        side = plan.pairs[:, col]
        idx = np.searchsorted(probes, side)
        idx_clip = np.minimum(idx, probes.size - 1)
        is_probe = probes[idx_clip] == side
        np.add.at(degrees, idx_clip[is_probe], answers[is_probe])
    tau = cfg.tau_deg(params, n0)
    statistic = float(np.count_nonzero(degrees > tau))
    threshold = cfg.verdict_threshold()
    return DetectorVerdict(statistic=statistic, threshold=threshold,
                           decision=int(statistic > threshold),
                           mode="degree", approximate=False)
