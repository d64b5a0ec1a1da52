"""Query-trajectory generators, non-adaptive (fixed upfront) and adaptive.

Non-adaptive plans are fully materialized before any oracle exists, so they
cannot depend on answers by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .divergences import binom2
from .errors import ParameterError
from .oracle import BudgetedOracle

NON_ADAPTIVE = "non_adaptive"
ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class QueryPlan:
    """A fixed list of distinct unordered pairs, plus pattern metadata."""

    kind: str
    pairs: np.ndarray  # (m, 2) int64, lo < hi, no duplicates
    nominal_budget: int  # the pattern's nominal query count (may exceed unique)
    subset: np.ndarray | None = None  # panel S for clique/bipartite patterns
    probes: np.ndarray | None = None  # probe set M for the bipartite pattern
    meta: dict = field(default_factory=dict)

    @property
    def unique_count(self) -> int:
        return self.pairs.shape[0]

    def execute(self, oracle: BudgetedOracle) -> np.ndarray:
        return oracle.query_many(self.pairs[:, 0], self.pairs[:, 1])


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _subset(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    return np.sort(rng.choice(n, size=m, replace=False).astype(np.int64))


def _decode_pair_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map flat index in [0, C(n,2)) to the unordered pair (lo, hi), lo < hi."""
    # row lo contributes (n - 1 - lo) pairs; invert the triangular cumsum
    idx = idx.astype(np.int64)
    approx = (2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * idx.astype(np.float64))) / 2
    lo = np.floor(approx).astype(np.int64)

    def offset(r):
        return (r * (2 * n - r - 1)) // 2

    lo += offset(lo + 1) <= idx  # float slipped one row low
    lo -= offset(lo) > idx       # or one row high
    hi = idx - offset(lo) + lo + 1
    return lo, hi


def _sample_distinct(total: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """count distinct integers from [0, total), uniformly without replacement."""
    if count * 10 >= total:
        return rng.choice(total, size=count, replace=False)
    picked = rng.integers(0, total, size=int(count * 1.1) + 16)
    picked = np.unique(picked)
    while picked.size < count:
        extra = rng.integers(0, total, size=count)
        picked = np.unique(np.concatenate([picked, extra]))
    return rng.permutation(picked)[:count]


def uniform_plan(n: int, budget: int, seed) -> QueryPlan:
    """budget distinct unordered pairs, uniform without replacement."""
    total = binom2(n)
    if budget > total:
        raise ParameterError(f"budget {budget} exceeds the {total} pairs on {n} vertices")
    rng = _rng(seed)
    flat = _sample_distinct(total, budget, rng)
    lo, hi = _decode_pair_index(flat, n)
    return QueryPlan(kind=NON_ADAPTIVE, pairs=np.column_stack([lo, hi]),
                     nominal_budget=budget)


def clique_pattern_plan(n: int, sample_size: int, seed) -> QueryPlan:
    """Subsample a panel of sample_size vertices and query every pair inside it."""
    if sample_size > n:
        raise ParameterError(f"sample size {sample_size} exceeds n={n}")
    if sample_size < 2:
        raise ParameterError("clique pattern needs at least 2 vertices")
    rng = _rng(seed)
    panel = _subset(rng, n, sample_size)
    a, b = np.triu_indices(sample_size, k=1)
    pairs = np.column_stack([panel[a], panel[b]])
    return QueryPlan(kind=NON_ADAPTIVE, pairs=pairs,
                     nominal_budget=binom2(sample_size), subset=panel)


def bipartite_pattern_plan(n: int, panel_size: int, probe_count: int, seed) -> QueryPlan:
    """Panel S of panel_size vertices, probes inside it; query probe x panel.

    Probe-internal pairs are deduplicated, so the unique pair count is
    probe_count * panel_size - probe_count - C(probe_count, 2); the nominal
    probe_count * panel_size budget is kept in metadata.
    """
    if not probe_count <= panel_size <= n:
        raise ParameterError(
            f"need probe_count <= panel_size <= n, got {probe_count}, {panel_size}, {n}"
        )
    rng = _rng(seed)
    panel = _subset(rng, n, panel_size)
    probes = np.sort(rng.permutation(panel)[:probe_count])
    probe_mask = np.isin(panel, probes)
    # probe x non-probe pairs, plus each probe-internal pair once
    others = panel[~probe_mask]
    pi, oj = np.meshgrid(probes, others, indexing="ij")
    cross = np.column_stack([np.minimum(pi.ravel(), oj.ravel()),
                             np.maximum(pi.ravel(), oj.ravel())])
    a, b = np.triu_indices(probe_count, k=1)
    internal = np.column_stack([probes[a], probes[b]])
    pairs = np.concatenate([cross, internal])
    return QueryPlan(kind=NON_ADAPTIVE, pairs=pairs,
                     nominal_budget=probe_count * panel_size,
                     subset=panel, probes=probes)


class GreedyAdaptiveRule:
    """Adaptive trajectory: concentrate queries on high-scoring vertices.

    Score of a vertex is (observed positives) - noise_mean * (observed pairs);
    ties break by vertex index.  Unexplored pairs among the top `fanout`
    scorers are queried first, falling back to uniform exploration.
    """

    kind = ADAPTIVE

    def __init__(self, n: int, budget: int, fanout: int, seed):
        if budget < fanout:
            raise ParameterError("budget must be at least the fanout")
        self.n = n
        self.budget = budget
        self.fanout = fanout
        self.seed = seed

    def execute(self, oracle: BudgetedOracle) -> np.ndarray:
        rng = _rng(self.seed)
        n = self.n
        noise_mean = oracle.instance.params.dist.noise.mean
        positives = np.zeros(n)
        explored = np.zeros(n)
        seen: set[tuple[int, int]] = set()
        answers = []
        while len(seen) < self.budget:
            pair = self._next_pair(rng, positives, explored, seen, noise_mean)
            ans = oracle.query(*pair)
            seen.add(pair)
            answers.append(ans)
            for v in pair:
                positives[v] += ans
                explored[v] += 1
        return np.asarray(answers)

    def _next_pair(self, rng, positives, explored, seen, noise_mean):
        scores = positives - noise_mean * explored
        if np.any(scores > 0):
            top = np.lexsort((np.arange(self.n), -scores))[: self.fanout]
            for a in range(len(top)):
                for b in range(a + 1, len(top)):
                    u, v = int(top[a]), int(top[b])
                    pair = (u, v) if u < v else (v, u)
                    if pair not in seen:
                        return pair
            # expand around the single best vertex
            best = int(top[0])
            order = np.argsort(-scores)
            for v in order:
                v = int(v)
                if v == best:
                    continue
                pair = (best, v) if best < v else (v, best)
                if pair not in seen:
                    return pair
        while True:
            u, v = rng.integers(0, self.n, size=2)
            if u == v:
                continue
            pair = (int(min(u, v)), int(max(u, v)))
            if pair not in seen:
                return pair


def greedy_adaptive_rule(n: int, budget: int, fanout: int, seed) -> GreedyAdaptiveRule:
    return GreedyAdaptiveRule(n, budget, fanout, seed)
