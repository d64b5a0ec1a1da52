"""Null and alternative random-graph instances with lazy, seed-deterministic edges.

Edge values are never stored: each unordered pair maps through a keyed integer
mix to a uniform in [0,1), which the entry distribution's quantile transform
turns into an observation.  Memory stays independent of how many pairs exist.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .divergences import Bernoulli, DistributionPair, Gaussian
from .errors import ParameterError, SelfLoopError

H0 = "H0"
H1 = "H1"

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_EDGE_STREAM = _U64(0xE55E5C0DE0ABCDEF)
_PLANT_STREAM = 0x51AB7ED5E7


def mix64(x):
    """SplitMix64 finalizer; accepts uint64 scalars or arrays (wraparound intended)."""
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> _U64(30))) * _MIX1
        z = (z ^ (z >> _U64(27))) * _MIX2
        return z ^ (z >> _U64(31))


def _pair_uniforms(seed: int, lo, hi):
    """Uniform [0,1) draws, a pure function of (seed, lo, hi)."""
    s = _U64(seed & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        h = mix64(mix64(s ^ _EDGE_STREAM) ^ _U64(3) * lo.astype(_U64))
        h = mix64(h ^ _U64(5) * hi.astype(_U64))
    return (h >> _U64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class ModelParams:
    n: int
    k: int
    dist: DistributionPair

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError(f"n={self.n} must be at least 2")
        if not 2 <= self.k <= self.n:
            raise ParameterError(f"k={self.k} must satisfy 2 <= k <= n={self.n}")

    @classmethod
    def bernoulli(cls, n: int, k: int, p: float, q: float) -> "ModelParams":
        return cls(n=n, k=k, dist=DistributionPair(Bernoulli(p), Bernoulli(q)))

    def descriptor(self) -> dict:
        d = {"n": self.n, "k": self.k}
        for name, dist in (("planted", self.dist.planted), ("noise", self.dist.noise)):
            if isinstance(dist, Bernoulli):
                d[name] = {"kind": "bernoulli", "theta": dist.theta}
            else:
                d[name] = {"kind": "gaussian", "mu": dist.mu, "var": dist.var}
        return d


@dataclass(frozen=True)
class Instance:
    params: ModelParams
    hypothesis: str
    seed: int
    planted_set: np.ndarray | None = None
    _planted_mask: np.ndarray | None = field(default=None, repr=False)

    def descriptor(self) -> dict:
        # the planted set is deliberately left out: logs must not leak it
        return {
            "params": self.params.descriptor(),
            "hypothesis": self.hypothesis,
            "seed": self.seed,
        }

    def descriptor_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)


def _sample_planted(n: int, k: int, seed: int) -> np.ndarray:
    """Uniform k-subset of [n] via partial Fisher-Yates on a dedicated stream."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(_PLANT_STREAM,)))
    pool = np.arange(n, dtype=np.int64)
    for i in range(k):
        j = i + int(rng.integers(n - i))
        pool[i], pool[j] = pool[j], pool[i]
    chosen = pool[:k]
    chosen.sort()
    return chosen


def sample_instance(params: ModelParams, hypothesis: str, seed: int) -> Instance:
    if hypothesis not in (H0, H1):
        raise ParameterError(f"hypothesis must be {H0!r} or {H1!r}, got {hypothesis!r}")
    if hypothesis == H0:
        return Instance(params=params, hypothesis=H0, seed=seed)
    planted = _sample_planted(params.n, params.k, seed)
    mask = np.zeros(params.n, dtype=bool)
    mask[planted] = True
    return Instance(params=params, hypothesis=H1, seed=seed,
                    planted_set=planted, _planted_mask=mask)


def _quantile(dist, u: np.ndarray) -> np.ndarray:
    if isinstance(dist, Bernoulli):
        return (u < dist.theta).astype(np.float64)
    return dist.mu + math.sqrt(dist.var) * ndtri(u)


def edge_values(inst: Instance, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Vectorized edge observations for unordered pairs {i, j}."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    if np.any(i == j):
        raise SelfLoopError("self-loops carry no edge value")
    n = inst.params.n
    if np.any((i < 0) | (i >= n) | (j < 0) | (j >= n)):
        raise ParameterError("vertex index out of range")
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    u = _pair_uniforms(inst.seed, lo, hi)
    dist = inst.params.dist
    if inst.hypothesis == H0:
        return _quantile(dist.noise, u)
    mask = inst._planted_mask
    both = mask[lo] & mask[hi]
    out = _quantile(dist.noise, u)
    if np.any(both):
        out[both] = _quantile(dist.planted, u[both])
    return out


def edge_value(inst: Instance, i: int, j: int) -> float:
    """Observation on the single unordered pair {i, j}."""
    return float(edge_values(inst, np.array([i]), np.array([j]))[0])
