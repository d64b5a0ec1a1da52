"""Closed-form divergences between the planted and noise edge distributions.

Everything here is pure and cheap; the threshold and bound formulas in the
rest of the package are built on these primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivergenceInfiniteError, ParameterError

NATURAL = math.e


@dataclass(frozen=True)
class Bernoulli:
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ParameterError(f"Bernoulli parameter {self.theta} not in [0,1]")

    @property
    def mean(self) -> float:
        return self.theta


@dataclass(frozen=True)
class Gaussian:
    mu: float
    var: float

    def __post_init__(self):
        if self.var <= 0.0:
            raise ParameterError(f"Gaussian variance {self.var} must be positive")

    @property
    def mean(self) -> float:
        return self.mu


Distribution = Bernoulli | Gaussian


@dataclass(frozen=True)
class DistributionPair:
    """Planted (dense) and noise (ambient) entry distributions."""

    planted: Distribution
    noise: Distribution

    def __post_init__(self):
        if type(self.planted) is not type(self.noise):
            raise ParameterError("planted and noise must be the same distribution kind")


@dataclass(frozen=True)
class BernPair:
    """Edge densities of the planted subgraph (p) and the ambient graph (q)."""

    p: float
    q: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ParameterError(f"p={self.p}, q={self.q} must lie in [0,1]")

    def pair(self) -> DistributionPair:
        return DistributionPair(Bernoulli(self.p), Bernoulli(self.q))


def binom2(m: int) -> int:
    """Number of unordered pairs among m items, m*(m-1)/2."""
    if m < 0:
        raise ParameterError("binom2 needs a nonnegative integer")
    return m * (m - 1) // 2


def _chi_square_bernoulli(p: float, q: float) -> float:
    if p == q:
        return 0.0
    if q <= 0.0 or q >= 1.0:
        raise DivergenceInfiniteError(
            f"chi-square(Bern({p})||Bern({q})) diverges: noise support does not cover planted"
        )
    return (p - q) ** 2 / (q * (1.0 - q))


def _chi_square_gaussian(planted: Gaussian, noise: Gaussian) -> float:
    # 1 + chi2 = (s0^2 / (s1 * sqrt(2 s0^2 - s1^2))) * exp(dmu^2 / (2 s0^2 - s1^2))
    denom = 2.0 * noise.var - planted.var
    if denom <= 0.0:
        raise DivergenceInfiniteError(
            "chi-square integral diverges: need 2*var_noise > var_planted"
        )
    dmu2 = (planted.mu - noise.mu) ** 2
    value = (noise.var / math.sqrt(planted.var * denom)) * math.exp(dmu2 / denom) - 1.0
    return max(value, 0.0)


def chi_square(pair: DistributionPair) -> float:
    """Chi-square distance chi^2(planted || noise); 0 iff the two coincide."""
    planted, noise = pair.planted, pair.noise
    if isinstance(planted, Bernoulli):
        return _chi_square_bernoulli(planted.theta, noise.theta)
    return _chi_square_gaussian(planted, noise)


def _kl_bernoulli_nats(p: float, q: float) -> float:
    if p == q:
        return 0.0
    if (q == 0.0 and p > 0.0) or (q == 1.0 and p < 1.0):
        raise DivergenceInfiniteError(
            f"KL(Bern({p})||Bern({q})) diverges: planted not absolutely continuous w.r.t. noise"
        )
    total = 0.0
    if p > 0.0:
        total += p * math.log(p / q)
    if p < 1.0:
        total += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return total


def _kl_gaussian_nats(planted: Gaussian, noise: Gaussian) -> float:
    dmu2 = (planted.mu - noise.mu) ** 2
    return 0.5 * (
        math.log(noise.var / planted.var) + (planted.var + dmu2) / noise.var - 1.0
    )


def kl(pair: DistributionPair, base: float = NATURAL) -> float:
    """KL divergence d_KL(planted || noise) in the given log base (default natural)."""
    if base <= 1.0:
        raise ParameterError(f"log base {base} must exceed 1")
    planted, noise = pair.planted, pair.noise
    if isinstance(planted, Bernoulli):
        nats = _kl_bernoulli_nats(planted.theta, noise.theta)
    else:
        nats = _kl_gaussian_nats(planted, noise)
    return nats / math.log(base)


def kl_bernoulli(a: float, b: float, base: float = NATURAL) -> float:
    """KL divergence between Bernoulli(a) and Bernoulli(b); used by tail bounds."""
    return kl(DistributionPair(Bernoulli(a), Bernoulli(b)), base=base)
