"""Monte Carlo size and power of the six-way split test.

Replicate ``r`` uses the SplitMix64-derived seed ``substream_seed(master_seed, r)`` for both its
sample draw and its split, so results never depend on execution order or
on how replicates are distributed over worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from scipy.stats import norm

from .distributions import DistributionSpec, sample, substream_seed
from .errors import ParameterError
from .gof import critical_value, exponentiality_test

MIN_REPLICATES = 100
WILSON_LEVEL = 0.99


def wilson_interval(successes: int, trials: int, level: float = WILSON_LEVEL) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ParameterError("trials must be positive")
    z = float(norm.ppf(0.5 + level / 2.0))
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class PowerEstimate:
    alternative: DistributionSpec
    n: int
    alpha: float
    replicates: int
    rejections: int
    master_seed: int
    rule: str = "calibrated"

    @property
    def rate(self) -> float:
        return self.rejections / self.replicates

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.rejections, self.replicates)

    def to_dict(self) -> dict:
        lo, hi = self.interval
        return {
            "alternative": self.alternative.to_dict(),
            "n": self.n,
            "alpha": self.alpha,
            "replicates": self.replicates,
            "rejections": self.rejections,
            "rate": self.rate,
            "wilson_99": [lo, hi],
            "master_seed": self.master_seed,
            "rule": self.rule,
        }


def _count_rejections(args) -> int:
    alt, n, alpha, master_seed, rule, threshold, indices = args
    hits = 0
    for r in indices:
        seed = substream_seed(master_seed, r)
        if exponentiality_test(sample(alt, n, seed), alpha, seed, rule, threshold).reject:
            hits += 1
    return hits


def _validate(n: int, alpha: float, replicates: int):
    if n < 6 or n % 6:
        raise ParameterError("n must be a positive multiple of 6")
    if not 0.0 < alpha < 1.0:
        raise ParameterError("alpha must lie in (0, 1)")
    if replicates < MIN_REPLICATES:
        raise ParameterError(f"replicates must be at least {MIN_REPLICATES}")


def estimate_power(alt: DistributionSpec, n: int, alpha: float, replicates: int,
                   master_seed: int, workers: int = 1,
                   rule: str = "calibrated") -> PowerEstimate:
    """Rejection rate of the split test on ``replicates`` samples from ``alt``."""
    _validate(n, alpha, replicates)
    threshold = critical_value(n // 6, alpha, rule)
    if workers <= 1:
        hits = _count_rejections((alt, n, alpha, master_seed, rule, threshold,
                                  range(replicates)))
    else:
        chunks = [range(i, replicates, workers) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_count_rejections,
                                [(alt, n, alpha, master_seed, rule, threshold, c)
                                 for c in chunks]))
    return PowerEstimate(alt, n, alpha, replicates, hits, master_seed, rule)


def size_sweep(alphas: Sequence[float], n: int, replicates: int, master_seed: int,
               workers: int = 1, rule: str = "calibrated") -> list[PowerEstimate]:
    """Null rejection rates for each level in ``alphas`` (same replicate seeds)."""
    null = DistributionSpec.exponential(1.0)
    return [estimate_power(null, n, a, replicates, master_seed, workers, rule)
            for a in alphas]
