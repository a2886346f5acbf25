"""Randomized six-way split test for exponentiality.

A sample of size ``6m`` is shuffled and cut into six blocks
``U, V, W, X, Y, Z`` of size ``m``.  From them::

    R = U + V/2 + W/3
    S = max(U, V) + W/3
    T = max(X, Y, Z)

Under an exponential parent the three derived samples share one
distribution, and only then.  R and S are each compared against T with a
two-sample Wilcoxon rank-sum test and the smaller p-value decides.

Two decision rules are available:

``"calibrated"`` (default)
    Reject when ``min(p1, p2)`` falls below the ``alpha`` quantile of its
    own null distribution.  Ranks are scale-free, so that distribution
    depends only on ``m`` and is simulated once per ``m`` with a fixed seed.
``"bonferroni"``
    Reject when ``min(p1, p2) < alpha / 2``.  Valid but conservative: the
    two comparisons share T, and R and S share their source blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import ndtr
from scipy.stats import rankdata

from .distributions import (DOMAIN_SPLIT, DistributionSpec, Sample, generator, sample,
                            substream_seed)
from .errors import DataError, DegenerateError, ParameterError, ShapeError

EXACT_MAX_SIZE = 50
CALIBRATION_REPLICATES = 20000
CALIBRATION_SEED = 0x5EED_CA11_B4A7_E000
RULES = ("calibrated", "bonferroni")


@dataclass(frozen=True)
class TripleStatistics:
    R: np.ndarray
    S: np.ndarray
    T: np.ndarray
    seed: int | None
    subsets: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        arrs = [np.asarray(a, dtype=float) for a in (self.R, self.S, self.T)]
        if not (arrs[0].shape == arrs[1].shape == arrs[2].shape) or arrs[0].ndim != 1:
            raise ShapeError("R, S and T must be 1-d and of equal length")
        if arrs[0].size == 0:
            raise ShapeError("R, S and T must be nonempty")
        for name, a in zip("RST", arrs):
            if np.any(~np.isfinite(a) | (a <= 0)):
                raise DataError(f"{name} contains a nonpositive or non-finite value")
        for name, a in zip("RST", arrs):
            object.__setattr__(self, name, a)

    @property
    def m(self) -> int:
        return self.R.size


def split_and_build(sample: Sample | Sequence[float], seed: int | None,
                    shuffle: bool = True) -> TripleStatistics:
    """Split a sample six ways and form the R, S, T statistics.

    With ``shuffle=False`` the blocks are consecutive slices in input order
    (``seed`` is then ignored).
    """
    values = sample.values if isinstance(sample, Sample) else np.asarray(sample, dtype=float)
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 6 or n % 6:
        keep = (n // 6) * 6
        raise ShapeError(
            f"sample length {n} is not a positive multiple of 6; "
            f"truncate to the first {keep} values" if keep else
            f"sample length {n} is below the minimum of 6")
    if np.any(~np.isfinite(values) | (values <= 0)):
        raise DataError("all sample values must be positive and finite")
    if shuffle:
        if seed is None:
            raise ParameterError("a seed is required for the random split")
        order = generator(seed, DOMAIN_SPLIT).permutation(n)
        values = values[order]
    m = n // 6
    U, V, W, X, Y, Z = (values[i * m:(i + 1) * m] for i in range(6))
    R = U + V / 2.0 + W / 3.0
    S = np.maximum(U, V) + W / 3.0
    T = np.maximum(np.maximum(X, Y), Z)
    subsets = dict(zip("UVWXYZ", (U, V, W, X, Y, Z)))
    return TripleStatistics(R, S, T, seed if shuffle else None, subsets)


# ---------------------------------------------------------------------------
# Wilcoxon rank-sum


@dataclass(frozen=True)
class WilcoxonResult:
    W: float
    z: float
    p_value: float
    method: str
    ties_present: bool
    m: int
    n: int

    def to_dict(self) -> dict:
        return {
            "W": self.W,
            "z": self.z,
            "p_value": self.p_value,
            "method": self.method,
            "ties_present": self.ties_present,
            "m": self.m,
            "n": self.n,
        }


@lru_cache(maxsize=64)
def rank_sum_counts(m: int, n: int) -> tuple[int, ...]:
    """Number of rank arrangements giving each Mann-Whitney count 0..m*n.

    These are the coefficients of the Gaussian binomial ``[m+n choose m]_q``,
    built as ``prod_{i=1}^{m} (1 - q**(n+i)) / (1 - q**i)`` with exact
    integer polynomial arithmetic.
    """
    if m < 0 or n < 0:
        raise ParameterError("sizes must be nonnegative")
    if m > n:
        return rank_sum_counts(n, m)
    poly = [1]
    for i in range(1, m + 1):
        # multiply by (1 - q**(n+i))
        grown = poly + [0] * (n + i)
        for k, c in enumerate(poly):
            grown[k + n + i] -= c
        # divide by (1 - q**i): b[k] = a[k] + b[k-i]
        for k in range(i, len(grown)):
            grown[k] += grown[k - i]
        poly = grown[: len(grown) - i]
    return tuple(poly)


@lru_cache(maxsize=64)
def _cumulative_counts(m: int, n: int) -> tuple[int, ...]:
    acc, out = 0, []
    for c in rank_sum_counts(m, n):
        acc += c
        out.append(acc)
    return tuple(out)


def exact_pvalue(W: int, m: int, n: int) -> float:
    """Two-sided exact p-value ``2 min(P(U <= W), P(U >= W))``, capped at 1."""
    if not 0 <= W <= m * n:
        raise ParameterError("W outside 0..m*n")
    cum = _cumulative_counts(m, n)
    total = cum[-1]
    lower = cum[W]
    upper = total - (cum[W - 1] if W > 0 else 0)
    return min(1.0, 2.0 * min(lower, upper) / total)


def wilcoxon_rank_sum(x: Sequence[float], y: Sequence[float],
                      method: str = "auto") -> WilcoxonResult:
    """Two-sample Wilcoxon rank-sum (Mann-Whitney) test.

    ``W`` is the midrank sum of ``x`` minus ``m(m+1)/2``.  With
    ``method="auto"`` the exact null distribution is used when there are no
    ties and both samples have at most 50 values; otherwise the normal
    approximation with tie-corrected variance and a 0.5 continuity
    correction toward the mean.
    """
    xa = np.asarray(x, dtype=float).ravel()
    ya = np.asarray(y, dtype=float).ravel()
    m, n = xa.size, ya.size
    if m == 0 or n == 0:
        raise ShapeError("both samples must be nonempty")
    if method not in ("auto", "exact", "normal"):
        raise ParameterError("method must be 'auto', 'exact' or 'normal'")
    pooled = np.concatenate([xa, ya])
    N = m + n
    ranks = rankdata(pooled, method="average")
    _, tie_counts = np.unique(pooled, return_counts=True)
    ties = bool(np.any(tie_counts > 1))
    if tie_counts.size == 1:
        raise DegenerateError("all pooled values are identical")
    W = float(ranks[:m].sum()) - m * (m + 1) / 2.0

    mean = m * n / 2.0
    tie_term = float(np.sum(tie_counts.astype(float) ** 3 - tie_counts)) / (N * (N - 1))
    var = m * n / 12.0 * ((N + 1) - tie_term)
    diff = W - mean
    z = (diff - math.copysign(0.5, diff)) / math.sqrt(var) if diff else 0.0

    use_exact = method == "exact" or (
        method == "auto" and not ties and m <= EXACT_MAX_SIZE and n <= EXACT_MAX_SIZE)
    if use_exact:
        if ties:
            raise ParameterError("the exact distribution requires tie-free samples")
        p = exact_pvalue(int(round(W)), m, n)
        label = "exact"
    else:
        p = min(1.0, 2.0 * float(ndtr(-abs(z))))
        label = "normal-approx"
    W_out = int(W) if W == int(W) else W
    return WilcoxonResult(W_out, z, p, label, ties, m, n)


# ---------------------------------------------------------------------------
# combined decision


@lru_cache(maxsize=16)
def null_min_pvalues(m: int, replicates: int = CALIBRATION_REPLICATES,
                     seed: int = CALIBRATION_SEED) -> np.ndarray:
    """Sorted simulated null distribution of ``min(p1, p2)`` for block size ``m``."""
    null = DistributionSpec.exponential(1.0)
    out = np.empty(replicates)
    for r in range(replicates):
        s = substream_seed(seed, r)
        tri = split_and_build(sample(null, 6 * m, s), s)
        out[r] = min(wilcoxon_rank_sum(tri.R, tri.T).p_value,
                     wilcoxon_rank_sum(tri.S, tri.T).p_value)
    out.sort()
    out.setflags(write=False)
    return out


def critical_value(m: int, alpha: float, rule: str = "calibrated") -> float:
    """Threshold ``c``: exponentiality is rejected when ``min(p1, p2) < c``."""
    _check_alpha(alpha)
    if rule == "bonferroni":
        return alpha / 2.0
    if rule != "calibrated":
        raise ParameterError(f"rule must be one of {RULES}")
    null = null_min_pvalues(m)
    # largest c whose simulated rejection fraction does not exceed alpha
    return float(null[int(math.floor(alpha * null.size))])


@dataclass(frozen=True)
class TestReport:
    r_vs_t: WilcoxonResult
    s_vs_t: WilcoxonResult
    alpha: float
    rule: str
    threshold: float
    reject: bool
    split_seed: int | None
    m: int

    __test__ = False  # not a pytest class

    @property
    def min_p(self) -> float:
        return min(self.r_vs_t.p_value, self.s_vs_t.p_value)

    def to_dict(self) -> dict:
        return {
            "R_vs_T": self.r_vs_t.to_dict(),
            "S_vs_T": self.s_vs_t.to_dict(),
            "alpha": self.alpha,
            "rule": self.rule,
            "threshold": self.threshold,
            "min_p": self.min_p,
            "reject_exponentiality": self.reject,
            "split_seed": self.split_seed,
            "m": self.m,
        }


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise ParameterError("alpha must lie in (0, 1)")


def test_triples(triples: TripleStatistics, alpha: float = 0.05, rule: str = "calibrated",
                 threshold: float | None = None) -> TestReport:
    """Rank-sum comparisons R vs T and S vs T and the combined decision.

    ``threshold`` overrides the rule's critical value (used by the Monte
    Carlo driver, which computes it once).
    """
    _check_alpha(alpha)
    rt = wilcoxon_rank_sum(triples.R, triples.T)
    st = wilcoxon_rank_sum(triples.S, triples.T)
    c = critical_value(triples.m, alpha, rule) if threshold is None else threshold
    reject = min(rt.p_value, st.p_value) < c
    return TestReport(rt, st, alpha, rule, c, reject, triples.seed, triples.m)


test_triples.__test__ = False


def exponentiality_test(sample: Sample | Sequence[float], alpha: float = 0.05,
                        seed: int = 0, rule: str = "calibrated",
                        threshold: float | None = None) -> TestReport:
    """Split ``sample`` with ``seed`` and run both rank-sum comparisons."""
    _check_alpha(alpha)
    return test_triples(split_and_build(sample, seed), alpha, rule, threshold)


# ---------------------------------------------------------------------------
# fixture I/O


def parse_triples_text(text: str) -> TripleStatistics:
    """Parse the block format: a line ``R``, ``S`` or ``T`` followed by values.

    Values may be spread over any number of lines and separated by
    whitespace or commas; ``#`` starts a comment.
    """
    blocks: dict[str, list[float]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("R", "S", "T"):
            if line in blocks:
                raise DataError(f"line {lineno}: block {line} appears twice")
            current = line
            blocks[current] = []
            continue
        if current is None:
            raise DataError(f"line {lineno}: values before the first R/S/T header")
        for tok in line.replace(",", " ").split():
            try:
                blocks[current].append(float(tok))
            except ValueError:
                raise DataError(f"line {lineno}: {tok!r} is not a number") from None
    missing = [b for b in "RST" if b not in blocks]
    if missing:
        raise DataError(f"missing block(s): {', '.join(missing)}")
    return TripleStatistics(np.array(blocks["R"]), np.array(blocks["S"]),
                            np.array(blocks["T"]), None)


def load_triples(path: str | Path) -> TripleStatistics:
    return parse_triples_text(Path(path).read_text())


def reference_triples_text() -> str:
    return resources.files("expchar").joinpath("data/reference_rst.txt").read_text()


def load_reference_triples() -> TripleStatistics:
    """The shipped 30-triple fixture from a simulated exp(1) sample of size 180."""
    return parse_triples_text(reference_triples_text())
