import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from expchar import gof
from expchar.distributions import DistributionSpec, sample
from expchar.errors import DataError, DegenerateError, ParameterError, ShapeError

EXP1 = DistributionSpec.exponential(1.0)

distinct_pairs = st.lists(st.integers(0, 10**6), min_size=4, max_size=60, unique=True).flatmap(
    lambda v: st.integers(1, len(v) - 1).map(lambda k: (v[:k], v[k:])))


class TestSplit:
    def test_hand_example(self):
        tri = gof.split_and_build([1, 2, 3, 4, 5, 6], None, shuffle=False)
        assert (tri.R[0], tri.S[0], tri.T[0]) == (3.0, 3.0, 6.0)

    def test_deterministic(self):
        s = sample(EXP1, 180, 99)
        a, b = gof.split_and_build(s, 5), gof.split_and_build(s, 5)
        for name in "RST":
            assert np.array_equal(getattr(a, name), getattr(b, name))

    def test_seed_matters(self):
        s = sample(EXP1, 180, 99)
        assert not np.array_equal(gof.split_and_build(s, 5).R, gof.split_and_build(s, 6).R)

    @pytest.mark.parametrize("n", [100, 5, 0])
    def test_bad_length(self, n):
        with pytest.raises(ShapeError):
            gof.split_and_build(np.ones(n), 1)

    def test_truncation_hint(self):
        with pytest.raises(ShapeError, match="first 96"):
            gof.split_and_build(np.ones(100), 1)

    def test_nonpositive(self):
        with pytest.raises(DataError):
            gof.split_and_build([1, 2, 3, 4, 5, -6], 1)

    def test_needs_seed(self):
        with pytest.raises(ParameterError):
            gof.split_and_build(np.ones(6), None)

    @given(st.integers(1, 20), st.integers(0, 2**64 - 1))
    @settings(max_examples=40, deadline=None)
    def test_multiset_preserved(self, m, seed):
        vals = np.arange(1, 6 * m + 1, dtype=float)
        tri = gof.split_and_build(vals, seed)
        used = np.sort(np.concatenate([tri.subsets[k] for k in "UVWXYZ"]))
        assert np.array_equal(used, vals)
        assert tri.m == m


class TestRankSum:
    def test_tiny_exact(self):
        res = gof.wilcoxon_rank_sum([1, 2], [3, 4])
        assert res.W == 0
        assert res.method == "exact"
        assert res.p_value == pytest.approx(1 / 3, abs=1e-15)

    def test_counts_total_and_symmetry(self):
        for m, n in [(1, 1), (3, 5), (7, 7), (30, 30), (12, 41)]:
            c = gof.rank_sum_counts(m, n)
            assert len(c) == m * n + 1
            assert sum(c) == math.comb(m + n, m)
            assert c == c[::-1]

    def test_exact_against_scipy(self):
        rng = np.random.default_rng(3)
        for m, n in [(5, 7), (30, 30), (12, 20)]:
            x, y = rng.random(m), rng.random(n) + 0.1
            ours = gof.wilcoxon_rank_sum(x, y)
            ref = stats.mannwhitneyu(x, y, method="exact")
            assert ours.W == ref.statistic
            assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-12)

    def test_normal_against_scipy_with_ties(self):
        tri = gof.load_reference_triples()
        for a in (tri.R, tri.S):
            ours = gof.wilcoxon_rank_sum(a, tri.T)
            ref = stats.mannwhitneyu(a, tri.T, method="asymptotic", use_continuity=True)
            assert ours.method == "normal-approx" and ours.ties_present
            assert ours.W == ref.statistic
            assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-12)

    @pytest.mark.parametrize("W,p", [(471, 0.7635), (444, 0.9357)])
    def test_exact_distribution_values(self, W, p):
        # the fixture's rounding creates ties; these are the tie-free statistics
        assert gof.exact_pvalue(W, 30, 30) == pytest.approx(p, abs=5e-5)

    def test_exact_vs_normal_band(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            x, y = rng.exponential(size=30), rng.exponential(size=30)
            e = gof.wilcoxon_rank_sum(x, y, method="exact").p_value
            a = gof.wilcoxon_rank_sum(x, y, method="normal").p_value
            assert abs(e - a) < 0.02

    @given(distinct_pairs)
    @settings(max_examples=80, deadline=None)
    def test_complement(self, pair):
        x, y = pair
        assert gof.wilcoxon_rank_sum(x, y).W + gof.wilcoxon_rank_sum(y, x).W == len(x) * len(y)

    @given(st.lists(st.integers(0, 8), min_size=2, max_size=40))
    def test_midranks_sum(self, vals):
        from scipy.stats import rankdata
        N = len(vals)
        assert rankdata(vals).sum() == N * (N + 1) / 2

    @given(distinct_pairs)
    @settings(max_examples=60, deadline=None)
    def test_bounds(self, pair):
        x, y = pair
        r = gof.wilcoxon_rank_sum(x, y)
        assert 0 <= r.W <= len(x) * len(y)
        assert 0.0 <= r.p_value <= 1.0
        if r.method == "exact":
            assert not r.ties_present

    def test_large_uses_normal(self):
        rng = np.random.default_rng(1)
        assert gof.wilcoxon_rank_sum(rng.random(51), rng.random(10)).method == "normal-approx"

    def test_empty(self):
        with pytest.raises(ShapeError):
            gof.wilcoxon_rank_sum([], [1.0])

    def test_degenerate(self):
        with pytest.raises(DegenerateError):
            gof.wilcoxon_rank_sum([2.0, 2.0], [2.0])

    def test_exact_with_ties_refused(self):
        with pytest.raises(ParameterError):
            gof.wilcoxon_rank_sum([1, 2, 2], [3, 4], method="exact")

    def test_half_integer_W(self):
        r = gof.wilcoxon_rank_sum([1.0, 2.0], [2.0, 3.0])
        assert r.W == 0.5


class TestFixture:
    def test_shape(self):
        tri = gof.load_reference_triples()
        assert tri.m == 30
        assert tri.R[0] == 3.56 and tri.S[-1] == 3.87 and tri.T[12] == 8.46

    def test_t_ties(self):
        T = gof.load_reference_triples().T
        vals, counts = np.unique(T, return_counts=True)
        assert set(vals[counts > 1]) == {0.47, 1.92}

    def test_fail_to_reject(self):
        for rule in gof.RULES:
            assert not gof.test_triples(gof.load_reference_triples(), 0.05, rule).reject

    def test_parse_errors_carry_line(self):
        with pytest.raises(DataError, match="line 3"):
            gof.parse_triples_text("R\n1 2\nx 3\nS\n1 2\nT\n1 2\n")

    def test_missing_block(self):
        with pytest.raises(DataError, match="T"):
            gof.parse_triples_text("R\n1\nS\n1\n")

    def test_duplicate_block(self):
        with pytest.raises(DataError, match="twice"):
            gof.parse_triples_text("R\n1\nR\n2\nS\n1\nT\n1\n")

    def test_unequal_lengths(self):
        with pytest.raises(ShapeError):
            gof.parse_triples_text("R\n1 2\nS\n1\nT\n1 2\n")


class TestDecision:
    def test_bonferroni_threshold(self):
        assert gof.critical_value(30, 0.05, "bonferroni") == 0.025

    def test_calibrated_threshold(self):
        # larger than the Bonferroni value since p1 and p2 share T
        c = gof.critical_value(30, 0.05)
        assert 0.025 < c < 0.05

    def test_calibrated_monotone_in_alpha(self):
        cs = [gof.critical_value(30, a) for a in (0.01, 0.05, 0.1)]
        assert cs == sorted(cs)

    def test_calibration_size(self):
        null = gof.null_min_pvalues(30)
        c = gof.critical_value(30, 0.05)
        assert np.mean(null < c) <= 0.05

    def test_unknown_rule(self):
        with pytest.raises(ParameterError):
            gof.critical_value(30, 0.05, "holm")

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
    def test_bad_alpha(self, alpha):
        with pytest.raises(ParameterError):
            gof.exponentiality_test(sample(EXP1, 180, 1), alpha, 1)

    def test_reproducible(self):
        s = sample(EXP1, 180, 2026)
        a = gof.exponentiality_test(s, 0.05, 7)
        b = gof.exponentiality_test(s, 0.05, 7)
        assert a.to_dict() == b.to_dict()

    def test_threshold_override(self):
        rep = gof.exponentiality_test(sample(EXP1, 180, 1), 0.05, 1, threshold=1.0)
        assert rep.reject and rep.threshold == 1.0

    def test_report_dict(self):
        d = gof.exponentiality_test(sample(EXP1, 180, 1), 0.05, 4).to_dict()
        assert d["split_seed"] == 4 and d["m"] == 30
        assert d["min_p"] == min(d["R_vs_T"]["p_value"], d["S_vs_T"]["p_value"])

    @pytest.mark.slow
    def test_weibull_half_large_sample(self):
        # n = 1800: rejected in a clear majority of seeds, far above the null rate
        spec = DistributionSpec.weibull(0.5)
        hits = sum(gof.exponentiality_test(sample(spec, 1800, 500 + r), 0.05, r).reject
                   for r in range(60))
        assert hits / 60 > 0.35
