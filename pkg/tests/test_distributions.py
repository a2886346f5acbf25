import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from expchar.distributions import (
    DistributionSpec,
    Family,
    Sample,
    cdf,
    generator,
    laplace,
    open_uniform,
    pdf,
    sample,
    splitmix64,
    substream_seed,
    survival,
    survival_quantile,
)
from expchar.errors import DataError, DomainError, ParameterError


def scipy_twin(spec):
    s, k = spec.scale, spec.shape
    return {
        Family.EXPONENTIAL: lambda: stats.expon(scale=s),
        Family.WEIBULL: lambda: stats.weibull_min(k, scale=s),
        Family.GAMMA: lambda: stats.gamma(k, scale=s),
        Family.LOGNORMAL: lambda: stats.lognorm(k, scale=s),
        Family.UNIFORM: lambda: stats.uniform(0, s),
    }[spec.family]()


class TestSpec:
    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_bad_scale(self, bad):
        with pytest.raises(ParameterError):
            DistributionSpec.exponential(bad)

    def test_missing_shape(self):
        with pytest.raises(ParameterError):
            DistributionSpec(Family.WEIBULL, 1.0)

    def test_extra_shape(self):
        with pytest.raises(ParameterError):
            DistributionSpec(Family.EXPONENTIAL, 1.0, 2.0)

    def test_dict_roundtrip(self, any_spec):
        assert DistributionSpec.from_dict(any_spec.to_dict()) == any_spec

    def test_uniform_bound(self):
        assert DistributionSpec.uniform(3.0).bound == 3.0
        assert DistributionSpec.exponential().bound is None


class TestClosedForms:
    def test_exponential_origin(self):
        e = DistributionSpec.exponential(1.0)
        assert pdf(e, 0.0) == 1.0
        assert cdf(e, 0.0) == 0.0

    def test_weibull2_survival_at_one(self):
        assert survival(DistributionSpec.weibull(2.0), 1.0) == pytest.approx(math.exp(-1), abs=1e-15)

    def test_agrees_with_scipy(self, any_spec):
        ref = scipy_twin(any_spec)
        x = np.linspace(0.01, 3 * any_spec.mean() + 1, 57)
        np.testing.assert_allclose(pdf(any_spec, x), ref.pdf(x), rtol=1e-12, atol=1e-300)
        np.testing.assert_allclose(cdf(any_spec, x), ref.cdf(x), rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(survival(any_spec, x), ref.sf(x), rtol=1e-12, atol=1e-15)

    def test_cdf_at_zero(self, any_spec):
        assert cdf(any_spec, 0.0) == 0.0

    def test_cdf_monotone_and_limit(self, any_spec):
        x = np.linspace(0, survival_quantile(any_spec, 1e-12), 2001)
        F = cdf(any_spec, x)
        assert np.all(np.diff(F) >= 0)
        assert F[-1] == pytest.approx(1.0, abs=1e-12)

    def test_survival_complements_cdf(self, any_spec):
        x = np.linspace(0, 5 * any_spec.mean(), 101)
        np.testing.assert_allclose(survival(any_spec, x), 1.0 - cdf(any_spec, x), atol=2e-16)

    def test_pdf_integrates_to_one(self, any_spec):
        upper = any_spec.scale if any_spec.family is Family.UNIFORM else np.inf
        val, _ = integrate.quad(lambda v: float(pdf(any_spec, v)), 0, upper, limit=200)
        assert val == pytest.approx(1.0, abs=1e-7)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            pdf(DistributionSpec.exponential(), -1.0)

    @pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
    def test_memoryless(self, s):
        e = DistributionSpec.exponential(s)
        g = np.linspace(0, 10, 41)
        a, b = np.meshgrid(g, g)
        np.testing.assert_allclose(survival(e, a + b), survival(e, a) * survival(e, b),
                                   rtol=1e-12, atol=1e-300)


class TestLaplace:
    def test_exponential_half(self):
        assert laplace(DistributionSpec.exponential(1.0), 1.0) == 0.5

    @pytest.mark.parametrize("lam,t", [(1, 1), (2, 0.3), (0.5, 4.0), (3, 0)])
    def test_exponential_closed_form(self, lam, t):
        assert laplace(DistributionSpec.exponential(lam), t) == pytest.approx(1 / (1 + lam * t), rel=1e-15)

    @pytest.mark.parametrize("spec", [
        DistributionSpec.weibull(0.7, 1.3),
        DistributionSpec.weibull(2.0),
        DistributionSpec.gamma(2.5, 0.5),
        DistributionSpec.lognormal(0.8, 2.0),
        DistributionSpec.uniform(2.0),
    ], ids=str)
    @pytest.mark.parametrize("t", [0.1, 1.0, 5.0])
    def test_against_quad(self, spec, t):
        ref = scipy_twin(spec)
        val, _ = integrate.quad(lambda v: math.exp(-t * v) * ref.pdf(v), 0, ref.ppf(1 - 1e-16),
                                limit=400, epsabs=1e-13, epsrel=1e-12)
        assert laplace(spec, t) == pytest.approx(val, abs=1e-9)

    def test_lognormal_negative_t(self):
        with pytest.raises(DomainError):
            laplace(DistributionSpec.lognormal(1.0), -0.1)

    def test_exponential_finiteness_region(self):
        with pytest.raises(DomainError):
            laplace(DistributionSpec.exponential(2.0), -0.5)


class TestSampling:
    def test_deterministic(self):
        spec = DistributionSpec.exponential(1.0)
        a, b = sample(spec, 5, 42), sample(spec, 5, 42)
        assert np.array_equal(a.values, b.values)

    def test_different_seeds_differ(self):
        spec = DistributionSpec.exponential(1.0)
        assert not np.array_equal(sample(spec, 5, 1).values, sample(spec, 5, 2).values)

    def test_weibull_one_mean(self):
        x = sample(DistributionSpec.weibull(1.0, 1.0), 10_000, 7).values
        assert abs(x.mean() - 1.0) < 5 * 1.0 / math.sqrt(x.size)

    @pytest.mark.parametrize("n", [0, -3])
    def test_bad_size(self, n):
        with pytest.raises(ParameterError):
            sample(DistributionSpec.exponential(2.0), n, 1)

    def test_bad_seed(self):
        with pytest.raises(ParameterError):
            sample(DistributionSpec.exponential(), 3, -1)

    def test_ks_distance(self, any_spec):
        x = sample(any_spec, 100_000, 2024).values
        d = stats.kstest(x, scipy_twin(any_spec).cdf).statistic
        assert d < 0.01

    def test_values_positive(self, any_spec):
        assert np.all(sample(any_spec, 5000, 3).values > 0)

    def test_open_uniform_bounds(self):
        u = open_uniform(generator(9), 200_000)
        assert u.min() > 0.0 and u.max() < 1.0

    def test_gamma_small_shape_moments(self):
        spec = DistributionSpec.gamma(0.3, 2.0)
        x = sample(spec, 200_000, 11).values
        se = math.sqrt(spec.variance() / x.size)
        assert abs(x.mean() - spec.mean()) < 5 * se


class TestSample:
    def test_rejects_nonpositive(self):
        with pytest.raises(DataError, match="#2"):
            Sample([1.0, 0.0, 2.0])

    def test_rejects_empty(self):
        with pytest.raises(DataError):
            Sample([])

    def test_immutable(self):
        s = Sample([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 3.0


class TestSubstreams:
    def test_splitmix_reference(self):
        # first outputs of the reference SplitMix64 generator seeded with 0
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    @given(st.integers(0, 2**64 - 1), st.integers(0, 10**6))
    @settings(max_examples=200)
    def test_in_range(self, master, r):
        assert 0 <= substream_seed(master, r) < 2**64

    def test_distinct(self):
        seeds = {substream_seed(12345, r) for r in range(10_000)}
        assert len(seeds) == 10_000
