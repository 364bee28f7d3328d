import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy import stats as sps

from uncloneq.errors import NegativeX
from uncloneq.linalg import make_rng
from uncloneq.stats import (
    ERLANG_MAX_CONSTANT,
    ErlangParams,
    erlang_cdf,
    erlang_pdf,
    erlang_sample,
    erlang_sample_from_normals,
    max_over_sum_estimate,
)


class TestPdf:
    def test_exponential_at_zero(self):
        assert erlang_pdf(ErlangParams(1, 1.0), 0.0) == 1.0

    def test_shape_two_at_one(self):
        assert abs(erlang_pdf(ErlangParams(2, 1.0), 1.0) - math.exp(-1)) < 1e-15

    def test_mode_of_shape_two(self):
        p = ErlangParams(2, 1.0)
        xs = np.linspace(0.0, 6.0, 1201)
        vals = [erlang_pdf(p, x) for x in xs]
        assert abs(xs[int(np.argmax(vals))] - 1.0) < 5e-3

    def test_matches_scipy(self):
        for k, lam in [(1, 1.0), (2, 0.5), (5, 2.0)]:
            p = ErlangParams(k, lam)
            for x in np.linspace(0.0, 12.0, 37):
                ref = sps.erlang.pdf(x, k, scale=1.0 / lam)
                assert abs(erlang_pdf(p, float(x)) - ref) < 1e-12

    def test_rejects_negative(self):
        with pytest.raises(NegativeX):
            erlang_pdf(ErlangParams(1, 1.0), -0.5)


class TestCdf:
    def test_at_zero(self):
        assert erlang_cdf(ErlangParams(3, 2.0), 0.0) == 0.0

    def test_exponential_median(self):
        assert abs(erlang_cdf(ErlangParams(1, 1.0), math.log(2)) - 0.5) < 1e-15

    def test_saturates(self):
        assert abs(erlang_cdf(ErlangParams(1, 1.0), 50.0) - 1.0) < 1e-20

    def test_nondecreasing_and_bounded(self):
        p = ErlangParams(4, 1.5)
        vals = [erlang_cdf(p, x) for x in np.linspace(0, 20, 200)]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_is_antiderivative_of_pdf(self):
        for k, lam in [(1, 1.0), (3, 0.5), (6, 2.0)]:
            p = ErlangParams(k, lam)
            hi = 10 * k / lam
            est, _ = integrate.quad(lambda x: erlang_pdf(p, x), 0.0, hi, limit=200)
            assert abs(est - erlang_cdf(p, hi)) < 1e-6

    def test_matches_scipy(self):
        for k, lam in [(2, 1.0), (4, 0.5)]:
            p = ErlangParams(k, lam)
            for x in np.linspace(0.0, 15.0, 31):
                ref = sps.erlang.cdf(x, k, scale=1.0 / lam)
                assert abs(erlang_cdf(p, float(x)) - ref) < 1e-12


class TestSampling:
    def test_mean_shape_three_rate_two(self):
        gen = make_rng(8)
        p = ErlangParams(3, 2.0)
        n = 100_000
        vals = np.array([erlang_sample(p, gen) for _ in range(n)])
        assert abs(vals.mean() - 1.5) < 0.02
        assert np.all(vals >= 0)

    def test_empirical_cdf_at_median(self):
        gen = make_rng(9)
        p = ErlangParams(2, 1.0)
        median = sps.erlang.median(2, scale=1.0)
        vals = np.array([erlang_sample(p, gen) for _ in range(40_000)])
        assert abs(np.mean(vals <= median) - erlang_cdf(p, median)) < 0.01

    def test_normal_squares_route_agrees(self):
        gen = make_rng(10)
        p = ErlangParams(2, 0.5)
        n = 40_000
        a = np.array([erlang_sample(p, gen) for _ in range(n)])
        b = np.array([erlang_sample_from_normals(p, gen) for _ in range(n)])
        assert abs(a.mean() - b.mean()) < 0.1
        for q in (0.25, 0.5, 0.75):
            assert abs(np.quantile(a, q) - np.quantile(b, q)) < 0.1

    def test_param_validation(self):
        with pytest.raises(ValueError):
            ErlangParams(0, 1.0)
        with pytest.raises(ValueError):
            ErlangParams(2, 0.0)


class TestMaxOverSum:
    def test_single_block_is_one(self, rng):
        assert max_over_sum_estimate([5], 1.0, 100, rng) == (1.0, 0.0)

    def test_two_exponentials(self):
        mean, stderr = max_over_sum_estimate([1, 1], 0.5, 100_000, make_rng(11))
        assert abs(mean - 0.75) < 0.005
        assert stderr < 0.002

    def test_scale_invariance(self):
        m1, s1 = max_over_sum_estimate([1] * 8, 0.5, 50_000, make_rng(12))
        m2, s2 = max_over_sum_estimate([1] * 8, 7.0, 50_000, make_rng(13))
        assert abs(m1 - m2) < 3 * (s1 + s2)

    def test_heterogeneous_shapes(self):
        # the big block dominates: ratio concentrates near its share
        mean, _ = max_over_sum_estimate([50, 1, 1], 1.0, 20_000, make_rng(14))
        assert 0.8 < mean < 1.0

    @pytest.mark.parametrize("n", [4, 16, 64, 256, 1024])
    def test_logarithmic_lower_bound(self, n):
        mean, stderr = max_over_sum_estimate([1] * n, 0.5, 100_000, make_rng(n))
        bound = ERLANG_MAX_CONSTANT * math.log2(n) / n
        assert mean >= bound - 3 * stderr

    def test_input_validation(self, rng):
        with pytest.raises(ValueError):
            max_over_sum_estimate([], 1.0, 10, rng)
        with pytest.raises(ValueError):
            max_over_sum_estimate([1, 0], 1.0, 10, rng)
        with pytest.raises(ValueError):
            max_over_sum_estimate([1], -1.0, 10, rng)
        with pytest.raises(ValueError):
            max_over_sum_estimate([1], 1.0, 0, rng)


def test_explicit_constant_value():
    # (1 - 1/e - 1/2) / (2 log2 e), quoted rounded as 0.0457
    assert abs(ERLANG_MAX_CONSTANT - 0.0457) < 2e-4
    assert ERLANG_MAX_CONSTANT > 0.0457


@given(
    k=st.integers(min_value=1, max_value=12),
    lam=st.floats(min_value=0.05, max_value=20.0),
    x=st.floats(min_value=0.0, max_value=200.0),
)
@settings(max_examples=200, deadline=None)
def test_pdf_nonnegative_cdf_bounded(k, lam, x):
    p = ErlangParams(k, lam)
    assert erlang_pdf(p, x) >= 0.0
    c = erlang_cdf(p, x)
    assert -1e-15 <= c <= 1.0 + 1e-15


@given(
    k=st.integers(min_value=1, max_value=8),
    lam=st.floats(min_value=0.1, max_value=5.0),
    x=st.floats(min_value=0.0, max_value=30.0),
    dx=st.floats(min_value=0.0, max_value=10.0),
)
@settings(max_examples=200, deadline=None)
def test_cdf_monotone(k, lam, x, dx):
    p = ErlangParams(k, lam)
    assert erlang_cdf(p, x + dx) >= erlang_cdf(p, x) - 1e-12
