import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

import oracles
from conftest import gamma_model, mixed_model, mm1_model, uniform_model
from pk_levy import (
    DomainError,
    InversionConfig,
    InversionUnstable,
    decompose,
    exponent_view,
    integrate_tail,
    invert_lst_to_cdf,
    ks_distance,
    ks_two_sample,
    pk_lst,
    sample_stationary,
    stationary_cdf,
    zero_atom,
)


def exp_lst(s):
    return 1.0 / (1.0 + s)


class TestInvert:
    def test_exponential(self):
        assert invert_lst_to_cdf(exp_lst, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-8)

    def test_exponential_grid(self):
        x = np.array([0.01, 0.3, 1.0, 4.0, 15.0])
        np.testing.assert_allclose(invert_lst_to_cdf(exp_lst, x), -np.expm1(-x), atol=1e-8)

    def test_mm1(self, mm1):
        view = exponent_view(mm1)
        assert zero_atom(view) == 0.5
        assert stationary_cdf(view, 2.0) == pytest.approx(oracles.mm1_cdf(0.5, 1.0, 2.0), abs=1e-8)
        assert oracles.mm1_cdf(0.5, 1.0, 2.0) == pytest.approx(0.816060, abs=1e-6)

    def test_mm1_zero_limit(self, mm1):
        assert stationary_cdf(exponent_view(mm1), 1e-9) == pytest.approx(0.5, abs=1e-8)

    @pytest.mark.parametrize("make", [mixed_model, mm1_model, gamma_model])
    def test_total_mass(self, make):
        assert stationary_cdf(exponent_view(make()), 200.0) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("make", [mixed_model, mm1_model, gamma_model, uniform_model])
    def test_monotone_and_bounded(self, make):
        view = exponent_view(make())
        f = stationary_cdf(view, np.linspace(0.01, 30.0, 600), InversionConfig(target=1e-6))
        assert np.all(np.diff(f) >= -1e-6)
        assert np.all((f >= -1e-6) & (f <= 1 + 1e-6))

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_round_trip(self, mixed_view, alpha):
        # E exp(-alpha M) = alpha * int_0^inf exp(-alpha x) F(x) dx, by Gauss-Legendre on panels
        nodes, w = np.polynomial.legendre.leggauss(20)
        edges = np.linspace(0.0, 80.0, 161)
        mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
        half = 0.5 * np.diff(edges)[:, None]
        x = (mid + half * nodes).ravel()
        weights = (half * w).ravel()
        f = stationary_cdf(mixed_view, x)
        got = alpha * np.sum(weights * np.exp(-alpha * x) * f)
        assert got == pytest.approx(pk_lst(mixed_view, alpha), abs=1e-6)

    def test_unstable_reported(self):
        # a single Euler term cannot reach 1e-12 on a kinked transform
        cfg = InversionConfig(series_terms=2, euler_terms=1, target=1e-12)
        with pytest.raises(InversionUnstable, match="Euler error"):
            invert_lst_to_cdf(lambda s: np.exp(-s), 0.5, cfg)

    def test_unchecked_returns_estimate(self):
        cfg = InversionConfig(series_terms=2, euler_terms=1, target=1e-12)
        assert np.isfinite(invert_lst_to_cdf(lambda s: np.exp(-s), 0.5, cfg, check=False))

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            invert_lst_to_cdf(exp_lst, x)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            InversionConfig(series_terms=0)
        with pytest.raises(DomainError):
            InversionConfig(target=1e-20)

    def test_abscissa(self):
        assert InversionConfig(target=1e-8).abscissa == pytest.approx(math.log(1e9), rel=1e-15)


class TestKs:
    def test_exact_batch(self, brownian):
        batch = sample_stationary(decompose(brownian), 21, 1_000_000)
        assert ks_distance(batch, lambda x: -np.expm1(-x)) <= 1.95 / math.sqrt(batch.n)

    def test_zeros_against_exponential(self):
        assert ks_distance(np.zeros(10), lambda x: -np.expm1(-x)) == 1.0

    def test_single_point_uniform(self):
        assert ks_distance(np.array([0.5]), lambda x: np.clip(x, 0, 1)) == 0.5

    @given(data=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=200))
    @settings(max_examples=60)
    def test_matches_scipy(self, data):
        v = np.array(data)
        # no atoms: the one-sample statistic agrees with scipy's
        if np.unique(v).size == v.size:
            want = stats.kstest(v, "uniform").statistic
            assert ks_distance(v, lambda x: x) == pytest.approx(want, abs=1e-15)

    def test_atom_aware(self):
        # half the mass at zero: with the left limit supplied the sample matches exactly
        v = np.array([0.0, 0.0, 0.5, 1.0])
        cdf = lambda x: np.where(x >= 0, 0.5 + 0.5 * np.clip(x, 0, 1), 0.0)
        left = lambda x: np.where(x > 0, 0.5 + 0.5 * np.clip(x, 0, 1), 0.0)
        assert ks_distance(v, cdf, left) == pytest.approx(0.25)

    def test_two_sample_against_scipy(self):
        rng = np.random.default_rng(3)
        a, b = rng.exponential(size=500), rng.exponential(size=700)
        assert ks_two_sample(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-15)

    def test_empty(self):
        with pytest.raises(DomainError):
            ks_distance(np.array([]), lambda x: x)


class TestIntegrateTail:
    def test_exponential(self):
        assert integrate_tail(lambda x: math.exp(-x), 0.0, math.inf) == pytest.approx(1.0, rel=1e-10)

    def test_rectangle(self):
        assert integrate_tail(lambda x: 0.5 if x < 2 else 0.0, 0.0, math.inf, points=[2.0]) == pytest.approx(1.0, rel=1e-10)

    def test_power(self):
        got = integrate_tail(lambda x: x**-1.5 / 1.5, 1.0, math.inf)
        assert got == pytest.approx(4.0 / 3.0, rel=1e-10)

    def test_finite_interval(self):
        assert integrate_tail(lambda x: math.exp(-x), 1.0, 2.0) == pytest.approx(math.exp(-1) - math.exp(-2), rel=1e-12)

    def test_empty_interval(self):
        assert integrate_tail(lambda x: 1.0, 3.0, 3.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            integrate_tail(lambda x: 1.0, -1.0, 1.0)
