import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import brownian_model, deterministic_model, gamma_model, mixed_model, mm1_model, stable_model, uniform_model
from pk_levy import (
    CompoundPoisson,
    DomainError,
    ExponentialLaw,
    LevyModel,
    StableSmallJumps,
    TabulatedTail,
    exponent_view,
    phi,
    phi_prime_zero,
    pk_lst,
    pk_lst_decomposed,
    truncate,
    validate,
)

DECOMPOSABLE = [mixed_model, brownian_model, mm1_model, gamma_model, deterministic_model, uniform_model]


def tabulated_model():
    tab = TabulatedTail((0.5, 1.0, 2.0, 4.0), (1.0, 0.6, 0.3, 0.1))
    return validate(LevyModel(drift_c=3.0, sigma2=1.0, jumps=tab))


class TestPhi:
    def test_mixed(self, mixed_view):
        assert phi(mixed_view, 1.0) == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("make", DECOMPOSABLE)
    def test_zero(self, make):
        assert phi(exponent_view(make()), 0.0) == 0.0

    def test_stable(self, stable):
        view = exponent_view(stable)
        assert view.form == "mu_form"
        assert phi(view, 1.0) == pytest.approx(1.0 + math.sqrt(math.pi) / 0.75, rel=1e-13)
        assert phi(view, 1.0) == pytest.approx(oracles.stable_phi(1.0, 1.0, 1.5, 1.0), rel=1e-12)

    def test_negative_alpha(self, mixed_view):
        with pytest.raises(DomainError):
            phi(mixed_view, -0.1)

    def test_vectorized(self, mixed_view):
        a = np.array([0.0, 0.5, 1.0])
        want = 2 * a + 0.5 * a * a - a / (1 + a)
        np.testing.assert_allclose(phi(mixed_view, a), want, rtol=1e-15)

    @pytest.mark.parametrize("make", DECOMPOSABLE + [tabulated_model])
    @given(a1=st.floats(0.0, 20.0), a2=st.floats(0.0, 20.0), t=st.floats(0.0, 1.0))
    @settings(max_examples=25, deadline=None)
    def test_convex(self, make, a1, a2, t):
        view = exponent_view(make())
        mid = phi(view, t * a1 + (1 - t) * a2)
        assert mid <= t * phi(view, a1) + (1 - t) * phi(view, a2) + 1e-9

    @pytest.mark.parametrize("make", DECOMPOSABLE)
    def test_finite_difference_derivative(self, make):
        view = exponent_view(make())
        hs = [1e-3, 1e-4, 1e-5]
        # Richardson on forward differences: 2 D(h/2) - D(h) removes the O(h) term
        d = [float(phi(view, h)) / h for h in hs]
        rich = [2 * float(phi(view, h / 2)) / (h / 2) - dh for h, dh in zip(hs, d)]
        for value in rich:
            assert value == pytest.approx(phi_prime_zero(view), abs=1e-6)


class TestPhiPrimeZero:
    def test_mixed(self, mixed_view):
        assert phi_prime_zero(mixed_view) == 1.0

    def test_brownian(self, brownian):
        assert phi_prime_zero(exponent_view(brownian)) == 1.0

    @pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-4])
    def test_truncated_stable(self, stable, eps):
        assert phi_prime_zero(truncate(exponent_view(stable), eps)) == 1.0


class TestPkLst:
    def test_brownian(self, brownian):
        assert pk_lst(exponent_view(brownian), 1.0) == 0.5

    @pytest.mark.parametrize("make", DECOMPOSABLE)
    def test_zero_limit(self, make):
        view = exponent_view(make())
        assert pk_lst(view, 0.0) == 1.0
        assert pk_lst(view, 1e-9) == pytest.approx(1.0, abs=1e-7)

    def test_stable_zero_limit(self, stable):
        # alpha / phi(alpha) = 1 / (1 + k sqrt(alpha)): the approach to 1 is only sqrt-fast
        k = math.sqrt(math.pi) / 0.75
        for a in (1e-4, 1e-10, 1e-20):
            assert pk_lst(exponent_view(stable), a) == pytest.approx(1.0 / (1.0 + k * math.sqrt(a)), rel=1e-13)

    def test_mm1(self, mm1):
        assert pk_lst(exponent_view(mm1), 1.0) == pytest.approx(2.0 / 3.0, rel=1e-15)
        for a in (0.1, 2.0, 30.0):
            assert pk_lst(exponent_view(mm1), a) == pytest.approx(oracles.mm1_lst(0.5, 1.0, a), rel=1e-14)

    @pytest.mark.parametrize("make", DECOMPOSABLE + [tabulated_model])
    def test_two_way_evaluation(self, make):
        view = exponent_view(make())
        a = np.logspace(-3, 3, 61)
        np.testing.assert_allclose(pk_lst_decomposed(view, a), pk_lst(view, a), rtol=1e-12)

    @pytest.mark.parametrize("make", DECOMPOSABLE)
    def test_mu_form_agrees(self, make):
        model = make()
        a = np.logspace(-2, 2, 21)
        np.testing.assert_allclose(pk_lst(exponent_view(model, "mu_form"), a), pk_lst(exponent_view(model), a), rtol=1e-12)

    def test_in_unit_interval(self, mixed_view):
        a = np.logspace(-3, 3, 50)
        v = pk_lst(mixed_view, a)
        assert np.all((v > 0) & (v <= 1))
        assert np.all(np.diff(v) < 0)

    @pytest.mark.parametrize("make", [mixed_model, mm1_model, gamma_model])
    @pytest.mark.parametrize("gamma", [0.1, 3.0, 100.0])
    def test_time_scale_invariance(self, make, gamma):
        model = make()
        scaled = validate(model.model.scaled(gamma))
        a = np.array([0.1, 0.3, 1.0, 3.0, 10.0])
        np.testing.assert_allclose(pk_lst(exponent_view(scaled), a), pk_lst(exponent_view(model), a), rtol=1e-12)

    def test_domain(self, mixed_view):
        with pytest.raises(DomainError):
            pk_lst(mixed_view, -1.0)


class TestTruncate:
    def test_stable_at_one(self, stable):
        view = truncate(exponent_view(stable), 1.0)
        m = view.model
        assert m.jumps.activity() == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert m.nu_bar == pytest.approx(2.0, rel=1e-14)
        assert m.drift_c == pytest.approx(3.0, rel=1e-14)
        assert m.decomposable and m.jumps.finite_activity
        assert view.form == "truncated"

    def test_bad_level(self, stable):
        with pytest.raises(DomainError):
            truncate(exponent_view(stable), 0.0)

    @pytest.mark.parametrize("eps", [1e-1, 1e-2])
    @pytest.mark.parametrize("alpha", [0.3, 3.0])
    def test_against_quadrature(self, stable, eps, alpha):
        got = phi(truncate(exponent_view(stable), eps), alpha)
        assert got == pytest.approx(oracles.truncated_stable_phi(1.0, 1.0, 1.5, eps, alpha), rel=1e-10)

    def test_c_form_matches_mu_form(self, stable):
        view = truncate(exponent_view(stable), 1e-2)
        a = np.array([0.1, 1.0, 10.0])
        mu_view = exponent_view(view.model, "mu_form")
        np.testing.assert_allclose(phi(view, a), phi(mu_view, a), rtol=1e-12)

    @given(e1=st.floats(1e-4, 1.0), e2=st.floats(1e-4, 1.0), alpha=st.floats(0.0, 20.0))
    @settings(max_examples=30, deadline=None)
    def test_monotone_in_eps(self, e1, e2, alpha):
        lo, hi = sorted((e1, e2))
        view = exponent_view(stable_model())
        assert phi(truncate(view, lo), alpha) >= phi(truncate(view, hi), alpha) - 1e-12 * (1 + alpha**2)

    @pytest.mark.parametrize("make", [mixed_model, gamma_model])
    def test_finite_mean_converges(self, make):
        view = exponent_view(make())
        a = np.array([0.1, 1.0, 10.0])
        errs = [np.max(np.abs(phi(truncate(view, eps), a) - phi(view, a))) for eps in (1e-1, 1e-3, 1e-5)]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-3

    def test_retruncation_keeps_parent(self, stable):
        view = truncate(truncate(exponent_view(stable), 0.1), 0.01)
        # truncation always restarts from the untruncated model
        assert view.parent is stable
        assert view.model.jumps.epsilon == 0.01
        assert phi(view, 2.0) == phi(truncate(exponent_view(stable), 0.01), 2.0)

    def test_finite_mean_required_for_c_form(self, stable):
        from pk_levy import ExponentView

        with pytest.raises(DomainError):
            ExponentView(stable, "c_form")

    def test_truncated_pk_close(self, stable):
        view = exponent_view(stable)
        assert pk_lst(truncate(view, 1e-4), 1.0) == pytest.approx(pk_lst(view, 1.0), abs=1e-3)


def test_compound_poisson_scale_changes_phi_linearly():
    base = validate(LevyModel(drift_c=2.0, sigma2=1.0, jumps=CompoundPoisson(1.0, ExponentialLaw(1.0))))
    scaled = validate(base.model.scaled(3.0))
    assert phi(exponent_view(scaled), 2.0) == pytest.approx(3.0 * phi(exponent_view(base), 2.0), rel=1e-15)


def test_stable_c_form_missing():
    m = validate(LevyModel(mu=1.0, jumps=StableSmallJumps(2.0, 1.2)))
    assert exponent_view(m).form == "mu_form"
