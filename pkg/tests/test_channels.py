"""Tests for the RF and FSO channel models."""

import math

import mpmath
import numpy as np
import pytest
from scipy import integrate, stats
from scipy.special import gammainc

from conftest import build_fso, build_rf
from rf_fso_secrecy.channels import (
    _inverse_table,
    average_snr,
    dual_hop_ccdf,
    dual_hop_cdf,
    electrical_snr,
    fso_ccdf,
    fso_cdf,
    fso_coefficients,
    fso_pdf,
    intensity_moment_ratio,
    mixture_weights,
    rf_cdf,
    rf_cdf_finite_sum,
    rf_pdf,
    rf_sample,
    rf_series,
    fso_sample,
    rng_stream,
)
from rf_fso_secrecy.safety import NonConvergenceError, PreconditionError, ValidationError

TURBULENCE = [(2.296, 2), (4.2, 3), (8.0, 4)]


@pytest.mark.parametrize(
    "alpha,eta,mu",
    [(2.0, 1.0001, 1.0), (4.0, 2.0, 0.5), (3.0, 0.3, 1.5), (2.0, 5.0, 2.0)],
)
def test_rf_pdf_normalizes(alpha, eta, mu):
    p = build_rf(alpha=alpha, eta=eta, mu=mu, omega_db=5.0)
    total, _ = integrate.quad(lambda g: rf_pdf(p, g), 0.0, np.inf, epsabs=1e-12, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_rf_pdf_is_symmetric_in_eta():
    g = np.array([0.1, 1.0, 7.0])
    low = rf_pdf(build_rf(alpha=3.0, eta=0.25, mu=1.0), g)
    high = rf_pdf(build_rf(alpha=3.0, eta=4.0, mu=1.0), g)
    assert np.allclose(low, high, rtol=1e-10)


@pytest.mark.parametrize("gamma", [0.5, 3.0, 20.0])
def test_rf_cdf_matches_pdf_integral(gamma):
    p = build_rf(alpha=3.0, eta=2.0, mu=1.0, omega_db=8.0)
    expected, _ = integrate.quad(lambda g: rf_pdf(p, g), 0.0, gamma, epsabs=1e-12, limit=200)
    assert rf_cdf(p, gamma) == pytest.approx(expected, abs=1e-8)


def test_rf_cdf_nakagami_reduction():
    # alpha = 2 with eta ~ 1 is Nakagami-m with m = 2 mu
    omega = 10.0
    p = build_rf(alpha=2.0, mu=1.5, omega_db=10.0)
    g = np.array([0.5, 5.0, 30.0])
    assert np.allclose(rf_cdf(p, g), gammainc(3.0, 3.0 * g / omega), rtol=1e-6)


def test_rf_cdf_rayleigh_reduction():
    p = build_rf(alpha=2.0, mu=0.5, omega_db=0.0)
    g = np.array([0.1, 1.0, 4.0])
    assert np.allclose(rf_cdf(p, g), 1.0 - np.exp(-g), rtol=1e-6)


def test_rf_cdf_edge_values():
    p = build_rf()
    assert rf_cdf(p, 0.0) == 0.0
    assert rf_cdf(p, 1e9) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_rf_cdf_finite_sum_agrees(mu):
    p = build_rf(alpha=4.0, mu=mu, omega_db=3.0)
    g = np.array([0.2, 1.0, 6.0])
    assert np.allclose(rf_cdf_finite_sum(p, g), rf_cdf(p, g), atol=1e-10)


def test_rf_cdf_finite_sum_needs_integer_two_mu():
    with pytest.raises(PreconditionError):
        rf_cdf_finite_sum(build_rf(mu=0.7), 1.0)


def test_rf_series_single_term_near_eta_one():
    assert rf_series(build_rf()).n_terms == 1


def test_rf_params_reject_eta_one():
    with pytest.raises(ValidationError):
        build_rf(eta=1.0)


@pytest.mark.parametrize("alpha,eta,mu", [(2.0, 1.0001, 1.0), (3.0, 0.5, 1.5)])
def test_rf_sample_matches_cdf(alpha, eta, mu):
    p = build_rf(alpha=alpha, eta=eta, mu=mu, omega_db=4.0)
    draws = rf_sample(p, rng_stream(11, 0), 20000)
    result = stats.kstest(draws, lambda g: rf_cdf(p, g))
    assert result.pvalue > 0.001


def test_rf_sample_edge_cases():
    p = build_rf()
    assert rf_sample(p, rng_stream(1, 0), 0).size == 0
    with pytest.raises(ValidationError):
        rf_sample(p, rng_stream(1, 0), -1)


def test_rng_stream_is_deterministic():
    p = build_rf()
    first = rf_sample(p, rng_stream(5, 3), 100)
    again = rf_sample(p, rng_stream(5, 3), 100)
    other = rf_sample(p, rng_stream(5, 4), 100)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_mixture_weights_sum_to_one():
    for alpha_d, beta_d in TURBULENCE:
        weights = mixture_weights(build_fso(alpha_d=alpha_d, beta_d=beta_d))
        assert weights.sum() == pytest.approx(1.0, rel=1e-12)


def test_mixture_weights_gamma_gamma_limit():
    weights = mixture_weights(build_fso(beta_d=3, g_d=1e-4, omega_cap_d=1.0))
    assert weights[-1] == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("alpha_d,beta_d", TURBULENCE)
@pytest.mark.parametrize("detection", ["hd", "imdd"])
@pytest.mark.parametrize("epsilon", [1.0, 6.7])
def test_fso_pdf_integrates_to_cdf(alpha_d, beta_d, detection, epsilon):
    p = build_fso(alpha_d=alpha_d, beta_d=beta_d, detection=detection, epsilon=epsilon)
    x = np.linspace(math.log(p.u_r) - 12.0, math.log(p.u_r) + 10.0, 4001)
    g = np.exp(x)
    mass = integrate.simpson(fso_pdf(p, g) * g, x=x)
    expected = fso_cdf(p, g[-1]) - fso_cdf(p, g[0])
    assert mass == pytest.approx(expected, abs=1e-6)
    assert fso_cdf(p, p.u_r * 1e8) == pytest.approx(1.0, abs=1e-6)


def test_fso_cdf_matches_mpmath_hd():
    p = build_fso(alpha_d=4.2, beta_d=3)
    eps2 = p.epsilon ** 2
    b = eps2 * p.alpha_d * p.beta_d * (p.g_d + p.omega_cap_d) / (
        (eps2 + 1.0) * (p.g_d * p.beta_d + p.omega_cap_d)
    )
    weights = mixture_weights(p)
    for gamma in (0.5, 10.0, 60.0):
        expected = sum(
            weights[m - 1] * eps2 / (math.gamma(p.alpha_d) * math.gamma(m))
            * mpmath.meijerg(
                [[1.0], [eps2 + 1.0]], [[eps2, p.alpha_d, float(m)], [0.0]], b * gamma / p.u_r
            )
            for m in range(1, p.beta_d + 1)
        )
        assert fso_cdf(p, gamma) == pytest.approx(float(expected), rel=1e-7)


def test_fso_pdf_gamma_gamma_reduction():
    # g_d -> 0 reduces the Malaga law to Gamma-Gamma with pointing error
    p = build_fso(alpha_d=4.2, beta_d=3, g_d=1e-4, omega_cap_d=1.0)
    eps2 = p.epsilon ** 2
    ab = p.alpha_d * p.beta_d
    for gamma in (1.0, 10.0, 40.0):
        z = ab * eps2 / (eps2 + 1.0) * gamma / p.u_r
        expected = eps2 / (math.gamma(p.alpha_d) * math.gamma(p.beta_d) * gamma) * mpmath.meijerg(
            [[], [eps2 + 1.0]], [[eps2, p.alpha_d, float(p.beta_d)], []], z
        )
        assert fso_pdf(p, gamma) == pytest.approx(float(expected), rel=5e-3)


@pytest.mark.parametrize("detection", ["hd", "imdd"])
def test_fso_cdf_and_ccdf_are_complementary(detection):
    p = build_fso(detection=detection)
    g = np.array([0.01, 1.0, 10.0, 100.0, 1e4])
    assert np.allclose(fso_cdf(p, g) + fso_ccdf(p, g), 1.0, atol=1e-8)
    assert np.all(np.diff(fso_cdf(p, g)) >= 0)


def test_fso_cdf_at_zero():
    assert fso_cdf(build_fso(), 0.0) == 0.0
    assert fso_ccdf(build_fso(), 0.0) == 1.0


@pytest.mark.parametrize("method", ["inverse", "generative"])
@pytest.mark.parametrize("detection", ["hd", "imdd"])
def test_fso_sample_matches_cdf(method, detection):
    p = build_fso(alpha_d=4.2, beta_d=3, detection=detection)
    draws = fso_sample(p, rng_stream(23, 1), 20000, method=method)
    result = stats.kstest(draws, lambda g: fso_cdf(p, g))
    assert result.pvalue > 0.001


def test_fso_sample_rejects_unknown_method():
    with pytest.raises(ValidationError):
        fso_sample(build_fso(), rng_stream(1, 0), 10, method="rejection")


def test_electrical_snr_conversion():
    hd = build_fso(detection="hd")
    imdd = build_fso(detection="imdd")
    assert electrical_snr(12.0, hd) == pytest.approx(12.0)
    ratio = intensity_moment_ratio(imdd)
    assert 0.0 < ratio < 1.0
    assert electrical_snr(12.0, imdd) == pytest.approx(12.0 * ratio)
    assert average_snr(imdd) == pytest.approx(imdd.u_r / ratio)


def test_intensity_moment_ratio_matches_generative_sampler():
    p = build_fso(alpha_d=4.2, beta_d=3, detection="imdd")
    draws = fso_sample(p, rng_stream(3, 0), 400000, method="generative")
    # gamma = u (I / E[I])^2, so E[gamma] = u E[I^2] / E[I]^2
    assert draws.mean() == pytest.approx(p.u_r / intensity_moment_ratio(p), rel=0.02)


def test_dual_hop_cdf_combines_hops():
    pr, pd = build_rf(), build_fso()
    g = np.array([0.5, 5.0, 50.0])
    fr, fd = rf_cdf(pr, g), fso_cdf(pd, g)
    assert np.allclose(dual_hop_cdf(pr, pd, g), fr + fd - fr * fd, atol=1e-14)
    assert np.allclose(dual_hop_cdf(pr, pd, g) + dual_hop_ccdf(pr, pd, g), 1.0, atol=1e-8)
    assert dual_hop_cdf(pr, pd, 0.0) == 0.0


@pytest.mark.parametrize("eta", [1.0001, 0.3, 2.0, 5.0, 10.0])
@pytest.mark.parametrize("mu", [0.5, 1.0, 3.0])
def test_rf_series_weights_sum_to_one(eta, mu):
    series = rf_series(build_rf(alpha=3.0, eta=eta, mu=mu), tol=1e-16)
    assert math.fsum(np.exp(series.log_weight)) == pytest.approx(1.0, abs=1e-12)
    assert 0.0 <= series.tail_bound < 1e-16


def test_rf_series_keeps_terms_while_weights_still_grow():
    # with eta = 10 and mu = 3 the first weight ratios exceed one
    p = build_rf(alpha=2.0, eta=10.0, mu=3.0, omega_db=0.0)
    series = rf_series(p)
    assert series.n_terms > 4
    assert 0.0 <= series.tail_bound < 1e-12
    assert rf_cdf(p, 1e9) == pytest.approx(1.0, abs=1e-12)
    total, _ = integrate.quad(lambda g: rf_pdf(p, g), 0.0, np.inf, epsabs=1e-12, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_rf_series_raises_when_term_cap_is_reached():
    with pytest.raises(NonConvergenceError):
        rf_series(build_rf(eta=10.0, mu=3.0), max_terms=3)


def test_rf_sample_matches_cdf_for_unequal_clusters():
    p = build_rf(alpha=2.0, eta=10.0, mu=3.0, omega_db=0.0)
    draws = rf_sample(p, rng_stream(12, 0), 20000)
    assert stats.kstest(draws, lambda g: rf_cdf(p, g)).pvalue > 0.001


def test_rf_cdf_rayleigh_reduction_at_mean():
    p = build_rf(alpha=2.0, mu=0.5, eta=1.0001, omega_db=0.0)
    assert rf_cdf(p, 1.0) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-3)


def test_fso_cdf_derivative_matches_pdf(precision):
    p = build_fso(epsilon=6.7, g_d=2.0, omega_cap_d=2.0, u_r=10.0)
    for gamma in np.geomspace(0.05 * p.u_r, 20.0 * p.u_r, 20):
        h = 1e-3 * gamma
        if fso_cdf(p, gamma, precision) < 0.5:
            slope = (fso_cdf(p, gamma + h, precision) - fso_cdf(p, gamma - h, precision)) / (2 * h)
        else:
            slope = (fso_ccdf(p, gamma - h, precision) - fso_ccdf(p, gamma + h, precision)) / (2 * h)
        assert slope == pytest.approx(fso_pdf(p, gamma, precision), rel=1e-4)


def test_small_exponent_skips_inactive_components():
    # without scatter only the m = beta_d component carries weight
    los = build_fso(alpha_d=8.0, beta_d=3, g_d=0.0, omega_cap_d=1.0, epsilon=6.7)
    assert fso_coefficients(los).small_exponent == pytest.approx(3.0)
    mixed = build_fso(alpha_d=8.0, beta_d=3, g_d=2.0, omega_cap_d=1.0, epsilon=6.7, detection="imdd")
    assert fso_coefficients(mixed).small_exponent == pytest.approx(0.5)


def test_inverse_table_tracks_fso_cdf():
    p = build_fso(alpha_d=4.2, beta_d=3)
    table = _inverse_table(p, 512, 1e-6)
    assert table.max_error <= 1e-6
    points = np.exp(np.linspace(table.log_gamma[0], table.log_gamma[-1], 97)[1:-1] + 1e-3)
    assert np.allclose(table.interp(np.log(points)), fso_cdf(p, points), atol=1e-5)
