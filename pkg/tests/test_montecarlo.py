"""Tests for the Monte-Carlo estimators."""

import numpy as np
import pytest

from conftest import build_fso, build_rf, build_scenario
from rf_fso_secrecy.models import McConfig, McEstimate
from rf_fso_secrecy.montecarlo import (
    ESTIMATORS,
    estimate_metrics,
    sample_triples,
    variance_report,
)
from rf_fso_secrecy.channels import rng_stream
from rf_fso_secrecy.safety import ValidationError


def _config(**overrides):
    values = dict(n_samples=100_000, seed=99, n_batches=100, n_streams=1)
    values.update(overrides)
    return McConfig(**values)


def test_estimates_are_reported_for_every_metric():
    estimates = estimate_metrics(build_scenario(rate_rs=0.5), _config())
    assert set(estimates) == set(ESTIMATORS)
    for est in estimates.values():
        assert est.n_effective == 100_000
        assert est.ci_half_width >= est.std_error >= 0.0


def test_estimates_do_not_depend_on_stream_count():
    s = build_scenario(rate_rs=0.3)
    serial = estimate_metrics(s, _config(n_streams=1))
    parallel = estimate_metrics(s, _config(n_streams=4))
    for name in ESTIMATORS:
        assert serial[name].mean == parallel[name].mean
        assert serial[name].std_error == parallel[name].std_error


def test_same_seed_is_reproducible():
    s = build_scenario(rate_rs=0.3)
    first = estimate_metrics(s, _config())
    again = estimate_metrics(s, _config())
    other = estimate_metrics(s, _config(seed=100))
    assert first["asc"].mean == again["asc"].mean
    assert first["asc"].mean != other["asc"].mean


@pytest.mark.parametrize("rate_rs", [0.1, 1.0, 2.0])
def test_lower_bound_never_exceeds_exact_outage(rate_rs):
    estimates = estimate_metrics(build_scenario(rate_rs=rate_rs), _config())
    assert estimates["sop_lower"].mean <= estimates["sop_exact"].mean


def test_bound_is_tight_at_zero_rate():
    estimates = estimate_metrics(build_scenario(rate_rs=0.0), _config())
    assert estimates["sop_lower"].mean == estimates["sop_exact"].mean
    assert estimates["sop_lower"].mean + estimates["pnsc"].mean == pytest.approx(1.0, abs=1e-12)


def test_generative_sampler_is_supported():
    s = build_scenario(fso=build_fso(detection="imdd"))
    inverse = estimate_metrics(s, _config())
    generative = estimate_metrics(s, _config(fso_sampler="generative"))
    gap = abs(inverse["pnsc"].mean - generative["pnsc"].mean)
    assert gap <= 5.0 * (inverse["pnsc"].std_error + generative["pnsc"].std_error)


def test_symmetric_links_give_even_odds():
    # identical Rayleigh RF links and a near-perfect FSO hop
    rayleigh = build_rf(alpha=2.0, mu=0.5, omega_db=0.0)
    s = build_scenario(main=rayleigh, eve=rayleigh, fso=build_fso(u_r=1e9))
    estimates = estimate_metrics(s, _config())
    est = estimates["pnsc"]
    assert abs(est.mean - 0.5) <= est.ci_half_width + 3.0 * est.std_error


def test_sample_triples_order_and_shape():
    s = build_scenario()
    gamma_r, gamma_d, gamma_v = sample_triples(s, rng_stream(1, 0), 50)
    assert gamma_r.shape == gamma_d.shape == gamma_v.shape == (50,)
    assert np.all(gamma_r > 0) and np.all(gamma_d > 0) and np.all(gamma_v > 0)


def test_config_validation():
    with pytest.raises(ValidationError):
        McConfig(n_samples=1000)
    with pytest.raises(ValidationError):
        McConfig(n_samples=100_000, n_streams=3)
    with pytest.raises(ValidationError):
        McConfig(n_samples=100_000, seed=-1)
    with pytest.raises(ValidationError):
        McConfig(n_samples=100_000, fso_sampler="rejection")


def test_variance_report_recommends_scaling():
    est = McEstimate(mean=0.1, std_error=0.01, ci_half_width=0.0258, n_effective=10_000)
    advice = variance_report(est, 0.01)
    assert advice.factor == pytest.approx(100.0)
    assert advice.recommended_n == 1_000_000
    assert not advice.sufficient


def test_variance_report_sufficient_sample():
    est = McEstimate(mean=0.5, std_error=0.0005, ci_half_width=0.0013, n_effective=10_000)
    advice = variance_report(est, 0.01)
    assert advice.sufficient
    assert advice.recommended_n == 10_000


def test_variance_report_zero_mean_is_unbounded():
    est = McEstimate(mean=0.0, std_error=0.0, ci_half_width=0.0, n_effective=10_000)
    advice = variance_report(est, 0.01)
    assert advice.unbounded
    assert advice.recommended_n is None


def test_variance_report_rejects_bad_target():
    est = McEstimate(mean=0.5, std_error=0.01, ci_half_width=0.03, n_effective=10_000)
    with pytest.raises(ValidationError):
        variance_report(est, 0.0)


def test_confidence_interval_coverage_over_seeds():
    # symmetric Rayleigh links: the PNSC is 1/2 up to the FSO outage at u_r = 1e9
    rayleigh = build_rf(alpha=2.0, mu=0.5, omega_db=0.0)
    s = build_scenario(main=rayleigh, eve=rayleigh, fso=build_fso(u_r=1e9))
    covered = 0
    for seed in range(100):
        est = estimate_metrics(s, _config(n_samples=10_000, seed=seed))["pnsc"]
        covered += abs(est.mean - 0.5) <= est.ci_half_width
    assert covered >= 95
