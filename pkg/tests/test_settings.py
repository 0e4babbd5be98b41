"""Tests for configuration loading."""

import math

import pytest

from rf_fso_secrecy.settings import Settings, settings
from rf_fso_secrecy.specfun import default_precision


def test_defaults_without_config_file(tmp_path):
    s = Settings.load(tmp_path / "missing.yaml")
    assert s.montecarlo.n_samples == 10_000_000
    assert s.montecarlo.n_batches == 100
    assert s.figures.sweep_points == 9
    assert s.precision.max_contour_nodes == 4096


def test_yaml_values_are_applied(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "workers: 2\nprecision:\n  rel_tol: 1.0e-10\nmontecarlo:\n  fso_sampler: generative\n",
        encoding="utf-8",
    )
    s = Settings.load(path)
    assert s.workers == 2
    assert s.precision.rel_tol == 1e-10
    assert s.montecarlo.fso_sampler == "generative"
    assert s.quadrature.max_nodes == 20000


def test_environment_overrides(tmp_path, monkeypatch):
    path = tmp_path / "config.yaml"
    path.write_text("montecarlo:\n  seed: 1\n", encoding="utf-8")
    monkeypatch.setenv("RF_FSO_SEED", "77")
    monkeypatch.setenv("RF_FSO_MC_SAMPLES", "20000")
    monkeypatch.setenv("RF_FSO_RESULTS_DIR", str(tmp_path / "out"))
    monkeypatch.setenv("LOG_LEVEL", "DEBUG")
    s = Settings.load(path)
    assert s.montecarlo.seed == 77
    assert s.montecarlo.n_samples == 20000
    assert s.results_dir == tmp_path / "out"
    assert s.log_level == "DEBUG"


def test_ensure_directories(tmp_path):
    s = Settings(
        results_dir=tmp_path / "results",
        logs_dir=tmp_path / "results" / "logs",
        figures={"out_dir": tmp_path / "results" / "figures"},
    )
    s.ensure_directories()
    assert (tmp_path / "results" / "logs").is_dir()
    assert (tmp_path / "results" / "figures").is_dir()


def test_default_precision_follows_settings():
    prec = default_precision()
    assert prec.rel_tol == settings.precision.rel_tol
    assert prec.max_contour_nodes == settings.precision.max_contour_nodes


def test_split_shares_the_budget_between_levels():
    prec = default_precision()
    level = prec.split(2)
    assert level.rel_tol * math.sqrt(2.0) == pytest.approx(prec.rel_tol)
    assert level.abs_tol * math.sqrt(2.0) == pytest.approx(prec.abs_tol)
    assert level.max_contour_nodes == prec.max_contour_nodes
