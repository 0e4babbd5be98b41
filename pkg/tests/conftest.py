"""Pytest configuration for rf_fso_secrecy tests."""

import sys
from pathlib import Path

import pytest


SRC_PATH = Path(__file__).resolve().parents[1] / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.append(str(SRC_PATH))

from rf_fso_secrecy.models import (  # noqa: E402
    Detection,
    FsoChannelParams,
    Precision,
    RfFadingParams,
    Scenario,
)

# eta this close to 1 keeps a single Bessel-series term above 1e-12
ETA_ONE = 1.0 + 2e-6


def build_rf(alpha=2.0, mu=1.0, omega_db=10.0, eta=ETA_ONE) -> RfFadingParams:
    return RfFadingParams.from_db(alpha=alpha, eta=eta, mu=mu, omega_db=omega_db)


def build_fso(
    alpha_d=2.296, beta_d=2, g_d=2.0, omega_cap_d=2.0, epsilon=6.7, detection="hd", u_r=10.0
) -> FsoChannelParams:
    return FsoChannelParams(
        alpha_d=alpha_d,
        beta_d=beta_d,
        g_d=g_d,
        omega_cap_d=omega_cap_d,
        epsilon=epsilon,
        detection=Detection(detection),
        u_r=u_r,
    )


def build_scenario(
    main=None, eve=None, fso=None, rate_rs=0.0
) -> Scenario:
    return Scenario(
        main_rf=main or build_rf(omega_db=10.0),
        eve_rf=eve or build_rf(omega_db=0.0),
        fso=fso or build_fso(),
        rate_rs=rate_rs,
    )


@pytest.fixture
def scenario() -> Scenario:
    return build_scenario()


@pytest.fixture
def precision() -> Precision:
    return Precision(rel_tol=1e-9, abs_tol=1e-13, max_contour_nodes=8192)


SCENARIO_TEXT = """\
# SOP sweep over the main link SNR
rf_main.alpha = 2
rf_main.eta = 1.0001
rf_main.mu = 1
rf_main.omega_db = 10
rf_eve.alpha = 2
rf_eve.eta = 1.0001
rf_eve.mu = 1
rf_eve.omega_db = 0
fso.alpha_d = 8
fso.beta_d = 4
fso.g_d = 2
fso.omega_cap_d = 2
fso.epsilon = 6.7
fso.detection = hd
fso.u_r_db = 10
rs_bits = 0.1
sweep.key = rf_main.omega_db
sweep.from_db = 0
sweep.to_db = 10
sweep.points = 2
"""


@pytest.fixture
def scenario_text() -> str:
    return SCENARIO_TEXT
