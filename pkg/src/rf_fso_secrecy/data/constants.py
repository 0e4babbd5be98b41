"""Constants for turbulence regimes, model presets and figure sweeps."""

from itertools import product

TURBULENCE = {
    "strong": (2.296, 2),
    "moderate": (4.2, 3),
    "weak": (8.0, 4),
}

POINTING_EPSILONS = (1.0, 6.7)

DETECTIONS = ("hd", "imdd")

# eta = 1 is singular in the alpha-eta-mu constants
ETA_NEAR_ONE = 1.0001

# g_d = 0 is replaced by this guard in the direct (g_d, omega_cap_d) form
G_D_GUARD = 1e-4

SWEEP_RANGE_DB = (0.0, 40.0)

BASE_SCENARIO = {
    "rf_main.alpha": 4.0,
    "rf_main.eta": ETA_NEAR_ONE,
    "rf_main.mu": 1.0,
    "rf_main.omega_db": 10.0,
    "rf_eve.alpha": 4.0,
    "rf_eve.eta": ETA_NEAR_ONE,
    "rf_eve.mu": 1.0,
    "rf_eve.omega_db": 0.0,
    "fso.alpha_d": 2.296,
    "fso.beta_d": 2,
    "fso.g_d": 2.0,
    "fso.omega_cap_d": 2.0,
    "fso.epsilon": 6.7,
    "fso.detection": "hd",
    "fso.u_r_db": 10.0,
    "rs_bits": 0.0,
}

PRESETS = {
    "alpha-mu-malaga": {"alpha": 4.0, "mu": 1.0, "g_d": 2.0, "omega_cap_d": 1.0, "rho": 0.0},
    "eta-mu-malaga": {"alpha": 6.0, "mu": 3.0, "g_d": 2.0, "omega_cap_d": 4.0, "rho": 0.0},
    "nakagami-gg": {"alpha": 2.0, "mu": 1.0, "g_d": G_D_GUARD, "omega_cap_d": 1.0, "rho": 1.0},
    "rayleigh-gg": {"alpha": 2.0, "mu": 0.5, "g_d": G_D_GUARD, "omega_cap_d": 1.0, "rho": 1.0},
    "weibull-lognormal": {"alpha": 4.0, "mu": 0.5, "g_d": G_D_GUARD, "omega_cap_d": 1.3265, "rho": 0.0},
}

PRESET_SETTING = {
    "fso.alpha_d": 8.0,
    "fso.beta_d": 4,
    "fso.u_r_db": 20.0,
    "rf_eve.omega_db": -10.0,
    "rs_bits": 0.1,
}

def preset_values(name: str) -> dict:
    """Scenario key/values for one model preset over the shared sweep setting."""
    row = PRESETS[name]
    values = {**BASE_SCENARIO, **PRESET_SETTING}
    for link in ("rf_main", "rf_eve"):
        values[f"{link}.alpha"] = row["alpha"]
        values[f"{link}.mu"] = row["mu"]
    values["fso.g_d"] = row["g_d"]
    values["fso.omega_cap_d"] = row["omega_cap_d"]
    return values

def _turbulence(name: str) -> dict:
    alpha_d, beta_d = TURBULENCE[name]
    return {"fso.alpha_d": alpha_d, "fso.beta_d": beta_d}

def _turbulence_by_detection(**fixed) -> list[tuple[str, dict]]:
    return [
        (f"{name}-{det}", {**fixed, **_turbulence(name), "fso.detection": det})
        for name, det in product(TURBULENCE, DETECTIONS)
    ]

def _turbulence_by_pointing(**fixed) -> list[tuple[str, dict]]:
    return [
        (
            f"{name}-eps{eps:g}-{det}",
            {**fixed, **_turbulence(name), "fso.epsilon": eps, "fso.detection": det},
        )
        for name, eps, det in product(TURBULENCE, POINTING_EPSILONS, DETECTIONS)
    ]

def _epsilon_by_detection(**fixed) -> list[tuple[str, dict]]:
    return [
        (f"eps{eps:g}-{det}", {**fixed, **_turbulence("strong"), "fso.epsilon": eps, "fso.detection": det})
        for eps, det in product(POINTING_EPSILONS, DETECTIONS)
    ]

FIGURES = {
    2: {
        "metric": "asc",
        "sweep_key": "rf_main.omega_db",
        "title": "ASC versus main-link average SNR",
        "curves": _turbulence_by_detection(),
    },
    3: {
        "metric": "asc",
        "sweep_key": "fso.u_r_db",
        "title": "ASC versus FSO electrical SNR",
        "curves": _turbulence_by_detection(),
    },
    4: {
        "metric": "sop",
        "sweep_key": "rf_main.omega_db",
        "title": "SOP lower bound versus main-link average SNR",
        "curves": _turbulence_by_detection(**{"rs_bits": 0.1}),
    },
    5: {
        "metric": "asc",
        "sweep_key": "fso.u_r_db",
        "title": "ASC versus FSO electrical SNR under pointing error",
        "curves": _epsilon_by_detection(),
    },
    6: {
        "metric": "pnsc",
        "sweep_key": "rf_main.omega_db",
        "title": "PNSC under pointing error",
        "curves": _epsilon_by_detection(**{"rf_eve.omega_db": -5.0}),
    },
    7: {
        "metric": "pnsc",
        "sweep_key": "rf_main.omega_db",
        "title": "PNSC versus main-link average SNR",
        "curves": _turbulence_by_pointing(**{"rf_eve.omega_db": -10.0}),
    },
    8: {
        "metric": "sop",
        "sweep_key": "rf_main.omega_db",
        "title": "SOP lower bound with a stronger eavesdropper",
        "curves": _turbulence_by_pointing(**{"rf_eve.omega_db": 5.0, "rs_bits": 0.1}),
    },
    9: {
        "metric": "asc",
        "sweep_key": "rf_main.omega_db",
        "title": "ASC for several eavesdropper SNRs",
        "curves": [
            (f"omega_v{omega_v:g}-{det}", {"rf_eve.omega_db": omega_v, "fso.detection": det})
            for omega_v, det in product((-5.0, 0.0, 5.0), DETECTIONS)
        ],
    },
    10: {
        "metric": "sop",
        "sweep_key": "rf_main.omega_db",
        "title": "SOP lower bound for several main-link fading parameters",
        "curves": [
            (
                f"a{alpha:g}-mu{mu:g}-omega_v{omega_v:g}",
                {
                    **_turbulence("moderate"),
                    "rf_main.alpha": alpha,
                    "rf_main.mu": mu,
                    "rf_eve.omega_db": omega_v,
                    "fso.epsilon": 1.0,
                    "rs_bits": 0.1,
                },
            )
            for (alpha, mu), omega_v in product(((2.0, 0.5), (4.0, 1.0)), (0.0, 5.0))
        ],
    },
    11: {
        "metric": "pnsc",
        "sweep_key": "rf_main.omega_db",
        "title": "PNSC for several eavesdropper fading parameters",
        "curves": [
            (
                f"av{alpha:g}-muv{mu:g}-omega_v{omega_v:g}",
                {
                    **_turbulence("weak"),
                    "rf_main.alpha": 2.0,
                    "rf_main.mu": 1.0,
                    "rf_eve.alpha": alpha,
                    "rf_eve.mu": mu,
                    "rf_eve.omega_db": omega_v,
                    "fso.epsilon": 1.0,
                    "fso.u_r_db": 15.0,
                },
            )
            for (alpha, mu), omega_v in product(((2.0, 0.5), (4.0, 1.0)), (-5.0, 0.0))
        ],
    },
    12: {
        "metric": "sop",
        "sweep_key": "rf_main.omega_db",
        "title": "SOP lower bound for several target secrecy rates",
        "curves": [
            (
                f"rs{rate:g}",
                {**_turbulence("weak"), "fso.u_r_db": 5.0, "rf_eve.omega_db": -5.0, "rs_bits": rate},
            )
            for rate in (0.1, 0.5, 1.0)
        ],
    },
    13: {
        "metric": "sop",
        "sweep_key": "rf_main.omega_db",
        "title": "SOP lower bound for the classical special cases",
        "presets": list(PRESETS),
    },
}

def figure_curves(fig_id: int) -> list[tuple[str, dict]]:
    """(label, scenario values) for every curve of a figure."""
    figure = FIGURES[fig_id]
    if "presets" in figure:
        return [(name, preset_values(name)) for name in figure["presets"]]
    return [(label, {**BASE_SCENARIO, **overrides}) for label, overrides in figure["curves"]]
