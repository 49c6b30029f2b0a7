"""Reference data for the Egyptian case studies and the named run presets."""

from __future__ import annotations

import copy
from functools import lru_cache
from importlib import resources

from .markov import DieselRates, UnitRates
from .voltage import GridPoint, TurbinePQData, load_pq_datasheet
from .wind import SiteProfile, TurbinePowerCurve, WeibullParams, WindSpeedTable, ingest_wind_table

#: Height above ground of the measured climatologies (m).
MEASUREMENT_HEIGHT = 24.5

BUILTIN_TABLES = {"el_galala": "el_galala.csv", "zafarana": "zafarana.csv"}
BUILTIN_DATASHEETS = {"type_a": "type_a.yaml", "type_d": "type_d.yaml"}

# Emergency diesel generators of a nuclear plant (per hour).
DG_RATES = DieselRates(failure_rate=5.2e-3, repair_rate=0.05, common_cause_rate=2.59e-4)
# Wind turbines feeding the emergency bus and the El Dabaa wind regime.
WT_RATES = UnitRates(failure_rate=0.00073266, repair_rate=0.016423)
# Shape 11.05 is unusually large for wind; kept as tabulated.
EL_DABAA_WEIBULL = WeibullParams(shape=11.05, scale=5.64)
WT_EPS_CURVE = TurbinePowerCurve(cut_in=3.0, rated_speed=12.0, cut_out=25.0,
                                 rated_power=2.0, hub_height=80.0)

# Grid data of the two candidate sites.
EL_DABAA_GRID = GridPoint(500.0, 1000.0, 85.0, "El Dabaa")
ZAFARANA_GRID = GridPoint(220.0, 600.0, 50.0, "Zafarana")
ANNUAL_MEAN_SPEED = {"El Dabaa": 7.5, "Zafarana": 8.5}


@lru_cache(maxsize=None)
def builtin_table(name: str) -> WindSpeedTable:
    fname = BUILTIN_TABLES[name]
    text = resources.files("windnpp").joinpath("data", fname).read_text(encoding="utf-8")
    return ingest_wind_table(text, MEASUREMENT_HEIGHT, site_name=name)


@lru_cache(maxsize=None)
def builtin_datasheet(name: str) -> TurbinePQData:
    ref = resources.files("windnpp").joinpath("data", BUILTIN_DATASHEETS[name])
    with resources.as_file(ref) as path:
        return load_pq_datasheet(path)


def zafarana_site() -> SiteProfile:
    return SiteProfile(builtin_table("zafarana"))


def el_dabaa_site() -> SiteProfile:
    """El Dabaa stand-in: the nearby El Galala climatology plus the site Weibull fit."""
    return SiteProfile(builtin_table("el_galala"), weibull=EL_DABAA_WEIBULL)


# -- run presets (same schema as a YAML run config) --------------------------

_SITES = {
    "zafarana": {"table": "builtin:zafarana", "reference_height": MEASUREMENT_HEIGHT,
                 "shear_exponent": 0.1429},
    "el_dabaa": {"table": "builtin:el_galala", "reference_height": MEASUREMENT_HEIGHT,
                 "shear_exponent": 0.1429, "weibull": {"shape": 11.05, "scale": 5.64}},
}

_SCENARIO_TURBINES = {
    "zafarana_existing": {"curve": {"cut_in": 4, "rated_speed": 10, "cut_out": 23,
                                    "rated_power": 2, "hub_height": 80}},
    "scenario_I": {"curve": {"cut_in": 4, "rated_speed": 10, "cut_out": 23,
                             "rated_power": 2, "hub_height": 80}},
    "scenario_II": {"curve": {"cut_in": 4, "rated_speed": 12, "cut_out": 25,
                              "rated_power": 2, "hub_height": 80}},
    "scenario_III": {"curve": {"cut_in": 4, "rated_speed": 13, "cut_out": 25,
                               "rated_power": 2, "hub_height": 80}},
}

# Table of PQ scenarios: the El Dabaa columns are evaluated at a 70 degree
# impedance angle, not the 85 degrees listed in the site data.
_PQ_GRIDS = {
    "el_dabaa_pcc": {"nominal_voltage": 500, "short_circuit_power": 1000, "impedance_angle": 70},
    "zafarana_pcc": {"nominal_voltage": 220, "short_circuit_power": 600, "impedance_angle": 50},
}

_PQ_SCENARIOS = [
    {"name": "Scenario 1", "turbine": "type_a", "grid": "el_dabaa_pcc", "v_a": 7.5, "n_turbines": 333},
    {"name": "Scenario 2", "turbine": "type_a", "grid": "zafarana_pcc", "v_a": 8.5, "n_turbines": 333},
    {"name": "Scenario 3", "turbine": "type_d", "grid": "el_dabaa_pcc", "v_a": 7.5, "n_turbines": 100},
    {"name": "Scenario 4", "turbine": "type_d", "grid": "zafarana_pcc", "v_a": 8.5, "n_turbines": 100},
]

_MEDIAN_COST = {"capacity": 45, "capacity_factor": 0.257, "capital_cost": 2348.64,
                "variable_om": 21.92, "discount_rate": 0.08, "construction_years": 1,
                "lifetime_years": 20}


def _portfolios() -> dict:
    out = {}
    for sc in ("I", "II", "III"):
        for case, site in (("A", "el_dabaa"), ("B", "zafarana")):
            out[f"Case-{case}/Scenario-{sc}"] = [
                {"site": "zafarana", "turbine": "zafarana_existing", "mw": 500},
                {"site": site, "turbine": f"scenario_{sc}", "mw": 500},
            ]
    return out


def _comparisons() -> dict:
    out = {}
    for sc in ("I", "II", "III"):
        existing = {"cost_model": "median", "site": "zafarana", "turbine": "zafarana_existing",
                    "mw": 500}
        out[f"Scenario-{sc}"] = {
            "case_a": [existing, {"cost_model": "median", "site": "el_dabaa",
                                  "turbine": f"scenario_{sc}", "mw": 500, "coupled": True}],
            "case_b": [existing, {"cost_model": "median", "site": "zafarana",
                                  "turbine": f"scenario_{sc}", "mw": 500}],
            "capital_reduction": [round(0.05 * i, 2) for i in range(15)],
            "om_reduction": [0.0, 0.05, 0.10, 0.15, 0.20],
        }
    return out


_PRESETS = {
    "table-3.5-scenarios": {
        "analyses": ["pq"],
        "turbines": {"type_a": {"datasheet": "builtin:type_a"},
                     "type_d": {"datasheet": "builtin:type_d"}},
        "grid_points": _PQ_GRIDS,
        "pq": {"scenarios": _PQ_SCENARIOS},
    },
    "case-ab": {
        "analyses": ["aggregate", "compare"],
        "sites": _SITES,
        "turbines": _SCENARIO_TURBINES,
        "portfolios": _portfolios(),
        "cost_models": {"median": _MEDIAN_COST},
        "comparisons": _comparisons(),
    },
    "dabaa-zafarana": {
        "analyses": ["pq", "reliability", "aggregate", "credit", "lcoe", "compare"],
        "sites": _SITES,
        "turbines": {
            "type_a": {"datasheet": "builtin:type_a"},
            "type_d": {"datasheet": "builtin:type_d"},
            "wt_eps": {"curve": {"cut_in": 3, "rated_speed": 12, "cut_out": 25,
                                 "rated_power": 2, "hub_height": 80}},
            **_SCENARIO_TURBINES,
        },
        "grid_points": _PQ_GRIDS,
        "pq": {"scenarios": _PQ_SCENARIOS},
        "reliability": {
            "t_end": 1000,
            "n_points": 1001,
            "dg": {"failure_rate": 5.2e-3, "repair_rate": 0.05, "common_cause_rate": 2.59e-4},
            "wt": {"failure_rate": 0.00073266, "repair_rate": 0.016423,
                   "turbine": "wt_eps", "site": "el_dabaa"},
            "min_output": {"wf_capacity": 100, "min_mw": 20, "t_end": 48, "n_points": 481},
        },
        "portfolios": _portfolios(),
        "credit": {
            "window": "egypt",
            # No hourly archive ships with the package: each scenario's Zafarana
            # climatology stands in for three identical years.
            "histories": {
                f"Scenario-{sc}": {"site": "zafarana", "turbine": f"scenario_{sc}",
                                   "years": [2007, 2008, 2009]}
                for sc in ("I", "II", "III")
            },
            "replacement": [{"installed_mw": 3000, "history": f"Scenario-{sc}"}
                            for sc in ("I", "II", "III")],
        },
        "cost_models": {"median": _MEDIAN_COST},
        "lcoe": {
            "models": ["median"],
            "base": "median",
            "sweeps": {
                "variable_om": [5, 10, 15, 20, 25, 30, 35, 40, 45],
                "discount_rate": [0.0, 0.02, 0.04, 0.06, 0.08, 0.10, 0.12, 0.14],
                "capacity_factor": [0.20, 0.25, 0.30, 0.35, 0.40, 0.45],
                "capital_cost": [1800, 2100, 2400, 2700, 3000, 3300, 3700],
            },
        },
        "comparisons": _comparisons(),
    },
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> dict:
    """Deep copy of a named preset config mapping."""
    try:
        return copy.deepcopy(_PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}") from None
