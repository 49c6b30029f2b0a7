"""Run configuration: YAML files or built-in presets, validated and resolved.

Errors are raised as :class:`ConfigError` naming the source file, the YAML
line when known, and the dotted key path of the problem.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import presets
from .aggregation import PortfolioCase, PortfolioComponent
from .credit import NAMED_WINDOWS, EGYPT_PEAK, PeakWindow
from .economics import PlantCostModel
from .errors import ConfigError, WindNppError
from .markov import DieselRates, MarkovModel, UnitRates
from .voltage import DEFAULT_DSS_LIMIT, GridPoint, TurbinePQData, load_pq_datasheet
from .wind import (
    DEFAULT_SHEAR_EXPONENT,
    SiteProfile,
    TurbinePowerCurve,
    WeibullParams,
    load_wind_table,
)

ANALYSES = ("pq", "reliability", "aggregate", "credit", "lcoe", "compare")
OUTPUT_ENV_VAR = "WINDNPP_OUT"
DEFAULT_OUTPUT_DIR = "windnpp-out"


class _LineDict(dict):
    """dict that remembers the YAML line of each key."""

    lines: dict


class _Loader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    out = _LineDict()
    out.lines = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        out[key] = loader.construct_object(value_node, deep=True)
        out.lines[key] = key_node.start_mark.line + 1
    return out


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


@dataclass(frozen=True)
class Turbine:
    name: str
    curve: TurbinePowerCurve | None = None
    pq: TurbinePQData | None = None


@dataclass(frozen=True)
class PQScenario:
    name: str
    turbine: str
    grid: str
    v_a: float
    n_turbines: int


@dataclass(frozen=True)
class ReliabilitySettings:
    t_end: float
    n_points: int
    dg: DieselRates | None
    wt_rates: UnitRates | None
    wt_curve: TurbinePowerCurve | None
    wt_weibull: WeibullParams | None
    min_output: dict | None
    custom_models: dict[str, MarkovModel]


@dataclass(frozen=True)
class HistorySpec:
    name: str
    csv: Path | None = None
    site: str | None = None
    turbine: str | None = None
    portfolio: str | None = None
    years: tuple[int, ...] = ()


@dataclass(frozen=True)
class CreditSettings:
    window: PeakWindow
    histories: dict[str, HistorySpec]
    replacement: tuple[tuple[float, str], ...]


@dataclass(frozen=True)
class LcoeSettings:
    models: tuple[str, ...]
    base: str | None
    sweeps: dict[str, tuple[float, ...]]


@dataclass(frozen=True)
class ComparisonPlant:
    cost_model: str
    capacity: float
    coupled: bool
    capacity_factor: float | None = None
    site: str | None = None
    turbine: str | None = None


@dataclass(frozen=True)
class ComparisonSpec:
    name: str
    case_a: tuple[ComparisonPlant, ...]
    case_b: tuple[ComparisonPlant, ...]
    capital_reduction: tuple[float, ...]
    om_reduction: tuple[float, ...]


@dataclass
class RunConfig:
    source: str
    analyses: tuple[str, ...]
    output_dir: Path | None
    sites: dict[str, SiteProfile] = field(default_factory=dict)
    turbines: dict[str, Turbine] = field(default_factory=dict)
    grid_points: dict[str, GridPoint] = field(default_factory=dict)
    pq_scenarios: tuple[PQScenario, ...] = ()
    pq_units: str = "pu"
    d_ss_limit: float = DEFAULT_DSS_LIMIT
    reliability: ReliabilitySettings | None = None
    portfolios: dict[str, PortfolioCase] = field(default_factory=dict)
    credit: CreditSettings | None = None
    cost_models: dict[str, PlantCostModel] = field(default_factory=dict)
    lcoe: LcoeSettings | None = None
    comparisons: dict[str, ComparisonSpec] = field(default_factory=dict)


class _Ctx:
    """Tracks the source name and base directory for error messages and paths."""

    def __init__(self, source: str, base: Path):
        self.source = source
        self.base = base

    def fail(self, path: str, msg: str, node: Any = None, key: Any = None):
        line = None
        if isinstance(node, _LineDict) and key is not None:
            line = node.lines.get(key)
        loc = f"{self.source}:{line}" if line else self.source
        raise ConfigError(f"{loc}: {path}: {msg}")

    def mapping(self, node, path, allowed, required=(), parent=None, key=None):
        if not isinstance(node, dict):
            self.fail(path, "expected a mapping", parent, key)
        for k in node:
            if k not in allowed:
                self.fail(f"{path}.{k}", f"unknown key (allowed: {', '.join(allowed)})", node, k)
        for k in required:
            if k not in node:
                self.fail(path, f"missing required key {k!r}", parent, key)
        return node

    def number(self, node, key, path, default=None, integer=False):
        if key not in node:
            if default is None:
                self.fail(path, f"missing required key {key!r}")
            return default
        val = node[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(f"{path}.{key}", f"expected a number, got {val!r}", node, key)
        if integer and int(val) != val:
            self.fail(f"{path}.{key}", f"expected an integer, got {val!r}", node, key)
        return int(val) if integer else float(val)

    def ref(self, node, key, path, table: dict, kind: str):
        name = node.get(key)
        if name not in table:
            self.fail(f"{path}.{key}", f"undefined {kind} {name!r}", node, key)
        return name

    def build(self, factory, path, node=None, key=None, **kwargs):
        try:
            return factory(**kwargs)
        except (WindNppError, TypeError, ValueError) as exc:
            self.fail(path, str(exc), node, key)

    def resolve_path(self, p: str) -> Path:
        path = Path(p)
        return path if path.is_absolute() else self.base / path


def _sites(ctx: _Ctx, raw: dict) -> dict[str, SiteProfile]:
    out = {}
    for name, spec in raw.items():
        path = f"sites.{name}"
        ctx.mapping(spec, path, ("table", "reference_height", "shear_exponent", "weibull"),
                    ("table",), raw, name)
        table_ref = str(spec["table"])
        height = ctx.number(spec, "reference_height", path, presets.MEASUREMENT_HEIGHT)
        if table_ref.startswith("builtin:"):
            key = table_ref.split(":", 1)[1]
            if key not in presets.BUILTIN_TABLES:
                ctx.fail(f"{path}.table", f"unknown built-in table {key!r}", spec, "table")
            table = presets.builtin_table(key)
            if height != table.reference_height:
                table = type(table)(table.site_name, height, table.values)
        else:
            file = ctx.resolve_path(table_ref)
            try:
                table = load_wind_table(file, height, site_name=name)
            except (OSError, WindNppError) as exc:
                ctx.fail(f"{path}.table", str(exc), spec, "table")
        weibull = None
        if "weibull" in spec:
            w = ctx.mapping(spec["weibull"], f"{path}.weibull", ("shape", "scale"),
                            ("shape", "scale"), spec, "weibull")
            weibull = ctx.build(WeibullParams, f"{path}.weibull", spec, "weibull",
                                shape=ctx.number(w, "shape", path), scale=ctx.number(w, "scale", path))
        alpha = ctx.number(spec, "shear_exponent", path, DEFAULT_SHEAR_EXPONENT)
        out[name] = ctx.build(SiteProfile, path, raw, name, wind_table=table,
                              shear_exponent=alpha, weibull=weibull)
    return out


def _turbines(ctx: _Ctx, raw: dict) -> dict[str, Turbine]:
    out = {}
    for name, spec in raw.items():
        path = f"turbines.{name}"
        ctx.mapping(spec, path, ("curve", "datasheet"), (), raw, name)
        curve = pq = None
        if "curve" in spec:
            c = ctx.mapping(spec["curve"], f"{path}.curve",
                            ("cut_in", "rated_speed", "cut_out", "rated_power", "hub_height"),
                            ("cut_in", "rated_speed", "cut_out", "rated_power"), spec, "curve")
            curve = ctx.build(
                TurbinePowerCurve, f"{path}.curve", spec, "curve",
                cut_in=ctx.number(c, "cut_in", path), rated_speed=ctx.number(c, "rated_speed", path),
                cut_out=ctx.number(c, "cut_out", path), rated_power=ctx.number(c, "rated_power", path),
                hub_height=ctx.number(c, "hub_height", path, 80.0),
            )
        if "datasheet" in spec:
            ref = str(spec["datasheet"])
            try:
                if ref.startswith("builtin:"):
                    pq = presets.builtin_datasheet(ref.split(":", 1)[1])
                else:
                    pq = load_pq_datasheet(ctx.resolve_path(ref))
            except KeyError:
                ctx.fail(f"{path}.datasheet", f"unknown built-in datasheet {ref!r}", spec, "datasheet")
            except (OSError, WindNppError) as exc:
                ctx.fail(f"{path}.datasheet", str(exc), spec, "datasheet")
        if curve is None and pq is None:
            ctx.fail(path, "turbine needs a 'curve' and/or a 'datasheet'", raw, name)
        out[name] = Turbine(name, curve, pq)
    return out


def _grid_points(ctx: _Ctx, raw: dict) -> dict[str, GridPoint]:
    out = {}
    for name, spec in raw.items():
        path = f"grid_points.{name}"
        ctx.mapping(spec, path, ("nominal_voltage", "short_circuit_power", "impedance_angle"),
                    ("short_circuit_power", "impedance_angle"), raw, name)
        out[name] = ctx.build(
            GridPoint, path, raw, name,
            nominal_voltage=ctx.number(spec, "nominal_voltage", path, 0.0),
            short_circuit_power=ctx.number(spec, "short_circuit_power", path),
            impedance_angle=ctx.number(spec, "impedance_angle", path), name=name,
        )
    return out


def _custom_model(ctx: _Ctx, spec: dict, path: str, parent, key) -> MarkovModel:
    ctx.mapping(spec, path, ("states", "generator", "success", "initial"),
                ("states", "generator", "success"), parent, key)
    states = [str(s) for s in spec["states"]]
    n = len(states)
    initial = spec.get("initial")
    if initial is None:
        initial = [1.0] + [0.0] * (n - 1)
    try:
        success = [states.index(s) if isinstance(s, str) else int(s) for s in spec["success"]]
        return MarkovModel(tuple(states), np.array(spec["generator"], dtype=float),
                           tuple(success), np.array(initial, dtype=float))
    except (ValueError, TypeError, WindNppError) as exc:
        ctx.fail(path, str(exc), parent, key)


def _reliability(ctx: _Ctx, raw: dict, cfg: RunConfig) -> ReliabilitySettings:
    path = "reliability"
    ctx.mapping(raw, path, ("t_end", "n_points", "dg", "wt", "min_output", "custom_models"))
    dg = wt_rates = wt_curve = wt_weibull = None
    if "dg" in raw:
        d = ctx.mapping(raw["dg"], f"{path}.dg", ("failure_rate", "repair_rate", "common_cause_rate"),
                        ("failure_rate", "repair_rate", "common_cause_rate"), raw, "dg")
        dg = ctx.build(DieselRates, f"{path}.dg", raw, "dg",
                       failure_rate=ctx.number(d, "failure_rate", path),
                       repair_rate=ctx.number(d, "repair_rate", path),
                       common_cause_rate=ctx.number(d, "common_cause_rate", path))
    if "wt" in raw:
        w = ctx.mapping(raw["wt"], f"{path}.wt", ("failure_rate", "repair_rate", "turbine", "site"),
                        ("failure_rate", "repair_rate", "turbine", "site"), raw, "wt")
        wt_rates = ctx.build(UnitRates, f"{path}.wt", raw, "wt",
                             failure_rate=ctx.number(w, "failure_rate", path),
                             repair_rate=ctx.number(w, "repair_rate", path))
        tname = ctx.ref(w, "turbine", f"{path}.wt", cfg.turbines, "turbine")
        wt_curve = cfg.turbines[tname].curve
        if wt_curve is None:
            ctx.fail(f"{path}.wt.turbine", f"turbine {tname!r} has no power curve", w, "turbine")
        sname = ctx.ref(w, "site", f"{path}.wt", cfg.sites, "site")
        wt_weibull = cfg.sites[sname].weibull
        if wt_weibull is None:
            ctx.fail(f"{path}.wt.site", f"site {sname!r} has no Weibull parameters", w, "site")
    min_output = None
    if "min_output" in raw:
        mo = ctx.mapping(raw["min_output"], f"{path}.min_output",
                         ("wf_capacity", "min_mw", "t_end", "n_points"),
                         ("wf_capacity", "min_mw"), raw, "min_output")
        if dg is None or wt_rates is None:
            ctx.fail(f"{path}.min_output", "requires both 'dg' and 'wt' sections", raw, "min_output")
        min_output = {
            "wf_capacity": ctx.number(mo, "wf_capacity", path),
            "min_mw": ctx.number(mo, "min_mw", path),
            "t_end": ctx.number(mo, "t_end", path, 48.0),
            "n_points": ctx.number(mo, "n_points", path, 481, integer=True),
        }
    customs = {}
    for name, spec in (raw.get("custom_models") or {}).items():
        customs[name] = _custom_model(ctx, spec, f"{path}.custom_models.{name}",
                                      raw["custom_models"], name)
    return ReliabilitySettings(
        t_end=ctx.number(raw, "t_end", path, 1000.0),
        n_points=ctx.number(raw, "n_points", path, 1001, integer=True),
        dg=dg, wt_rates=wt_rates, wt_curve=wt_curve, wt_weibull=wt_weibull,
        min_output=min_output, custom_models=customs,
    )


def _component_curve(ctx, node, path, cfg) -> tuple[str, TurbinePowerCurve]:
    sname = ctx.ref(node, "site", path, cfg.sites, "site")
    tname = ctx.ref(node, "turbine", path, cfg.turbines, "turbine")
    curve = cfg.turbines[tname].curve
    if curve is None:
        ctx.fail(f"{path}.turbine", f"turbine {tname!r} has no power curve", node, "turbine")
    return sname, curve


def _portfolios(ctx: _Ctx, raw: dict, cfg: RunConfig) -> dict[str, PortfolioCase]:
    out = {}
    for label, comps in raw.items():
        path = f"portfolios.{label}"
        if not isinstance(comps, list) or not comps:
            ctx.fail(path, "expected a non-empty list of components", raw, label)
        parts = []
        for i, c in enumerate(comps):
            cpath = f"{path}[{i}]"
            ctx.mapping(c, cpath, ("site", "turbine", "mw"), ("site", "turbine", "mw"), raw, label)
            sname, curve = _component_curve(ctx, c, cpath, cfg)
            parts.append(ctx.build(PortfolioComponent, cpath, raw, label, site=cfg.sites[sname],
                                   curve=curve, capacity=ctx.number(c, "mw", cpath)))
        out[label] = PortfolioCase(label, tuple(parts))
    return out


def _window(ctx: _Ctx, raw, path, parent) -> PeakWindow:
    if raw is None:
        return EGYPT_PEAK
    if isinstance(raw, str):
        if raw not in NAMED_WINDOWS:
            ctx.fail(path, f"unknown window {raw!r} (named: {', '.join(NAMED_WINDOWS)})",
                     parent, "window")
        return NAMED_WINDOWS[raw]
    ctx.mapping(raw, path, ("months", "hours"), ("months", "hours"), parent, "window")
    return ctx.build(PeakWindow, path, parent, "window",
                     months=frozenset(raw["months"]), hours=frozenset(raw["hours"]))


def _credit(ctx: _Ctx, raw: dict, cfg: RunConfig) -> CreditSettings:
    path = "credit"
    ctx.mapping(raw, path, ("window", "histories", "replacement"), ("histories",))
    window = _window(ctx, raw.get("window"), f"{path}.window", raw)
    histories = {}
    for name, spec in raw["histories"].items():
        hpath = f"{path}.histories.{name}"
        ctx.mapping(spec, hpath, ("csv", "site", "turbine", "portfolio", "years"), (),
                    raw["histories"], name)
        if "csv" in spec:
            histories[name] = HistorySpec(name, csv=ctx.resolve_path(str(spec["csv"])))
            continue
        years = tuple(int(y) for y in spec.get("years", ()))
        if not years:
            ctx.fail(hpath, "climatology history needs a non-empty 'years' list",
                     raw["histories"], name)
        if "portfolio" in spec:
            ctx.ref(spec, "portfolio", hpath, cfg.portfolios, "portfolio")
            histories[name] = HistorySpec(name, portfolio=spec["portfolio"], years=years)
        elif "site" in spec and "turbine" in spec:
            _component_curve(ctx, spec, hpath, cfg)
            histories[name] = HistorySpec(name, site=spec["site"], turbine=spec["turbine"],
                                          years=years)
        else:
            ctx.fail(hpath, "history needs 'csv', 'portfolio', or 'site' + 'turbine'",
                     raw["histories"], name)
    repl = []
    for i, r in enumerate(raw.get("replacement") or []):
        rpath = f"{path}.replacement[{i}]"
        ctx.mapping(r, rpath, ("installed_mw", "history"), ("installed_mw", "history"), raw,
                    "replacement")
        ctx.ref(r, "history", rpath, histories, "history")
        repl.append((ctx.number(r, "installed_mw", rpath), r["history"]))
    return CreditSettings(window, histories, tuple(repl))


_COST_KEYS = ("capacity", "capacity_factor", "capital_cost", "fixed_om", "variable_om",
              "fuel_cost", "discount_rate", "construction_years", "lifetime_years")


def _cost_models(ctx: _Ctx, raw: dict) -> dict[str, PlantCostModel]:
    out = {}
    for name, spec in raw.items():
        path = f"cost_models.{name}"
        ctx.mapping(spec, path, _COST_KEYS, ("capacity", "capacity_factor", "capital_cost"),
                    raw, name)
        kwargs = {}
        for k in _COST_KEYS:
            if k in spec:
                kwargs[k] = ctx.number(spec, k, path, integer=k.endswith("_years"))
        out[name] = ctx.build(PlantCostModel, path, raw, name, name=name, **kwargs)
    return out


def _lcoe(ctx: _Ctx, raw: dict, cfg: RunConfig) -> LcoeSettings:
    path = "lcoe"
    ctx.mapping(raw, path, ("models", "base", "sweeps"))
    models = tuple(raw.get("models") or cfg.cost_models)
    for m in models:
        if m not in cfg.cost_models:
            ctx.fail(f"{path}.models", f"undefined cost model {m!r}", raw, "models")
    base = raw.get("base")
    sweeps = {}
    if raw.get("sweeps"):
        if base is None:
            ctx.fail(f"{path}.base", "sweeps need a 'base' cost model", raw, "sweeps")
        ctx.ref(raw, "base", path, cfg.cost_models, "cost model")
        from .economics import SWEEP_PARAMETERS
        for param, grid in raw["sweeps"].items():
            if param not in SWEEP_PARAMETERS:
                ctx.fail(f"{path}.sweeps.{param}", "unknown sweep parameter", raw["sweeps"], param)
            if not isinstance(grid, list) or not grid:
                ctx.fail(f"{path}.sweeps.{param}", "expected a non-empty list", raw["sweeps"], param)
            sweeps[param] = tuple(float(v) for v in grid)
    return LcoeSettings(models, base, sweeps)


def _comparisons(ctx: _Ctx, raw: dict, cfg: RunConfig) -> dict[str, ComparisonSpec]:
    out = {}
    for name, spec in raw.items():
        path = f"comparisons.{name}"
        ctx.mapping(spec, path, ("case_a", "case_b", "capital_reduction", "om_reduction"),
                    ("case_a", "case_b"), raw, name)
        cases = {}
        for case in ("case_a", "case_b"):
            plants = []
            if not isinstance(spec[case], list) or not spec[case]:
                ctx.fail(f"{path}.{case}", "expected a non-empty list", spec, case)
            for i, p in enumerate(spec[case]):
                ppath = f"{path}.{case}[{i}]"
                ctx.mapping(p, ppath, ("cost_model", "mw", "coupled", "capacity_factor", "site",
                                       "turbine"), ("cost_model", "mw"), spec, case)
                ctx.ref(p, "cost_model", ppath, cfg.cost_models, "cost model")
                cf = p.get("capacity_factor")
                if cf is None:
                    if "site" not in p or "turbine" not in p:
                        ctx.fail(ppath, "give 'capacity_factor' or 'site' + 'turbine'", spec, case)
                    _component_curve(ctx, p, ppath, cfg)
                plants.append(ComparisonPlant(
                    cost_model=p["cost_model"], capacity=ctx.number(p, "mw", ppath),
                    coupled=bool(p.get("coupled", False)),
                    capacity_factor=None if cf is None else float(cf),
                    site=p.get("site"), turbine=p.get("turbine"),
                ))
            cases[case] = tuple(plants)
        caps = tuple(float(x) for x in spec.get("capital_reduction", [0.05 * i for i in range(15)]))
        oms = tuple(float(x) for x in spec.get("om_reduction", [0.0, 0.05, 0.10]))
        for label, grid in (("capital_reduction", caps), ("om_reduction", oms)):
            if not grid or any(not 0 <= x < 1 for x in grid):
                ctx.fail(f"{path}.{label}", "values must lie in [0, 1) and be non-empty", spec, label)
        out[name] = ComparisonSpec(name, cases["case_a"], cases["case_b"], caps, oms)
    return out


_TOP_KEYS = ("analyses", "output_dir", "sites", "turbines", "grid_points", "pq", "reliability",
             "portfolios", "credit", "cost_models", "lcoe", "comparisons")

_REQUIRES = {
    "pq": "pq",
    "reliability": "reliability",
    "aggregate": "portfolios",
    "credit": "credit",
    "lcoe": "cost_models",
    "compare": "comparisons",
}


def config_from_mapping(raw: dict, source: str = "<config>", base: Path | None = None) -> RunConfig:
    ctx = _Ctx(source, base or Path.cwd())
    if raw is None:
        raw = {}
    ctx.mapping(raw, "<root>", _TOP_KEYS)
    analyses = raw.get("analyses")
    if analyses is None:
        analyses = [a for a in ANALYSES if _REQUIRES[a] in raw]
    if not isinstance(analyses, list):
        ctx.fail("analyses", "expected a list", raw, "analyses")
    for a in analyses:
        if a not in ANALYSES:
            ctx.fail("analyses", f"unknown analysis {a!r} (known: {', '.join(ANALYSES)})",
                     raw, "analyses")
        if _REQUIRES[a] not in raw:
            ctx.fail("analyses", f"analysis {a!r} requires a {_REQUIRES[a]!r} section",
                     raw, "analyses")
    out_dir = raw.get("output_dir")
    cfg = RunConfig(source=source, analyses=tuple(analyses),
                    output_dir=ctx.resolve_path(str(out_dir)) if out_dir else None)
    cfg.sites = _sites(ctx, raw.get("sites") or {})
    cfg.turbines = _turbines(ctx, raw.get("turbines") or {})
    cfg.grid_points = _grid_points(ctx, raw.get("grid_points") or {})
    if "pq" in raw:
        pq = ctx.mapping(raw["pq"], "pq", ("scenarios", "units", "d_ss_limit"), ("scenarios",))
        units = pq.get("units", "pu")
        if units not in ("pu", "percent"):
            ctx.fail("pq.units", "must be 'pu' or 'percent'", pq, "units")
        cfg.pq_units = units
        cfg.d_ss_limit = ctx.number(pq, "d_ss_limit", "pq", DEFAULT_DSS_LIMIT)
        scen = []
        for i, s in enumerate(pq["scenarios"] or []):
            spath = f"pq.scenarios[{i}]"
            ctx.mapping(s, spath, ("name", "turbine", "grid", "v_a", "n_turbines"),
                        ("turbine", "grid", "v_a", "n_turbines"), pq, "scenarios")
            tname = ctx.ref(s, "turbine", spath, cfg.turbines, "turbine")
            if cfg.turbines[tname].pq is None:
                ctx.fail(f"{spath}.turbine", f"turbine {tname!r} has no PQ datasheet", s, "turbine")
            ctx.ref(s, "grid", spath, cfg.grid_points, "grid point")
            scen.append(PQScenario(str(s.get("name", f"scenario {i + 1}")), tname, s["grid"],
                                   ctx.number(s, "v_a", spath),
                                   ctx.number(s, "n_turbines", spath, integer=True)))
        cfg.pq_scenarios = tuple(scen)
    if "reliability" in raw:
        cfg.reliability = _reliability(ctx, raw["reliability"], cfg)
    cfg.portfolios = _portfolios(ctx, raw.get("portfolios") or {}, cfg)
    if "credit" in raw:
        cfg.credit = _credit(ctx, raw["credit"], cfg)
    cfg.cost_models = _cost_models(ctx, raw.get("cost_models") or {})
    if "lcoe" in raw:
        cfg.lcoe = _lcoe(ctx, raw["lcoe"], cfg)
    elif "lcoe" in cfg.analyses:
        cfg.lcoe = LcoeSettings(tuple(cfg.cost_models), None, {})
    cfg.comparisons = _comparisons(ctx, raw.get("comparisons") or {}, cfg)
    return cfg


def load_config(path: str | Path | None = None, preset: str | None = None) -> RunConfig:
    """Load a YAML run config, or a built-in preset by name."""
    if (path is None) == (preset is None):
        raise ConfigError("give exactly one of a config path or a preset name")
    if preset is not None:
        try:
            raw = presets.preset(preset)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        return config_from_mapping(raw, f"<preset:{preset}>")
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        raw = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return config_from_mapping(raw, str(path), path.parent)


def default_output_dir(cfg: RunConfig, override: str | Path | None = None) -> Path:
    if override:
        return Path(override)
    if cfg.output_dir:
        return cfg.output_dir
    return Path(os.environ.get(OUTPUT_ENV_VAR, DEFAULT_OUTPUT_DIR))
