"""Execute the analyses selected in a :class:`RunConfig` and write CSV reports.

Each analysis runs in isolation: an exception is recorded against that
analysis and the remaining ones still run. Outputs depend only on the
config, so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .aggregation import (
    aggregate_portfolio,
    series_from_site,
    variation_range,
    write_delta_csv,
    write_duration_csv,
    write_ranges_csv,
    write_series_csv,
)
from .config import ComparisonPlant, HistorySpec, LcoeSettings, RunConfig
from .credit import (
    GenerationYear,
    credit_table,
    ingest_hourly_history,
    pjm_rolling_credit,
    replacement_capacity,
)
from .economics import (
    CouplingAdjustments,
    PortfolioPlant,
    build_ledger,
    coupling_compare,
    model_lcoe,
    sensitivity_sweep,
    write_comparison_csv,
    write_ledger_csv,
)
from .errors import ParseError
from .markov import (
    TimeSeries,
    build_dg_model,
    build_wt_model,
    min_output_scenario,
    parallel_combine,
    steady_state,
    system_curves,
    wind_transition_probs,
    write_model_csv,
)
from .voltage import assess_scenario, write_pq_report

REPORT_NAME = "run_report.csv"
_CASE_LABEL = re.compile(r"Case-(?P<case>[^/]+)/Scenario-(?P<scenario>.+)")


@dataclass
class AnalysisResult:
    name: str
    status: str = "ok"  # "ok" or "failed"
    outputs: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class RunReport:
    output_dir: Path
    results: dict[str, AnalysisResult] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results.values())

    @property
    def output_files(self) -> list[str]:
        return [p for r in self.results.values() for p in r.outputs]

    @property
    def warnings(self) -> list[str]:
        return [f"{r.name}: {w}" for r in self.results.values() for w in r.warnings]


class _Writer:
    """Buffers the CSV outputs and notes of one analysis."""

    def __init__(self):
        self.files: dict[str, str] = {}
        self.notes: list[str] = []

    def csv(self, name: str, fill: Callable[[io.StringIO], None]) -> None:
        buf = io.StringIO()
        fill(buf)
        self.files[name] = buf.getvalue()

    def rows(self, name: str, header: list, rows) -> None:
        def fill(fh):
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        self.csv(name, fill)


def _curves_rows(curves: dict[str, TimeSeries]) -> tuple[list, list]:
    names = list(curves)
    times = next(iter(curves.values())).times
    rows = [[float(t), *(float(curves[k].values[i]) for k in names)] for i, t in enumerate(times)]
    return ["time_h", *names], rows


# -- analyses ---------------------------------------------------------------

def _run_pq(cfg: RunConfig, out: _Writer) -> None:
    assessments = []
    for s in cfg.pq_scenarios:
        assessments.append(assess_scenario(cfg.turbines[s.turbine].pq, cfg.grid_points[s.grid],
                                           s.v_a, s.n_turbines, label=s.name,
                                           d_ss_limit=cfg.d_ss_limit))
    out.csv("pq_report.csv", lambda fh: write_pq_report(assessments, fh, units=cfg.pq_units))
    for a in assessments:
        if not a.d_ss_compliant:
            out.notes.append(f"{a.label}: farm steady-state voltage change exceeds the limit")


def _run_reliability(cfg: RunConfig, out: _Writer) -> None:
    rel = cfg.reliability
    failures = []
    curves: dict[str, TimeSeries] = {}
    dg = wt = None
    if rel.dg is not None:
        dg = build_dg_model(rel.dg)
        av, rl = system_curves(dg, rel.t_end, n_points=rel.n_points)
        curves.update(dg_availability=av, dg_reliability=rl)
        out.csv("reliability_dg_model.csv", lambda fh: write_model_csv(dg, fh))
    if rel.wt_rates is not None:
        probs = wind_transition_probs(rel.wt_weibull, rel.wt_curve)
        wt = build_wt_model(rel.wt_rates, probs)
        av, rl = system_curves(wt, rel.t_end, n_points=rel.n_points)
        curves.update(wt_availability=av, wt_reliability=rl)
        out.csv("reliability_wt_model.csv", lambda fh: write_model_csv(wt, fh))
    if dg is not None and wt is not None:
        curves["wind_diesel_availability"] = parallel_combine(curves["dg_availability"],
                                                              curves["wt_availability"])
        curves["wind_diesel_reliability"] = parallel_combine(curves["dg_reliability"],
                                                             curves["wt_reliability"])
    if curves:
        out.rows("reliability_curves.csv", *_curves_rows(curves))

    if rel.min_output is not None:
        mo = rel.min_output
        cmp = min_output_scenario(mo["wf_capacity"], mo["min_mw"], rel.wt_curve, rel.wt_weibull,
                                  rel.wt_rates, rel.dg, t_end=mo["t_end"],
                                  n_points=mo["n_points"])
        out.notes.extend(cmp.warnings)
        out.rows("reliability_min_output.csv", *_curves_rows({
            "dg_availability": cmp.dg_availability,
            "dg_reliability": cmp.dg_reliability,
            "wt_availability": cmp.wt_availability,
            "wt_reliability": cmp.wt_reliability,
            "wind_diesel_availability": cmp.wind_diesel_availability,
            "wind_diesel_reliability": cmp.wind_diesel_reliability,
        }))
        p = cmp.probs
        out.rows("reliability_min_output_params.csv", ["quantity", "value"], [
            ["threshold_speed_m_s", cmp.threshold_speed],
            ["min_fraction_per_train", cmp.min_fraction],
            *[[k, getattr(p, k)] for k in ("p06", "p60", "p30", "p03", "p63", "p36")],
        ])

    steady_rows = []
    for label, model in (("dg", dg), ("wt", wt)):
        if model is not None:
            pi = steady_state(model)
            steady_rows.append([label, float(pi[list(model.success_states)].sum())])
    for name, model in rel.custom_models.items():
        try:
            av, rl = system_curves(model, rel.t_end, n_points=rel.n_points)
        except Exception as exc:  # noqa: BLE001 - recorded, siblings continue
            failures.append(f"custom model {name!r}: {exc}")
            continue
        out.rows(f"reliability_{name}.csv", *_curves_rows({"availability": av, "reliability": rl}))
        pi = steady_state(model)
        steady_rows.append([name, float(pi[list(model.success_states)].sum())])
    if steady_rows:
        out.rows("reliability_steady_state.csv", ["model", "steady_state_availability"],
                 steady_rows)
    if failures:
        raise RuntimeError("; ".join(failures))


def _run_aggregate(cfg: RunConfig, out: _Writer) -> None:
    series = {label: aggregate_portfolio(case) for label, case in cfg.portfolios.items()}
    out.csv("aggregate_series.csv", lambda fh: write_series_csv(series, fh))
    out.csv("aggregate_duration.csv", lambda fh: write_duration_csv(series, fh))
    out.csv("aggregate_delta.csv", lambda fh: write_delta_csv(series, fh))
    rows = []
    for label, s in series.items():
        hi, lo = variation_range(s)
        rows.append([label, s.installed_capacity, s.capacity_factor, hi, lo])
    out.rows("aggregate_ranges.csv",
             ["portfolio", "installed_mw", "capacity_factor", "max_rise_pct", "max_drop_pct"], rows)
    grid = {}
    for label, s in series.items():
        m = _CASE_LABEL.fullmatch(label)
        if m:
            grid[(m["case"], m["scenario"])] = variation_range(s)
    if grid:
        out.csv("aggregate_ranges_table.csv", lambda fh: write_ranges_csv(grid, fh))


def _history_years(cfg: RunConfig, h: HistorySpec) -> list[GenerationYear]:
    if h.csv is not None:
        try:
            with open(h.csv, encoding="utf-8") as fh:
                return ingest_hourly_history(fh)
        except ParseError as exc:
            raise ParseError(f"{h.csv}: {exc}") from None
    if h.portfolio is not None:
        table = aggregate_portfolio(cfg.portfolios[h.portfolio]).as_table()
    else:
        curve = cfg.turbines[h.turbine].curve
        table = series_from_site(cfg.sites[h.site], curve).as_table()
    return [GenerationYear.from_climatology(y, table) for y in h.years]


def _run_credit(cfg: RunConfig, out: _Writer) -> None:
    cr = cfg.credit
    histories = {name: _history_years(cfg, h) for name, h in cr.histories.items()}
    names = list(histories)
    rolling_rows = []
    latest = {}
    for name in names:
        for rc in pjm_rolling_credit(histories[name], cr.window):
            rolling_rows.append([name, rc.year, rc.credit, " ".join(map(str, rc.years_used)),
                                 int(rc.provisional)])
            latest[name] = rc
        if latest[name].provisional:
            out.notes.append(f"{name}: credit for {latest[name].year} is provisional "
                             f"({len(latest[name].years_used)} of 3 years)")
    out.rows("credit_rolling.csv",
             ["history", "year", "credit", "years_used", "provisional"], rolling_rows)
    table = credit_table(histories, cr.window)
    out.rows("credit_table.csv", ["cell", *names], [[label, *vals] for label, vals in table])
    if cr.replacement:
        rows = []
        for mw, name in cr.replacement:
            c = latest[name].credit
            rows.append([name, mw, c, replacement_capacity(mw, c)])
        out.rows("credit_replacement.csv",
                 ["history", "installed_mw", "credit", "replacement_mw"], rows)


def _run_lcoe(cfg: RunConfig, out: _Writer) -> None:
    ls = cfg.lcoe or LcoeSettings(tuple(cfg.cost_models), None, {})
    rows = []
    for name in ls.models:
        m = cfg.cost_models[name]
        led = build_ledger(m)
        out.csv(f"lcoe_ledger_{name}.csv",
                lambda fh, led=led, r=m.discount_rate: write_ledger_csv(led, r, fh))
        rows.append([name, m.capacity, m.capacity_factor, m.capital_cost, m.discount_rate,
                     m.lifetime_years, model_lcoe(m)])
    out.rows("lcoe_summary.csv", ["model", "capacity_mw", "capacity_factor", "capital_usd_per_kw",
                                  "discount_rate", "lifetime_years", "lcoe_usd_per_mwh"], rows)
    if ls.sweeps:
        base = cfg.cost_models[ls.base]
        sweep_rows = []
        for param, grid in ls.sweeps.items():
            for v, c in sensitivity_sweep(base, param, grid):
                sweep_rows.append([param, v, c])
        out.rows("lcoe_sweeps.csv", ["parameter", "value", "lcoe_usd_per_mwh"], sweep_rows)


def _plant_model(cfg: RunConfig, p: ComparisonPlant):
    cf = p.capacity_factor
    if cf is None:
        cf = series_from_site(cfg.sites[p.site], cfg.turbines[p.turbine].curve).capacity_factor
    return cfg.cost_models[p.cost_model].replace(capacity=p.capacity, capacity_factor=cf)


def _run_compare(cfg: RunConfig, out: _Writer) -> None:
    grids = io.StringIO()
    rows = []
    for i, (name, spec) in enumerate(cfg.comparisons.items()):
        case_a = [PortfolioPlant(_plant_model(cfg, p), p.coupled) for p in spec.case_a]
        case_b = [_plant_model(cfg, p) for p in spec.case_b]
        cmp = coupling_compare(case_a, case_b,
                               CouplingAdjustments(spec.capital_reduction, spec.om_reduction))
        write_comparison_csv(name, cmp, grids, header=(i == 0))
        for k, (o, b) in enumerate(zip(cmp.om_reduction, cmp.breakeven)):
            rows.append([name, o, float(cmp.lcoe_a[k, 0]), cmp.lcoe_b, "" if b is None else b])
    out.files["compare_grid.csv"] = grids.getvalue()
    out.rows("compare_breakeven.csv", ["comparison", "om_reduction", "lcoe_a_no_reduction",
                                       "lcoe_b", "breakeven_capital_reduction"], rows)


ANALYSIS_FUNCS = {
    "pq": _run_pq,
    "reliability": _run_reliability,
    "aggregate": _run_aggregate,
    "credit": _run_credit,
    "lcoe": _run_lcoe,
    "compare": _run_compare,
}


def _format_warning(w: warnings.WarningMessage) -> str:
    return f"{w.category.__name__}: {w.message}"


def run(cfg: RunConfig, output_dir: str | Path | None = None,
        analyses: tuple[str, ...] | None = None) -> RunReport:
    """Run the config's analyses (or the given subset) and write CSVs to ``output_dir``."""
    from .config import default_output_dir

    out_dir = default_output_dir(cfg, output_dir)
    selected = cfg.analyses if analyses is None else tuple(analyses)
    report = RunReport(out_dir)
    pending: dict[str, str] = {}
    for name in selected:
        res = AnalysisResult(name)
        writer = _Writer()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                ANALYSIS_FUNCS[name](cfg, writer)
            except Exception as exc:  # noqa: BLE001 - isolation between analyses
                res.status = "failed"
                res.error = f"{type(exc).__name__}: {exc}"
        seen = set()
        for w in caught:
            msg = _format_warning(w)
            if msg not in seen:
                seen.add(msg)
                res.warnings.append(msg)
        res.warnings.extend(writer.notes)
        # a failed analysis still publishes whatever it finished
        for fname, text in writer.files.items():
            pending[fname] = text
            res.outputs.append(fname)
        report.results[name] = res

    if selected:
        out_dir.mkdir(parents=True, exist_ok=True)
    for fname, text in pending.items():
        (out_dir / fname).write_text(text, encoding="utf-8", newline="")
    if selected:
        _write_report(report, out_dir / REPORT_NAME)
    return report


def _write_report(report: RunReport, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["analysis", "status", "outputs", "warnings", "error"])
        for r in report.results.values():
            w.writerow([r.name, r.status, " ".join(r.outputs), " | ".join(r.warnings),
                        r.error or ""])


def summary_lines(report: RunReport) -> list[str]:
    lines = []
    for r in report.results.values():
        line = f"{r.name}: {r.status} ({len(r.outputs)} files)"
        if r.error:
            line += f" - {r.error}"
        lines.append(line)
        lines.extend(f"  warning: {w}" for w in r.warnings)
    return lines
