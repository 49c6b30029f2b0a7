"""Geographic smoothing of aggregated wind generation.

A site's month x hour climatology becomes a 288-sample generation series
(fraction of installed capacity, month-major). Portfolios are
capacity-weighted means of their component series. Smoothing is measured by
the circular step changes between consecutive samples.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .errors import InvalidInputError
from .wind import N_HOURS, N_MONTHS, SiteProfile, TurbinePowerCurve, power_fraction, shear_correct

N_SAMPLES = N_MONTHS * N_HOURS

#: Turbine classes of the Case A/B study: 2 MW units on 80 m hubs.
SCENARIO_CURVES = {
    "I": TurbinePowerCurve(4.0, 10.0, 23.0, 2.0, 80.0),
    "II": TurbinePowerCurve(4.0, 12.0, 25.0, 2.0, 80.0),
    "III": TurbinePowerCurve(4.0, 13.0, 25.0, 2.0, 80.0),
}
#: The fleet already installed at Zafarana.
EXISTING_ZAFARANA_CURVE = SCENARIO_CURVES["I"]


@dataclass(frozen=True)
class GenerationSeries:
    values: np.ndarray = field(repr=False)
    installed_capacity: float

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (N_SAMPLES,):
            raise InvalidInputError(f"generation series needs {N_SAMPLES} samples, got {vals.shape}")
        if np.any(vals < 0) or np.any(vals > 1):
            raise InvalidInputError("generation fractions must lie in [0, 1]")
        if self.installed_capacity <= 0:
            raise InvalidInputError("installed capacity must be positive")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def capacity_factor(self) -> float:
        return float(self.values.mean())

    def as_table(self) -> np.ndarray:
        """12 x 24 view (month, hour)."""
        return self.values.reshape(N_MONTHS, N_HOURS)


@dataclass(frozen=True)
class PortfolioComponent:
    site: SiteProfile
    curve: TurbinePowerCurve
    capacity: float  # MW

    def __post_init__(self):
        if self.capacity <= 0:
            raise InvalidInputError("component capacity must be positive")


@dataclass(frozen=True)
class PortfolioCase:
    label: str
    components: tuple[PortfolioComponent, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))


def series_from_site(site: SiteProfile, curve: TurbinePowerCurve,
                     capacity: float = 1.0) -> GenerationSeries:
    table = site.wind_table
    speeds = shear_correct(table.samples(), table.reference_height, curve.hub_height,
                           site.shear_exponent)
    return GenerationSeries(power_fraction(speeds, curve), capacity)


def aggregate_portfolio(case: PortfolioCase) -> GenerationSeries:
    if not case.components:
        raise InvalidInputError(f"portfolio {case.label!r} has no components")
    weights = np.array([c.capacity for c in case.components], dtype=float)
    stack = np.vstack([series_from_site(c.site, c.curve, c.capacity).values
                       for c in case.components])
    total = float(weights.sum())
    agg = (weights / total) @ stack
    # guard against 1 + ulp from the weighted sum
    return GenerationSeries(np.clip(agg, 0.0, 1.0), total)


def delta_series(s: GenerationSeries | np.ndarray) -> np.ndarray:
    """Change from the previous sample; the first sample wraps to the last."""
    vals = s.values if isinstance(s, GenerationSeries) else np.asarray(s, dtype=float)
    return vals - np.roll(vals, 1)


def duration_curve(s: GenerationSeries | Sequence[float]) -> np.ndarray:
    vals = s.values if isinstance(s, GenerationSeries) else np.asarray(s, dtype=float)
    return -np.sort(-vals, kind="stable")


def variation_range(s: GenerationSeries | np.ndarray) -> tuple[float, float]:
    """Largest rise and largest drop between consecutive samples, in percent of capacity."""
    d = delta_series(s) * 100.0
    return float(d.max()), float(d.min())


def build_case(case: str, scenario: str, zafarana: SiteProfile, dabaa: SiteProfile,
               existing_mw: float = 500.0, new_mw: float = 500.0) -> PortfolioCase:
    """Case A disperses the new farm near the nuclear site; Case B keeps it at Zafarana."""
    if scenario not in SCENARIO_CURVES:
        raise InvalidInputError(f"unknown scenario {scenario!r}; expected one of I, II, III")
    new_site = {"A": dabaa, "B": zafarana}.get(case)
    if new_site is None:
        raise InvalidInputError(f"unknown case {case!r}; expected 'A' or 'B'")
    return PortfolioCase(
        f"Case-{case}/Scenario-{scenario}",
        (PortfolioComponent(zafarana, EXISTING_ZAFARANA_CURVE, existing_mw),
         PortfolioComponent(new_site, SCENARIO_CURVES[scenario], new_mw)),
    )


# -- CSV output --------------------------------------------------------------

def write_series_csv(series: dict[str, GenerationSeries], fh: IO[str]) -> None:
    names = list(series)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "month", "hour", *names])
    for n in range(N_SAMPLES):
        w.writerow([n + 1, n // N_HOURS + 1, n % N_HOURS,
                    *(float(series[k].values[n]) for k in names)])


def write_duration_csv(series: dict[str, GenerationSeries], fh: IO[str]) -> None:
    names = list(series)
    curves = {k: duration_curve(series[k]) for k in names}
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["rank", "exceedance", *names])
    for n in range(N_SAMPLES):
        w.writerow([n + 1, (n + 1) / N_SAMPLES, *(float(curves[k][n]) for k in names)])


def write_delta_csv(series: dict[str, GenerationSeries], fh: IO[str]) -> None:
    names = list(series)
    deltas = {k: delta_series(series[k]) for k in names}
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "month", "hour", *names])
    for n in range(N_SAMPLES):
        w.writerow([n + 1, n // N_HOURS + 1, n % N_HOURS, *(float(deltas[k][n]) for k in names)])


def write_ranges_csv(ranges: dict[tuple[str, str], tuple[float, float]], fh: IO[str]) -> None:
    """Table layout: one row per case, ``max``/``min`` column pair per scenario."""
    cases = sorted({c for c, _ in ranges})
    scenarios = list(dict.fromkeys(s for _, s in ranges))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["case", *(f"{s}_{k}" for s in scenarios for k in ("max_pct", "min_pct"))])
    for c in cases:
        row = [f"Case-{c}"]
        for s in scenarios:
            hi, lo = ranges.get((c, s), ("", ""))
            row += [hi, lo]
        w.writerow(row)
