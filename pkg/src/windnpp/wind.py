"""Wind statistics and turbine energy conversion.

Covers the Weibull wind-speed distribution, power-law shear correction to
hub height, the quadratic cut-in-to-rated power curve, farm output and the
month x hour wind climatology tables used throughout the package.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import InvalidInputError, ParseError, SingularCurveError

#: Power-law shear exponent used for both Egyptian coastal sites.
DEFAULT_SHEAR_EXPONENT = 0.1429

MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
N_MONTHS = 12
N_HOURS = 24


@dataclass(frozen=True)
class WeibullParams:
    """Two-parameter Weibull wind-speed distribution (shape K, scale C in m/s)."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise InvalidInputError(
                f"Weibull shape and scale must be positive, got K={self.shape}, C={self.scale}"
            )

    def cdf(self, v: float) -> float:
        if v <= 0:
            return 0.0
        if math.isinf(v):
            return 1.0
        return -math.expm1(-((v / self.scale) ** self.shape))

    def sf(self, v: float) -> float:
        """Exceedance probability P(V > v)."""
        if v <= 0:
            return 1.0
        if math.isinf(v):
            return 0.0
        return math.exp(-((v / self.scale) ** self.shape))

    def pdf(self, v: float) -> float:
        if v < 0:
            return 0.0
        k, c = self.shape, self.scale
        return (k / c) * (v / c) ** (k - 1) * math.exp(-((v / c) ** k))


@dataclass(frozen=True)
class TurbinePowerCurve:
    cut_in: float
    rated_speed: float
    cut_out: float
    rated_power: float  # MW
    hub_height: float = 80.0

    def __post_init__(self):
        if self.cut_in == self.rated_speed:
            raise SingularCurveError("cut-in equals rated speed; quadratic branch is undefined")
        if not (0 < self.cut_in < self.rated_speed < self.cut_out):
            raise InvalidInputError(
                "power curve needs 0 < cut_in < rated_speed < cut_out, got "
                f"({self.cut_in}, {self.rated_speed}, {self.cut_out})"
            )
        if self.rated_power <= 0:
            raise InvalidInputError(f"rated_power must be positive, got {self.rated_power}")
        if self.hub_height <= 0:
            raise InvalidInputError(f"hub_height must be positive, got {self.hub_height}")

    def with_cut_in(self, cut_in: float) -> "TurbinePowerCurve":
        return TurbinePowerCurve(cut_in, self.rated_speed, self.cut_out,
                                 self.rated_power, self.hub_height)


@dataclass(frozen=True)
class WindSpeedTable:
    """Month x hour climatology of mean wind speed (m/s).

    ``values[m, h]`` is month ``m + 1`` at hour ``h``.
    """

    site_name: str
    reference_height: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.shape != (N_MONTHS, N_HOURS):
            raise InvalidInputError(f"wind table must be 12x24, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InvalidInputError("wind speeds must be finite and non-negative")
        if self.reference_height <= 0:
            raise InvalidInputError("reference_height must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def speed(self, month: int, hour: int) -> float:
        """Mean speed for calendar ``month`` (1-12) and ``hour`` (0-23)."""
        return float(self.values[month - 1, hour])

    def samples(self) -> np.ndarray:
        """The 288 speeds in month-major order (Jan 0..23, Feb 0..23, ...)."""
        return self.values.ravel()


@dataclass(frozen=True)
class SiteProfile:
    wind_table: WindSpeedTable
    shear_exponent: float = DEFAULT_SHEAR_EXPONENT
    weibull: WeibullParams | None = None

    def __post_init__(self):
        if not 0 <= self.shear_exponent <= 1:
            raise InvalidInputError(f"shear exponent must lie in [0, 1], got {self.shear_exponent}")

    @property
    def name(self) -> str:
        return self.wind_table.site_name


def shear_correct(v, h_ref: float, h_hub: float, alpha: float = DEFAULT_SHEAR_EXPONENT):
    """Scale wind speed ``v`` measured at ``h_ref`` to ``h_hub`` with the power law."""
    if h_ref <= 0 or h_hub <= 0:
        raise InvalidInputError(f"heights must be positive, got h_ref={h_ref}, h_hub={h_hub}")
    if np.any(np.asarray(v) < 0):
        raise InvalidInputError("wind speed must be non-negative")
    return v * (h_hub / h_ref) ** alpha


def power_curve_coeffs(curve: TurbinePowerCurve) -> tuple[float, float, float]:
    """Constant, linear and quadratic coefficients of the cut-in-to-rated branch.

    The coefficients are normalised to rated power, so the quadratic
    evaluates to 0 at cut-in and 1 at rated speed.
    """
    vi, vr = curve.cut_in, curve.rated_speed
    if vi == vr:
        raise SingularCurveError("cut-in equals rated speed; quadratic branch is undefined")
    denom = (vi - vr) ** 2
    cube = ((vi + vr) / (2.0 * vr)) ** 3
    a = (vi * (vi + vr) - 4.0 * vi * vr * cube) / denom
    b = (4.0 * (vi + vr) * cube - (3.0 * vi + vr)) / denom
    c = (2.0 - 4.0 * cube) / denom
    return a, b, c


def quadratic_fraction(v, curve: TurbinePowerCurve):
    """Unclamped quadratic branch, useful for identity checks."""
    a, b, c = power_curve_coeffs(curve)
    return a + b * v + c * v * v


def power_fraction(v, curve: TurbinePowerCurve):
    """Output as a fraction of rated power at hub-height speed ``v``.

    Accepts scalars or arrays. Zero below cut-in and at/above cut-out,
    quadratic on [cut_in, rated), one on [rated, cut_out).
    """
    scalar = np.ndim(v) == 0
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise InvalidInputError("wind speed must be non-negative")
    quad = np.clip(quadratic_fraction(v, curve), 0.0, 1.0)
    out = np.where((v >= curve.cut_in) & (v < curve.rated_speed), quad, 0.0)
    out = np.where((v >= curve.rated_speed) & (v < curve.cut_out), 1.0, out)
    return float(out) if scalar else out


def farm_power(v, curve: TurbinePowerCurve, n_turbines: int):
    """Farm output in MW for ``n_turbines`` identical machines."""
    if n_turbines < 1:
        raise InvalidInputError(f"n_turbines must be >= 1, got {n_turbines}")
    return n_turbines * curve.rated_power * power_fraction(v, curve)


def weibull_prob_range(lo: float, hi: float, w: WeibullParams) -> float:
    """P(lo < V < hi) for Weibull-distributed V; ``hi`` may be ``math.inf``."""
    if lo < 0 or hi < 0:
        raise InvalidInputError("wind speed bounds must be non-negative")
    if lo > hi:
        raise InvalidInputError(f"lower bound {lo} exceeds upper bound {hi}")
    return w.sf(lo) - w.sf(hi)


def _month_index(label: str) -> int | None:
    key = label.strip()[:3].title()
    return MONTHS.index(key) + 1 if key in MONTHS else None


def _is_mean_label(label: str) -> bool:
    return label.strip().lower() in ("mean", "year", "avg", "average")


def ingest_wind_table(stream: IO[str] | str | Iterable[str], reference_height: float,
                      site_name: str | None = None) -> WindSpeedTable:
    """Parse a month x hour wind climatology from CSV text.

    Header is ``hour,Jan,...,Dec`` or ``site,hour,Jan,...,Dec``; an optional
    trailing mean column and a final ``Mean`` row are ignored. Exactly 24
    hour rows (0-23) are required.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    rows = [r for r in csv.reader(stream) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty wind table")
    header = [h.strip() for h in rows[0]]
    lower = [h.lower() for h in header]
    if "hour" not in lower:
        raise ParseError("header row 1 has no 'hour' column")
    hour_col = lower.index("hour")
    site_col = lower.index("site") if "site" in lower else None
    month_cols: dict[int, int] = {}
    for j, h in enumerate(header):
        if j in (hour_col, site_col) or _is_mean_label(h):
            continue
        m = _month_index(h)
        if m is None:
            raise ParseError(f"row 1, column {j + 1}: unrecognised month header {h!r}")
        if m in month_cols:
            raise ParseError(f"row 1, column {j + 1}: duplicate month {h!r}")
        month_cols[m] = j
    missing = [MONTHS[m - 1] for m in range(1, 13) if m not in month_cols]
    if missing:
        raise ParseError(f"row 1: missing month columns {', '.join(missing)}")

    values = np.full((N_MONTHS, N_HOURS), np.nan)
    seen_hours: list[int] = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) <= hour_col:
            raise ParseError(f"row {i}: missing hour cell")
        label = row[hour_col].strip()
        if _is_mean_label(label):
            continue
        try:
            hour = int(float(label))
        except ValueError:
            raise ParseError(f"row {i}, column 'hour': non-numeric hour {label!r}") from None
        if not 0 <= hour < N_HOURS:
            raise ParseError(f"row {i}, column 'hour': hour {hour} outside 0-23")
        if hour in seen_hours:
            raise ParseError(f"row {i}, column 'hour': duplicate hour {hour}")
        seen_hours.append(hour)
        if site_col is not None and site_name is None and len(row) > site_col:
            site_name = row[site_col].strip() or None
        for m, j in month_cols.items():
            name = header[j]
            if j >= len(row) or not row[j].strip():
                raise ParseError(f"row {i} (hour {hour}), column {name!r}: missing cell")
            try:
                val = float(row[j])
            except ValueError:
                raise ParseError(
                    f"row {i} (hour {hour}), column {name!r}: non-numeric cell {row[j]!r}"
                ) from None
            if not math.isfinite(val) or val < 0:
                raise ParseError(f"row {i} (hour {hour}), column {name!r}: invalid speed {val}")
            values[m - 1, hour] = val
    if len(seen_hours) != N_HOURS:
        absent = sorted(set(range(N_HOURS)) - set(seen_hours))
        raise ParseError(
            f"expected 24 hour rows, found {len(seen_hours)} (missing hours {absent})"
        )
    return WindSpeedTable(site_name or "unnamed", reference_height, values)


def load_wind_table(path, reference_height: float, site_name: str | None = None) -> WindSpeedTable:
    with open(path, newline="", encoding="utf-8") as fh:
        return ingest_wind_table(fh, reference_height, site_name)
