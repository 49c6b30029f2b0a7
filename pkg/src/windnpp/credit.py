"""PJM-style capacity credit and replacement-capacity arithmetic.

The credit is the capacity factor over a peak window of months x hours,
averaged over the evaluation year and the two years before it.
"""

from __future__ import annotations

import calendar
import csv
import io
from dataclasses import dataclass, field
from datetime import datetime
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import EmptyWindowError, InvalidInputError, ParseError
from .wind import MONTHS, N_HOURS, N_MONTHS

ROLLING_YEARS = 3


@dataclass(frozen=True)
class PeakWindow:
    months: frozenset[int] = frozenset({5, 6, 7, 8})
    hours: frozenset[int] = frozenset({17, 18, 19, 20})

    def __post_init__(self):
        months, hours = frozenset(self.months), frozenset(self.hours)
        if not months or not hours:
            raise InvalidInputError("peak window needs at least one month and one hour")
        if not months <= set(range(1, 13)):
            raise InvalidInputError(f"months must lie in 1-12, got {sorted(months)}")
        if not hours <= set(range(24)):
            raise InvalidInputError(f"hours must lie in 0-23, got {sorted(hours)}")
        object.__setattr__(self, "months", months)
        object.__setattr__(self, "hours", hours)

    def cells(self) -> list[tuple[int, int]]:
        return [(m, h) for m in sorted(self.months) for h in sorted(self.hours)]


#: Egyptian grid peak: 5-8 PM, May through August.
EGYPT_PEAK = PeakWindow()
#: PJM's own window: 3-7 PM, June through August.
PJM_PEAK = PeakWindow(frozenset({6, 7, 8}), frozenset({15, 16, 17, 18, 19}))
#: CPUC: noon-6 PM, May through September.
CPUC_PEAK = PeakWindow(frozenset({5, 6, 7, 8, 9}), frozenset(range(12, 19)))
NAMED_WINDOWS = {"egypt": EGYPT_PEAK, "pjm": PJM_PEAK, "cpuc": CPUC_PEAK}


@dataclass(frozen=True)
class GenerationYear:
    """Output samples for one year, each tagged with month, hour and weight.

    Hourly data carry unit weights. A month x hour climatology is expanded
    as if each cell repeated on every day of its month, which amounts to
    weighting the cell by the month's day count.
    """

    year: int
    months: np.ndarray = field(repr=False)
    hours: np.ndarray = field(repr=False)
    fractions: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        arrays = [np.asarray(a) for a in (self.months, self.hours, self.fractions, self.weights)]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1:
            raise InvalidInputError("months, hours, fractions and weights must be equal-length 1-D")
        frac = arrays[2].astype(float)
        if np.any(frac < 0) or np.any(frac > 1):
            raise InvalidInputError(f"year {self.year}: output fractions must lie in [0, 1]")
        for name, arr in zip(("months", "hours", "fractions", "weights"), arrays):
            arr = arr.astype(float) if name in ("fractions", "weights") else arr.astype(int)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_hourly(cls, year: int, timestamps: Sequence[datetime],
                    fractions: Sequence[float]) -> "GenerationYear":
        months = np.array([t.month for t in timestamps], dtype=int)
        hours = np.array([t.hour for t in timestamps], dtype=int)
        return cls(year, months, hours, np.asarray(fractions, dtype=float), np.ones(len(months)))

    @classmethod
    def from_climatology(cls, year: int, table) -> "GenerationYear":
        table = np.asarray(table, dtype=float)
        if table.shape != (N_MONTHS, N_HOURS):
            raise InvalidInputError(f"climatology must be 12x24, got {table.shape}")
        months = np.repeat(np.arange(1, 13), N_HOURS)
        hours = np.tile(np.arange(N_HOURS), N_MONTHS)
        days = np.array([calendar.monthrange(year, m)[1] for m in range(1, 13)], dtype=float)
        return cls(year, months, hours, table.ravel(), np.repeat(days, N_HOURS))

    def in_window(self, window: PeakWindow) -> np.ndarray:
        return np.isin(self.months, list(window.months)) & np.isin(self.hours, list(window.hours))

    def scaled(self, s: float) -> "GenerationYear":
        return GenerationYear(self.year, self.months, self.hours, self.fractions * s, self.weights)


@dataclass(frozen=True)
class RollingCredit:
    year: int
    credit: float
    years_used: tuple[int, ...]
    provisional: bool


def _history(years: Iterable[GenerationYear]) -> list[GenerationYear]:
    hist = sorted(years, key=lambda y: y.year)
    if not hist:
        raise InvalidInputError("generation history needs at least one year")
    if len({y.year for y in hist}) != len(hist):
        raise InvalidInputError("duplicate years in generation history")
    return hist


def window_capacity_factor(year: GenerationYear, window: PeakWindow = EGYPT_PEAK) -> float:
    mask = year.in_window(window)
    w = year.weights[mask]
    if w.size == 0 or w.sum() <= 0:
        raise EmptyWindowError(f"year {year.year}: no samples inside the peak window")
    return float(np.dot(w, year.fractions[mask]) / w.sum())


def pjm_rolling_credit(history: Iterable[GenerationYear],
                       window: PeakWindow = EGYPT_PEAK) -> list[RollingCredit]:
    """Rolling three-year mean of peak-window capacity factors, one entry per year.

    Years with fewer than three years of data available (counting itself)
    average what exists and are flagged provisional.
    """
    hist = _history(history)
    cfs = {y.year: window_capacity_factor(y, window) for y in hist}
    out = []
    for y in hist:
        used = tuple(yr for yr in range(y.year - ROLLING_YEARS + 1, y.year + 1) if yr in cfs)
        credit = sum(cfs[yr] for yr in used) / len(used)
        out.append(RollingCredit(y.year, credit, used, len(used) < ROLLING_YEARS))
    return out


def credit_table(histories: dict[str, Iterable[GenerationYear]],
                 window: PeakWindow = EGYPT_PEAK) -> list[tuple[str, list[float]]]:
    """Per (month, hour) capacity factor over the last three years, plus an average row.

    Returns rows ``(label, [value per history])`` in window order with a
    final ``Average`` row equal to the latest rolling credit.
    """
    names = list(histories)
    rows: list[tuple[str, list[float]]] = []
    latest = {k: _history(v)[-ROLLING_YEARS:] for k, v in histories.items()}
    for m, h in window.cells():
        cell = PeakWindow(frozenset({m}), frozenset({h}))
        vals = []
        for k in names:
            cfs = [window_capacity_factor(y, cell) for y in latest[k]]
            vals.append(sum(cfs) / len(cfs))
        rows.append((f"{MONTHS[m - 1]} {h:02d}:00", vals))
    avg = [pjm_rolling_credit(latest[k], window)[-1].credit for k in names]
    rows.append(("Average", avg))
    return rows


def replacement_capacity(installed_mw: float, credit: float) -> float:
    """Firm capacity a planner may count for ``installed_mw`` of wind."""
    if not 0 <= credit <= 1:
        raise InvalidInputError(f"capacity credit must lie in [0, 1], got {credit}")
    if installed_mw < 0:
        raise InvalidInputError("installed capacity must be non-negative")
    return installed_mw * credit


def ingest_hourly_history(stream: IO[str] | str) -> list[GenerationYear]:
    """Read ``timestamp,output_fraction`` rows (ISO-8601 local time) into years."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:2]] != ["timestamp", "output_fraction"]:
        raise ParseError("row 1: header must be 'timestamp,output_fraction'")
    by_year: dict[int, tuple[list[datetime], list[float]]] = {}
    for i, row in enumerate(reader, start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) < 2:
            raise ParseError(f"row {i}: expected 2 columns, got {len(row)}")
        try:
            ts = datetime.fromisoformat(row[0].strip())
        except ValueError:
            raise ParseError(f"row {i}, column 'timestamp': bad timestamp {row[0]!r}") from None
        try:
            frac = float(row[1])
        except ValueError:
            raise ParseError(f"row {i}, column 'output_fraction': non-numeric {row[1]!r}") from None
        if not 0 <= frac <= 1:
            raise ParseError(f"row {i}, column 'output_fraction': {frac} outside [0, 1]")
        stamps, fracs = by_year.setdefault(ts.year, ([], []))
        stamps.append(ts)
        fracs.append(frac)
    if not by_year:
        raise ParseError("history contains no data rows")
    return [GenerationYear.from_hourly(y, *by_year[y]) for y in sorted(by_year)]


#: El-Zayt capacity credit (%) reported for 2007-2009 under the Egyptian peak
#: window, turbine Scenarios 1-3. Display data only; the hourly record behind
#: it is not available, so nothing here is recomputed from it.
EL_ZAYT_REFERENCE = (
    ("May, 5 PM", 77.1, 68.3, 63.3),
    ("May, 6 PM", 70.4, 59.6, 53.8),
    ("May, 7 PM", 64.0, 53.8, 48.5),
    ("May, 8 PM", 62.7, 55.2, 51.3),
    ("June, 5 PM", 85.7, 77.2, 71.7),
    ("June, 6 PM", 81.6, 73.2, 68.2),
    ("June, 7 PM", 80.7, 74.2, 70.9),
    ("June, 8 PM", 84.0, 78.4, 74.9),
    ("July, 5 PM", 73.5, 60.0, 52.4),
    ("July, 6 PM", 64.2, 52.3, 46.5),
    ("July, 7 PM", 63.7, 55.0, 51.1),
    ("July, 8 PM", 71.4, 64.7, 61.2),
    ("Aug, 5 PM", 80.1, 62.7, 53.7),
    ("Aug, 6 PM", 71.5, 55.6, 48.5),
    ("Aug, 7 PM", 71.2, 59.8, 53.8),
    ("Aug, 8 PM", 79.2, 69.9, 64.2),
    ("Average", 73.8, 63.7, 58.4),
)
