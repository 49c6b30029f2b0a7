"""Voltage-quality assessment of a wind farm at its point of common coupling.

Steady-state voltage change, continuous flicker, switching voltage change
and switching flicker follow the IEC 61400-21 style formulas, evaluated for
one turbine and aggregated to the farm. All results are per-unit of the
nominal voltage; use ``units="percent"`` when writing a report to scale them.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

import numpy as np
import yaml

from .errors import ConfigError, InvalidInputError, ValidityDomainError

#: Widely used limit for steady-state voltage change (per-unit of nominal).
DEFAULT_DSS_LIMIT = 0.02
STRONG_SCR = 20.0
WEAK_SCR = 10.0


class InterpolationClampWarning(UserWarning):
    """A datasheet lookup fell outside the tabulated grid and was clamped."""


@dataclass(frozen=True)
class GridPoint:
    nominal_voltage: float  # kV
    short_circuit_power: float  # MVA
    impedance_angle: float  # degrees
    name: str = ""

    def __post_init__(self):
        if self.short_circuit_power <= 0:
            raise InvalidInputError(
                f"short-circuit power must be positive, got {self.short_circuit_power}"
            )
        if not 0 <= self.impedance_angle <= 90:
            raise InvalidInputError(
                f"impedance angle must lie in [0, 90] degrees, got {self.impedance_angle}"
            )

    def scaled(self, factor: float) -> "GridPoint":
        return GridPoint(self.nominal_voltage, self.short_circuit_power * factor,
                         self.impedance_angle, self.name)


@dataclass(frozen=True)
class PQTable:
    """Datasheet coefficient over impedance angle, optionally also over V_a.

    1-D tables have ``values`` shaped ``(len(angles),)``; 2-D tables have
    ``va`` set and ``values`` shaped ``(len(va), len(angles))``.
    """

    angles: tuple[float, ...]
    values: np.ndarray = field(repr=False)
    va: tuple[float, ...] | None = None

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        vals = np.array(self.values, dtype=float)
        if not angles or vals.size == 0:
            raise ConfigError("coefficient table is empty")
        if np.any(np.diff(angles) <= 0):
            raise ConfigError(f"angle grid must be strictly increasing, got {angles}")
        expected: tuple[int, ...] = (len(angles),)
        va = None
        if self.va is not None:
            va = tuple(float(v) for v in self.va)
            if not va:
                raise ConfigError("wind-speed grid is empty")
            if np.any(np.diff(va) <= 0):
                raise ConfigError(f"wind-speed grid must be strictly increasing, got {va}")
            expected = (len(va), len(angles))
        if vals.shape != expected:
            raise ConfigError(f"table values have shape {vals.shape}, expected {expected}")
        vals.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "va", va)
        object.__setattr__(self, "values", vals)

    @property
    def is_2d(self) -> bool:
        return self.va is not None


@dataclass(frozen=True)
class SwitchingCase:
    n10: int
    n120: int
    flicker_step_factor: PQTable
    voltage_change_factor: PQTable

    def __post_init__(self):
        if not 0 <= self.n10 <= self.n120:
            raise ConfigError(f"switching counts need 0 <= N10 <= N120, got {self.n10}, {self.n120}")


@dataclass(frozen=True)
class TurbinePQData:
    rated_apparent_power: float  # S_n, MVA
    peak_active_power: float  # P_60, MW
    peak_reactive_power: float  # Q_60, MVAR
    flicker_coefficients: PQTable
    cut_in: SwitchingCase  # cut-in at cut-in wind speed
    rated: SwitchingCase  # cut-in at rated wind speed
    name: str = ""
    rated_power: float | None = None  # P_n, MW

    def __post_init__(self):
        if self.rated_apparent_power <= 0:
            raise ConfigError("rated apparent power must be positive")


@dataclass(frozen=True)
class PQAssessment:
    label: str
    v_a: float
    s60: float
    phi: float
    s_n: float
    s_sc: float
    psi_k: float
    n_turbines: int
    d_ss: float
    d_ss_farm: float
    c: float
    p_lt_continuous: float
    p_lt_continuous_farm: float
    k_u: float
    d_so: float
    n120_cut_in: int
    k_f_cut_in: float
    p_lt_cut_in: float
    p_lt_cut_in_farm: float
    n120_rated: int
    k_f_rated: float
    p_lt_rated: float
    p_lt_rated_farm: float
    scr: float | None
    grid_strength: str | None
    d_ss_limit: float
    d_ss_compliant: bool


def short_circuit_power(line_voltage: float, sc_current: float) -> float:
    """Three-phase short-circuit power in MVA from kV and kA."""
    if line_voltage <= 0 or sc_current <= 0:
        raise InvalidInputError("line voltage and fault current must be positive")
    return math.sqrt(3.0) * line_voltage * sc_current


def short_circuit_ratio(s_sc: float, equipment_capacity: float) -> tuple[float, str]:
    """Ratio of short-circuit power to connected capacity and its grid-strength class."""
    if equipment_capacity <= 0:
        raise InvalidInputError("equipment capacity must be positive")
    ratio = s_sc / equipment_capacity
    if ratio > STRONG_SCR:
        label = "strong"
    elif ratio < WEAK_SCR:
        label = "weak"
    else:
        label = "intermediate"
    return ratio, label


def impedance_angle(r: float, x: float) -> float:
    if r == 0 and x == 0:
        raise InvalidInputError("impedance angle undefined for zero impedance")
    return math.degrees(math.atan2(x, r))


def apparent_power_and_phase(p60: float, q60: float) -> tuple[float, float]:
    """Apparent power and phase angle (degrees) at the 1-minute active power peak."""
    if p60 <= 0:
        raise InvalidInputError(f"P60 must be positive, got {p60}")
    return math.hypot(p60, q60), math.degrees(math.atan(q60 / p60))


def steady_state_voltage_change(s60: float, phi: float, grid: GridPoint,
                                n_turbines: int = 1) -> tuple[float, float]:
    """Per-turbine and farm steady-state voltage change (per-unit)."""
    cos_term = math.cos(math.radians(grid.impedance_angle + phi))
    if cos_term <= 0.1:
        raise ValidityDomainError(
            f"cos(psi_k + phi) = {cos_term:.4f} <= 0.1; steady-state formula is not valid "
            f"(psi_k={grid.impedance_angle}, phi={phi})"
        )
    _check_count(n_turbines)
    d_ss = s60 / grid.short_circuit_power * cos_term
    return d_ss, n_turbines * d_ss


def continuous_flicker(c: float, s_n: float, grid: GridPoint,
                       n_turbines: int = 1) -> tuple[float, float]:
    if c < 0:
        raise InvalidInputError("flicker coefficient must be non-negative")
    _check_count(n_turbines)
    p_lt = c * s_n / grid.short_circuit_power
    return p_lt, math.sqrt(n_turbines) * p_lt


def switching_voltage_change(k_u: float, s_n: float, grid: GridPoint) -> float:
    # Farm controls never switch two turbines at once, so no aggregation.
    if k_u < 0:
        raise InvalidInputError("voltage change factor must be non-negative")
    return k_u * s_n / grid.short_circuit_power


def switching_flicker(n120: float, k_f: float, s_n: float, grid: GridPoint,
                      n_turbines: int = 1) -> tuple[float, float]:
    """Flicker from switching operations; the farm value scales linearly in N."""
    if n120 < 0:
        raise InvalidInputError("N120 must be non-negative")
    _check_count(n_turbines)
    p_lt = 8.0 * n120 ** 0.31 * k_f * s_n / grid.short_circuit_power
    return p_lt, n_turbines * p_lt


def _check_count(n: int) -> None:
    if n < 1:
        raise InvalidInputError(f"number of turbines must be >= 1, got {n}")


def _interp_clamped(grid: Sequence[float], values: np.ndarray, x: float, what: str) -> np.ndarray:
    lo, hi = grid[0], grid[-1]
    if x < lo or x > hi:
        warnings.warn(
            f"{what}={x} outside tabulated range [{lo}, {hi}]; clamped",
            InterpolationClampWarning, stacklevel=3,
        )
        x = min(max(x, lo), hi)
    if len(grid) == 1:
        return values[0]
    j = int(np.searchsorted(grid, x, side="right")) - 1
    j = min(max(j, 0), len(grid) - 2)
    w = (x - grid[j]) / (grid[j + 1] - grid[j])
    return values[j] * (1.0 - w) + values[j + 1] * w


def interp_pq_coefficient(table: PQTable, psi_k: float, v_a: float | None = None) -> float:
    """Look up a datasheet coefficient; linear in angle, bilinear with V_a."""
    if table.is_2d:
        if v_a is None:
            raise InvalidInputError("2-D coefficient table requires v_a")
        by_angle = np.array([_interp_clamped(table.angles, row, psi_k, "psi_k")
                             for row in table.values])
        return float(_interp_clamped(table.va, by_angle, v_a, "v_a"))
    return float(_interp_clamped(table.angles, table.values, psi_k, "psi_k"))


def assess_scenario(turbine: TurbinePQData, grid: GridPoint, v_a: float, n_turbines: int,
                    label: str = "", d_ss_limit: float = DEFAULT_DSS_LIMIT) -> PQAssessment:
    """Full voltage-quality assessment for one farm of identical turbines."""
    try:
        s60, phi = apparent_power_and_phase(turbine.peak_active_power,
                                            turbine.peak_reactive_power)
    except InvalidInputError as exc:
        raise InvalidInputError(f"S60/phase: {exc}") from exc
    psi = grid.impedance_angle
    s_n = turbine.rated_apparent_power
    try:
        d_ss, d_ss_farm = steady_state_voltage_change(s60, phi, grid, n_turbines)
    except (ValidityDomainError, InvalidInputError) as exc:
        raise type(exc)(f"steady-state voltage change: {exc}") from exc

    c = interp_pq_coefficient(turbine.flicker_coefficients, psi, v_a)
    p_lt, p_lt_farm = continuous_flicker(c, s_n, grid, n_turbines)

    k_u = interp_pq_coefficient(turbine.rated.voltage_change_factor, psi)
    d_so = switching_voltage_change(k_u, s_n, grid)

    kf_ci = interp_pq_coefficient(turbine.cut_in.flicker_step_factor, psi)
    ci, ci_farm = switching_flicker(turbine.cut_in.n120, kf_ci, s_n, grid, n_turbines)
    kf_r = interp_pq_coefficient(turbine.rated.flicker_step_factor, psi)
    r, r_farm = switching_flicker(turbine.rated.n120, kf_r, s_n, grid, n_turbines)

    scr = strength = None
    if turbine.rated_power is not None:
        scr, strength = short_circuit_ratio(grid.short_circuit_power,
                                            n_turbines * turbine.rated_power)
    return PQAssessment(
        label=label, v_a=v_a, s60=s60, phi=phi, s_n=s_n, s_sc=grid.short_circuit_power,
        psi_k=psi, n_turbines=n_turbines, d_ss=d_ss, d_ss_farm=d_ss_farm,
        c=c, p_lt_continuous=p_lt, p_lt_continuous_farm=p_lt_farm,
        k_u=k_u, d_so=d_so,
        n120_cut_in=turbine.cut_in.n120, k_f_cut_in=kf_ci,
        p_lt_cut_in=ci, p_lt_cut_in_farm=ci_farm,
        n120_rated=turbine.rated.n120, k_f_rated=kf_r,
        p_lt_rated=r, p_lt_rated_farm=r_farm,
        scr=scr, grid_strength=strength,
        d_ss_limit=d_ss_limit, d_ss_compliant=d_ss_farm <= d_ss_limit,
    )


# -- datasheet I/O ---------------------------------------------------------

def _table_from_mapping(data: dict, where: str, allow_va: bool = False) -> PQTable:
    """``allow_va`` permits an optional wind-speed axis (a 2-D table)."""
    try:
        angles = data["angles"]
        values = data["values"]
        va = data.get("va") if allow_va else None
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{where}: missing key {exc}") from None
    return PQTable(tuple(angles), np.array(values, dtype=float), tuple(va) if va else None)


def pq_data_from_mapping(data: dict, source: str = "<datasheet>") -> TurbinePQData:
    """Build :class:`TurbinePQData` from a parsed datasheet mapping."""
    known = {"name", "pn_mw", "sn_mva", "p60_mw", "q60_mvar", "hub_height_m",
             "flicker_coefficients", "switching"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")
    try:
        flicker = _table_from_mapping(data["flicker_coefficients"],
                                      f"{source}: flicker_coefficients", allow_va=True)
        cases = {}
        for i, entry in enumerate(data["switching"]):
            where = f"{source}: switching[{i}]"
            case = entry.get("case")
            if case not in ("cut_in", "rated"):
                raise ConfigError(f"{where}: case must be 'cut_in' or 'rated', got {case!r}")
            cases[case] = SwitchingCase(
                int(entry["n10"]), int(entry["n120"]),
                _table_from_mapping(entry["kf"], f"{where}.kf"),
                _table_from_mapping(entry["ku"], f"{where}.ku"),
            )
        if set(cases) != {"cut_in", "rated"}:
            raise ConfigError(f"{source}: switching needs both 'cut_in' and 'rated' cases")
        return TurbinePQData(
            rated_apparent_power=float(data["sn_mva"]),
            peak_active_power=float(data["p60_mw"]),
            peak_reactive_power=float(data["q60_mvar"]),
            flicker_coefficients=flicker,
            cut_in=cases["cut_in"],
            rated=cases["rated"],
            name=str(data.get("name", "")),
            rated_power=float(data["pn_mw"]) if "pn_mw" in data else None,
        )
    except KeyError as exc:
        raise ConfigError(f"{source}: missing key {exc}") from None


def load_pq_datasheet(path: str | Path) -> TurbinePQData:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: datasheet must be a mapping")
    return pq_data_from_mapping(data, str(path))


# -- reporting -------------------------------------------------------------

REPORT_COLUMNS = (
    ("scenario", "label", False),
    ("v_a_ms", "v_a", False),
    ("s60_mva", "s60", False),
    ("sn_mva", "s_n", False),
    ("ssc_mva", "s_sc", False),
    ("phi_deg", "phi", False),
    ("psi_k_deg", "psi_k", False),
    ("n_wt", "n_turbines", False),
    ("d_ss", "d_ss", True),
    ("d_ss_farm", "d_ss_farm", True),
    ("c_psi_va", "c", False),
    ("p_lt", "p_lt_continuous", True),
    ("p_lt_farm", "p_lt_continuous_farm", True),
    ("k_u", "k_u", False),
    ("d_so", "d_so", True),
    ("n120_cut_in", "n120_cut_in", False),
    ("k_f_cut_in", "k_f_cut_in", False),
    ("p_lt_cut_in", "p_lt_cut_in", True),
    ("p_lt_cut_in_farm", "p_lt_cut_in_farm", True),
    ("n120_rated", "n120_rated", False),
    ("k_f_rated", "k_f_rated", False),
    ("p_lt_rated", "p_lt_rated", True),
    ("p_lt_rated_farm", "p_lt_rated_farm", True),
    ("scr", "scr", False),
    ("grid_strength", "grid_strength", False),
    ("d_ss_compliant", "d_ss_compliant", False),
)


def write_pq_report(assessments: Sequence[PQAssessment], fh: IO[str],
                    units: str = "pu") -> None:
    """One row per scenario; ``units="percent"`` scales per-unit columns by 100."""
    if units not in ("pu", "percent"):
        raise InvalidInputError(f"units must be 'pu' or 'percent', got {units!r}")
    scale = 100.0 if units == "percent" else 1.0
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([col for col, _, _ in REPORT_COLUMNS])
    for a in assessments:
        row = []
        for _, attr, per_unit in REPORT_COLUMNS:
            val = getattr(a, attr)
            if per_unit:
                val = val * scale
            row.append("" if val is None else val)
        writer.writerow(row)
