"""Levelized cost of energy from a year-by-year discounted ledger.

Years run t = 1..T where T = construction + lifetime. Capital is spread
evenly over the construction years; energy, fuel and O&M accrue only in the
operating years. Costs are discounted by (1+r)^(t-1) and energy by
(1+r)^(t-0.5), i.e. energy is taken at mid-year.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .errors import InvalidInputError, UndefinedLCOEError

HOURS_PER_YEAR = 8760.0
DEFAULT_DISCOUNT_RATE = 0.08
DEFAULT_LIFETIME_YEARS = 20
DEFAULT_CONSTRUCTION_YEARS = 1

SWEEP_PARAMETERS = ("variable_om", "discount_rate", "capacity_factor", "capital_cost",
                    "fixed_om", "fuel_cost")


@dataclass(frozen=True)
class PlantCostModel:
    capacity: float  # MW
    capacity_factor: float
    capital_cost: float  # $/kW
    fixed_om: float = 0.0  # $/year
    variable_om: float = 0.0  # $/MWh
    fuel_cost: float = 0.0  # $/MWh
    discount_rate: float = DEFAULT_DISCOUNT_RATE
    construction_years: int = DEFAULT_CONSTRUCTION_YEARS
    lifetime_years: int = DEFAULT_LIFETIME_YEARS
    name: str = ""

    def __post_init__(self):
        money = {k: getattr(self, k) for k in ("capacity", "capital_cost", "fixed_om",
                                               "variable_om", "fuel_cost")}
        bad = [k for k, v in money.items() if v < 0]
        if bad:
            raise InvalidInputError(f"{', '.join(bad)} must be non-negative")
        if not 0 <= self.capacity_factor <= 1:
            raise InvalidInputError(f"capacity factor must lie in [0, 1], got {self.capacity_factor}")
        if not 0 <= self.discount_rate < 1:
            raise InvalidInputError(f"discount rate must lie in [0, 1), got {self.discount_rate}")
        if int(self.construction_years) != self.construction_years or self.construction_years < 1:
            raise InvalidInputError("construction_years must be an integer >= 1")
        if int(self.lifetime_years) != self.lifetime_years or self.lifetime_years < 1:
            raise InvalidInputError("lifetime_years must be an integer >= 1")

    @property
    def total_years(self) -> int:
        return int(self.construction_years + self.lifetime_years)

    @property
    def investment(self) -> float:
        return 1000.0 * self.capacity * self.capital_cost

    @property
    def annual_energy(self) -> float:
        return self.capacity * self.capacity_factor * HOURS_PER_YEAR

    def replace(self, **changes) -> "PlantCostModel":
        return dataclasses.replace(self, **changes)


#: Median onshore wind farm of a 12-country survey (2008 US$).
MEDIAN_ONSHORE = PlantCostModel(capacity=45.0, capacity_factor=0.257, capital_cost=2348.64,
                                variable_om=21.92, name="median")


@dataclass(frozen=True)
class CashflowLedger:
    years: np.ndarray
    capital: np.ndarray
    fixed_om: np.ndarray
    variable_om: np.ndarray
    fuel: np.ndarray
    energy: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.capital + self.fixed_om + self.variable_om + self.fuel

    def cost_factors(self, r: float) -> np.ndarray:
        return (1.0 + r) ** -(self.years - 1.0)

    def energy_factors(self, r: float) -> np.ndarray:
        return (1.0 + r) ** -(self.years - 0.5)

    def discounted_cost(self, r: float) -> np.ndarray:
        return self.total * self.cost_factors(r)

    def discounted_energy(self, r: float) -> np.ndarray:
        return self.energy * self.energy_factors(r)


def build_ledger(model: PlantCostModel) -> CashflowLedger:
    n = model.total_years
    years = np.arange(1, n + 1, dtype=float)
    building = years <= model.construction_years
    operating = ~building
    capital = np.where(building, model.investment / model.construction_years, 0.0)
    energy = np.where(operating, model.annual_energy, 0.0)
    return CashflowLedger(
        years=years,
        capital=capital,
        fixed_om=np.where(operating, model.fixed_om, 0.0),
        variable_om=energy * model.variable_om,
        fuel=energy * model.fuel_cost,
        energy=energy,
    )


def lcoe(ledger: CashflowLedger, discount_rate: float) -> float:
    """Levelized cost in $/MWh."""
    return portfolio_lcoe([(ledger, discount_rate)])


def portfolio_lcoe(items: Sequence[tuple[CashflowLedger, float]]) -> float:
    """Total discounted cost over total discounted energy across several plants."""
    cost = sum(float(led.discounted_cost(r).sum()) for led, r in items)
    energy = sum(float(led.discounted_energy(r).sum()) for led, r in items)
    if energy <= 0:
        raise UndefinedLCOEError("discounted energy is zero; LCOE undefined")
    return cost / energy


def model_lcoe(model: PlantCostModel) -> float:
    return lcoe(build_ledger(model), model.discount_rate)


def sensitivity_sweep(base: PlantCostModel, parameter: str,
                      grid: Sequence[float]) -> list[tuple[float, float]]:
    """LCOE at each grid value of ``parameter``, everything else held at ``base``."""
    if parameter not in SWEEP_PARAMETERS:
        raise InvalidInputError(f"unknown sweep parameter {parameter!r}; "
                                f"expected one of {', '.join(SWEEP_PARAMETERS)}")
    if len(grid) == 0:
        raise InvalidInputError("sweep grid is empty")
    return [(float(v), model_lcoe(base.replace(**{parameter: float(v)}))) for v in grid]


# -- coupled vs dispersed portfolios ----------------------------------------

@dataclass(frozen=True)
class CostAspect:
    name: str
    sign: int  # -1 decrease, +1 increase
    target: str  # "capital" or "om"
    low: float  # percent
    high: float


#: Aspects of co-siting a wind farm with a nuclear plant and their projected
#: cost impact relative to the median case.
COUPLING_ASPECTS = (
    CostAspect("Availability of land with cheap prices", -1, "capital", 5, 5),
    CostAspect("Existence of connection to grid", -1, "capital", 0, 10),
    CostAspect("Existence of infrastructure required for WF", -1, "capital", 5, 5),
    CostAspect("Smoothing effect of aggregated wind energy", -1, "om", 10, 10),
    CostAspect("Voltage variations at PCC", -1, "capital", 5, 5),
    CostAspect("Reactive power control capability", -1, "capital", 30, 40),
    CostAspect("WF switch gear", +1, "capital", 5, 5),
    CostAspect("Filters for WF harmonics", +1, "capital", 5, 5),
)


def aggregate_aspects(aspects: Sequence[CostAspect] = COUPLING_ASPECTS, net: bool = False
                      ) -> dict[str, tuple[float, float]]:
    """Total (low, high) reduction fraction for capital and O&M.

    By default only decreasing aspects are summed, which yields the quoted
    45-65% capital and 10% O&M figures. ``net=True`` also subtracts the
    increases.
    """
    out = {"capital": [0.0, 0.0], "om": [0.0, 0.0]}
    for a in aspects:
        if a.target not in out:
            raise InvalidInputError(f"aspect {a.name!r}: target must be 'capital' or 'om'")
        if a.sign < 0:
            out[a.target][0] += a.low / 100.0
            out[a.target][1] += a.high / 100.0
        elif net:
            out[a.target][0] -= a.high / 100.0
            out[a.target][1] -= a.low / 100.0
    return {k: (v[0], v[1]) for k, v in out.items()}


@dataclass(frozen=True)
class CouplingAdjustments:
    capital_reduction: tuple[float, ...] = tuple(np.round(np.arange(0, 0.701, 0.05), 10))
    om_reduction: tuple[float, ...] = (0.0, 0.05, 0.10, 0.15, 0.20)
    aspects: tuple[CostAspect, ...] = COUPLING_ASPECTS

    def __post_init__(self):
        for name in ("capital_reduction", "om_reduction"):
            grid = tuple(float(x) for x in getattr(self, name))
            if not grid:
                raise InvalidInputError(f"{name} grid is empty")
            if any(not 0 <= x < 1 for x in grid):
                raise InvalidInputError(f"{name} values must lie in [0, 1)")
            object.__setattr__(self, name, grid)


@dataclass(frozen=True)
class PortfolioPlant:
    model: PlantCostModel
    coupled: bool = False


@dataclass(frozen=True)
class CouplingComparison:
    capital_reduction: tuple[float, ...]
    om_reduction: tuple[float, ...]
    lcoe_a: np.ndarray = field(repr=False)  # shape (len(om), len(capital))
    lcoe_b: float
    breakeven: tuple[float | None, ...]  # capital reduction per O&M level

    @property
    def a_cheaper(self) -> np.ndarray:
        return self.lcoe_a <= self.lcoe_b


def _reduced(model: PlantCostModel, cap: float, om: float) -> PlantCostModel:
    return model.replace(capital_cost=model.capital_cost * (1 - cap),
                         variable_om=model.variable_om * (1 - om),
                         fixed_om=model.fixed_om * (1 - om))


def _case_a_lcoe(case_a: Sequence[PortfolioPlant], cap: float, om: float) -> float:
    items = []
    for p in case_a:
        m = _reduced(p.model, cap, om) if p.coupled else p.model
        items.append((build_ledger(m), m.discount_rate))
    return portfolio_lcoe(items)


def coupling_compare(case_a: Sequence[PortfolioPlant], case_b: Sequence[PlantCostModel],
                     adjustments: CouplingAdjustments = CouplingAdjustments()
                     ) -> CouplingComparison:
    """Portfolio LCOE of the coupled case over the reduction grid vs the dispersed-free case.

    Coupled plants in ``case_a`` get their capital and O&M reduced by each
    grid value. ``breakeven`` is the smallest capital reduction at which
    case A is no dearer than case B, per O&M level (``None`` if none in
    [0, 1)). Case-A LCOE is affine in the capital reduction, so the crossing
    is solved exactly rather than read off the grid.
    """
    if not case_a or not case_b:
        raise InvalidInputError("both cases need at least one plant")
    lcoe_b = portfolio_lcoe([(build_ledger(m), m.discount_rate) for m in case_b])
    caps, oms = adjustments.capital_reduction, adjustments.om_reduction
    grid = np.array([[_case_a_lcoe(case_a, c, o) for c in caps] for o in oms])
    breakeven = []
    for o in oms:
        at0 = _case_a_lcoe(case_a, 0.0, o)
        if at0 <= lcoe_b:
            breakeven.append(0.0)
            continue
        slope = _case_a_lcoe(case_a, 1.0, o) - at0
        x = (lcoe_b - at0) / slope if slope < 0 else None
        breakeven.append(x if x is not None and x < 1 else None)
    return CouplingComparison(caps, oms, grid, lcoe_b, tuple(breakeven))


# -- CSV output ---------------------------------------------------------------

def write_ledger_csv(ledger: CashflowLedger, discount_rate: float, fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["year", "capital", "fixed_om", "variable_om", "fuel", "total", "energy",
                "discounted_cost", "discounted_energy"])
    dc, de = ledger.discounted_cost(discount_rate), ledger.discounted_energy(discount_rate)
    total = ledger.total
    for i, y in enumerate(ledger.years):
        w.writerow([int(y), float(ledger.capital[i]), float(ledger.fixed_om[i]),
                    float(ledger.variable_om[i]), float(ledger.fuel[i]), float(total[i]),
                    float(ledger.energy[i]), float(dc[i]), float(de[i])])


def write_sweep_csv(parameter: str, sweep: Sequence[tuple[float, float]], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([parameter, "lcoe_usd_per_mwh"])
    for v, c in sweep:
        w.writerow([v, c])


def write_comparison_csv(label: str, cmp: CouplingComparison, fh: IO[str],
                         header: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(["comparison", "om_reduction", "capital_reduction", "lcoe_a", "lcoe_b",
                    "a_not_dearer"])
    for i, o in enumerate(cmp.om_reduction):
        for j, c in enumerate(cmp.capital_reduction):
            w.writerow([label, o, c, float(cmp.lcoe_a[i, j]), cmp.lcoe_b,
                        int(cmp.lcoe_a[i, j] <= cmp.lcoe_b)])
