"""Continuous-time Markov chains for emergency-power availability and reliability.

Generators use the column convention: ``generator[i, j]`` is the rate from
state ``j`` into state ``i`` (1/h), so ``dP/dt = A @ P`` and every column
sums to zero.

Built-in constructors cover a two-state unit, the 1-out-of-2 diesel
generator set with common-cause failure, and the 7-state model of two
wind turbines whose transitions between wind-speed regions use Weibull
probabilities directly as hourly rates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    GeneratorError,
    InvalidInputError,
    MultipleRecurrentClassError,
    StiffnessError,
)
from .wind import TurbinePowerCurve, WeibullParams, power_curve_coeffs

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10


@dataclass(frozen=True)
class MarkovModel:
    state_labels: tuple[str, ...]
    generator: np.ndarray = field(repr=False)
    success_states: tuple[int, ...]
    initial_distribution: np.ndarray = field(repr=False)

    def __post_init__(self):
        gen = np.array(self.generator, dtype=float)
        init = np.array(self.initial_distribution, dtype=float)
        n = len(self.state_labels)
        if gen.shape != (n, n):
            raise InvalidInputError(f"generator shape {gen.shape} does not match {n} labels")
        if init.shape != (n,):
            raise InvalidInputError(f"initial distribution must have length {n}")
        success = tuple(sorted(int(i) for i in self.success_states))
        if not success:
            raise InvalidInputError("success state set is empty")
        if any(not 0 <= i < n for i in success) or len(set(success)) != len(success):
            raise InvalidInputError(f"invalid success state indices {success}")
        gen.setflags(write=False)
        init.setflags(write=False)
        object.__setattr__(self, "generator", gen)
        object.__setattr__(self, "initial_distribution", init)
        object.__setattr__(self, "success_states", success)
        object.__setattr__(self, "state_labels", tuple(self.state_labels))

    @property
    def n_states(self) -> int:
        return len(self.state_labels)

    @property
    def failure_states(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_states) if i not in self.success_states)

    def reduced(self) -> "MarkovModel":
        """Model restricted to the success states (failure rows/columns deleted).

        Columns of the reduced generator no longer sum to zero; the deficit is
        the rate of absorption into failure.
        """
        keep = list(self.success_states)
        gen = self.generator[np.ix_(keep, keep)]
        return MarkovModel(
            tuple(self.state_labels[i] for i in keep), gen,
            tuple(range(len(keep))), self.initial_distribution[keep],
        )


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    distributions: np.ndarray  # shape (len(times), n_states)


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.times)


@dataclass
class GeneratorReport:
    column_residuals: np.ndarray
    negative_offdiagonal: list[tuple[int, int, float]]
    bad_columns: list[int]
    initial_sum: float
    issues: list[str]

    @property
    def ok(self) -> bool:
        return not self.issues


@dataclass(frozen=True)
class DieselRates:
    failure_rate: float
    repair_rate: float
    common_cause_rate: float

    def __post_init__(self):
        if min(self.failure_rate, self.repair_rate, self.common_cause_rate) < 0:
            raise InvalidInputError("diesel generator rates must be non-negative")


@dataclass(frozen=True)
class UnitRates:
    failure_rate: float
    repair_rate: float

    def __post_init__(self):
        if min(self.failure_rate, self.repair_rate) < 0:
            raise InvalidInputError("failure and repair rates must be non-negative")


@dataclass(frozen=True)
class WindTransitionProbs:
    """Wind-speed region probabilities used as transition rates.

    ``p06`` is P(V < V_i), ``p60`` P(V > V_i), ``p30`` P(V < V_r),
    ``p03`` P(V > V_r), ``p63`` P(V < V_o), ``p36`` P(V > V_o). The
    other transitions of the 7-state graph alias these six values.
    """

    p06: float
    p60: float
    p30: float
    p03: float
    p63: float
    p36: float

    # aliases
    p16 = p26 = property(lambda self: self.p06)
    p61 = p62 = property(lambda self: self.p60)
    p41 = p52 = property(lambda self: self.p30)
    p14 = p25 = property(lambda self: self.p03)
    p64 = p65 = property(lambda self: self.p63)
    p46 = p56 = property(lambda self: self.p36)


def validate_generator(m: MarkovModel, tol: float = 1e-12) -> GeneratorReport:
    """Check column sums, off-diagonal signs and the initial distribution."""
    gen = m.generator
    scale = max(1.0, float(np.max(np.abs(gen))) if gen.size else 1.0)
    residuals = gen.sum(axis=0)
    issues: list[str] = []
    bad_cols = [j for j, r in enumerate(residuals) if abs(r) > tol * scale]
    for j in bad_cols:
        issues.append(f"column {j} ({m.state_labels[j]}) sums to {residuals[j]:.3e}, not 0")
    neg = []
    n = m.n_states
    for i in range(n):
        for j in range(n):
            if i != j and gen[i, j] < 0:
                neg.append((i, j, float(gen[i, j])))
                issues.append(
                    f"entry [{i}][{j}] ({m.state_labels[j]} -> {m.state_labels[i]}) "
                    f"is negative: {gen[i, j]:.3e}"
                )
    if not np.all(np.isfinite(gen)):
        issues.append("generator contains non-finite entries")
    init = m.initial_distribution
    init_sum = float(init.sum())
    if abs(init_sum - 1.0) > 1e-12 or np.any(init < 0):
        issues.append(f"initial distribution sums to {init_sum} or has negative entries")
    return GeneratorReport(residuals, neg, bad_cols, init_sum, issues)


def check_generator(m: MarkovModel) -> None:
    report = validate_generator(m)
    if not report.ok:
        raise GeneratorError("invalid generator: " + "; ".join(report.issues), report)


def _time_grid(t_end: float, times, n_points: int) -> np.ndarray:
    if t_end <= 0:
        raise InvalidInputError(f"t_end must be positive, got {t_end}")
    if times is None:
        return np.linspace(0.0, t_end, n_points)
    grid = np.asarray(times, dtype=float)
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0) or grid[-1] > t_end:
        raise InvalidInputError("time grid must start at 0, increase strictly and end <= t_end")
    return grid


def _solve(gen: np.ndarray, p0: np.ndarray, t_end: float, grid: np.ndarray,
           rtol: float, atol: float) -> np.ndarray:
    sol = solve_ivp(lambda t, p: gen @ p, (0.0, t_end), p0, method="RK45",
                    t_eval=grid, rtol=rtol, atol=atol)
    if sol.status != 0:
        diag = float(np.max(np.abs(np.diag(gen)))) if gen.size else 0.0
        raise StiffnessError(
            f"integration failed ({sol.message}); largest diagonal magnitude {diag:.3e} 1/h"
        )
    return sol.y.T


def integrate(m: MarkovModel, t_end: float, times: Sequence[float] | None = None,
              n_points: int = 1001, rtol: float = DEFAULT_RTOL,
              atol: float = DEFAULT_ATOL) -> Trajectory:
    """Solve dP/dt = A P from the initial distribution with adaptive RK45."""
    check_generator(m)
    grid = _time_grid(t_end, times, n_points)
    dist = _solve(m.generator, m.initial_distribution, t_end, grid, rtol, atol)
    return Trajectory(grid, dist)


def availability_curve(traj: Trajectory, success_states: Sequence[int]) -> TimeSeries:
    if len(success_states) == 0:
        raise InvalidInputError("success state set is empty")
    idx = list(success_states)
    return TimeSeries(traj.times, traj.distributions[:, idx].sum(axis=1))


def unavailability_curve(traj: Trajectory, failure_states: Sequence[int]) -> TimeSeries:
    idx = list(failure_states)
    return TimeSeries(traj.times, traj.distributions[:, idx].sum(axis=1))


def reliability_curve(m: MarkovModel, t_end: float, times: Sequence[float] | None = None,
                      n_points: int = 1001, rtol: float = DEFAULT_RTOL,
                      atol: float = DEFAULT_ATOL) -> TimeSeries:
    """Probability of staying in success states throughout [0, t].

    Integrates the reduced system with no renormalisation; probability that
    leaks out is absorbed failure. Integrator ripple at the ``atol`` scale is
    removed by clipping to [0, 1] and taking the running minimum.
    """
    check_generator(m)
    grid = _time_grid(t_end, times, n_points)
    red = m.reduced()
    dist = _solve(red.generator, red.initial_distribution, t_end, grid, rtol, atol)
    return TimeSeries(grid, np.minimum.accumulate(np.clip(dist.sum(axis=1), 0.0, 1.0)))


def steady_state(m: MarkovModel, rank_tol: float = 1e-10) -> np.ndarray:
    """Stationary distribution from the null space of the generator."""
    gen = m.generator
    n = m.n_states
    sv = np.linalg.svd(gen, compute_uv=False)
    scale = max(1.0, float(sv[0])) if n else 1.0
    nullity = int(np.sum(sv <= rank_tol * scale))
    if nullity > 1:
        raise MultipleRecurrentClassError(
            f"generator has a {nullity}-dimensional null space; no unique steady state"
        )
    lhs = np.vstack([gen, np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    return pi


# -- model constructors ------------------------------------------------------

def build_two_state_model(rates: UnitRates) -> MarkovModel:
    """Single repairable unit: up <-> down."""
    lam, mu = rates.failure_rate, rates.repair_rate
    gen = np.array([[-lam, mu], [lam, -mu]])
    return MarkovModel(("up", "down"), gen, (0,), np.array([1.0, 0.0]))


def build_dg_model(rates: DieselRates) -> MarkovModel:
    """Two identical diesel generators, 1-out-of-2 success, common-cause failure.

    S0 both up, S1/S2 one unit down, S3 both down.
    """
    lam, mu, ccf = rates.failure_rate, rates.repair_rate, rates.common_cause_rate
    gen = np.array([
        [-(2 * lam + ccf), mu, mu, 0.0],
        [lam, -(lam + mu), 0.0, mu],
        [lam, 0.0, -(lam + mu), mu],
        [ccf, lam, lam, -2 * mu],
    ])
    init = np.zeros(4)
    init[0] = 1.0
    return MarkovModel(("S0", "S1", "S2", "S3"), gen, (0, 1, 2), init)


def wind_transition_probs(w: WeibullParams, curve: TurbinePowerCurve) -> WindTransitionProbs:
    below_i = w.cdf(curve.cut_in)
    below_r = w.cdf(curve.rated_speed)
    below_o = w.cdf(curve.cut_out)
    return WindTransitionProbs(
        p06=below_i, p60=w.sf(curve.cut_in),
        p30=below_r, p03=w.sf(curve.rated_speed),
        p63=below_o, p36=w.sf(curve.cut_out),
    )


def build_wt_model(rates: UnitRates, probs: WindTransitionProbs) -> MarkovModel:
    """Two wind turbines in parallel across wind-speed regions (7 states).

    S0 two healthy/partial-load wind, S3 two healthy/rated wind,
    S1, S2 one healthy/partial, S4, S5 one healthy/rated, S6 failed.
    """
    lam, mu = rates.failure_rate, rates.repair_rate
    p = probs
    a = -(p.p03 + 2 * lam + p.p06)
    b = -(lam + mu + p.p16 + p.p14)
    c = -(lam + mu + p.p26 + p.p25)
    d = -(p.p30 + 2 * lam + p.p36)
    e = -(mu + lam + p.p46 + p.p41)
    f = -(mu + lam + p.p52 + p.p56)
    g = -(p.p60 + 4 * mu + p.p61 + p.p62 + p.p63 + p.p64 + p.p65)
    gen = np.array([
        [a, mu, mu, p.p30, 0.0, 0.0, p.p60],
        [lam, b, 0.0, 0.0, p.p41, 0.0, mu + p.p61],
        [lam, 0.0, c, 0.0, 0.0, p.p52, mu + p.p62],
        [p.p03, 0.0, 0.0, d, mu, mu, p.p63],
        [0.0, p.p14, 0.0, lam, e, 0.0, mu + p.p64],
        [0.0, 0.0, p.p25, lam, 0.0, f, mu + p.p65],
        [p.p06, lam + p.p16, lam + p.p26, p.p36, lam + p.p46, lam + p.p56, g],
    ])
    init = np.zeros(7)
    init[0] = 1.0
    labels = tuple(f"S{i}" for i in range(7))
    return MarkovModel(labels, gen, (0, 1, 2, 3, 4, 5), init)


def parallel_combine(a: TimeSeries, b: TimeSeries) -> TimeSeries:
    """Availability or reliability of two independent systems in parallel."""
    if len(a.times) != len(b.times) or not np.array_equal(a.times, b.times):
        raise InvalidInputError("time grids of the two series differ")
    va, vb = np.asarray(a.values), np.asarray(b.values)
    combined = 1.0 - (1.0 - va) * (1.0 - vb)
    # the exact value never falls below either input; keep that under rounding
    return TimeSeries(a.times, np.maximum(combined, np.maximum(va, vb)))


def threshold_wind_speed(curve: TurbinePowerCurve, min_fraction: float) -> float:
    """Smallest speed in [V_i, V_r] at which output reaches ``min_fraction`` of rated."""
    if not 0 < min_fraction <= 1:
        raise InvalidInputError(f"min_fraction must lie in (0, 1], got {min_fraction}")
    vi, vr = curve.cut_in, curve.rated_speed
    a, b, c = power_curve_coeffs(curve)
    a -= min_fraction
    if abs(c) < 1e-15:
        roots = [-a / b] if b != 0 else []
    else:
        disc = b * b - 4 * c * a
        if disc < 0:
            roots = []
        else:
            sq = math.sqrt(disc)
            # numerically stable pair
            qq = -0.5 * (b + math.copysign(sq, b))
            roots = [qq / c]
            if qq != 0:
                roots.append(a / qq)
    span = vr - vi
    inside = [min(max(r, vi), vr) for r in roots if vi - 1e-9 * span <= r <= vr + 1e-9 * span]
    if not inside:
        # quadratic never reaches the target before rated speed; rated output does
        return vr
    return min(inside)


@dataclass(frozen=True)
class MinOutputComparison:
    threshold_speed: float
    min_fraction: float
    probs: WindTransitionProbs
    dg_availability: TimeSeries
    dg_reliability: TimeSeries
    wt_availability: TimeSeries
    wt_reliability: TimeSeries
    wind_diesel_availability: TimeSeries
    wind_diesel_reliability: TimeSeries
    warnings: tuple[str, ...] = ()


def system_curves(m: MarkovModel, t_end: float, times=None, n_points: int = 1001,
                  rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL
                  ) -> tuple[TimeSeries, TimeSeries]:
    """Availability and reliability of ``m`` on a shared time grid."""
    traj = integrate(m, t_end, times, n_points, rtol, atol)
    avail = availability_curve(traj, m.success_states)
    rel = reliability_curve(m, t_end, traj.times, rtol=rtol, atol=atol)
    return avail, rel


def min_output_scenario(wf_capacity: float, min_mw: float, curve: TurbinePowerCurve,
                        weibull: WeibullParams, wt_rates: UnitRates, dg_rates: DieselRates,
                        t_end: float = 100.0, times=None, n_points: int = 1001,
                        n_trains: int = 2) -> MinOutputComparison:
    """Wind-diesel vs diesel-only when each wind train must deliver ``min_mw``.

    The farm is split into ``n_trains`` equal trains (the 7-state model is
    written for two). A train counts as available only above the wind speed
    at which it produces ``min_mw``; that speed replaces the cut-in speed in
    the Weibull region probabilities.
    """
    if wf_capacity <= 0:
        raise InvalidInputError("wind farm capacity must be positive")
    if not 0 <= min_mw <= wf_capacity:
        raise InvalidInputError(f"min_mw must lie in [0, {wf_capacity}], got {min_mw}")
    if n_trains != 2:
        raise InvalidInputError("the wind-turbine Markov model covers exactly two trains")
    notes = []
    train = wf_capacity / n_trains
    fraction = min_mw / train
    if fraction > 1:
        notes.append(
            f"minimum output {min_mw} MW exceeds one train ({train} MW); threshold set to rated speed"
        )
        fraction = 1.0
    speed = curve.cut_in if fraction == 0 else threshold_wind_speed(curve, fraction)
    if speed >= curve.rated_speed:
        # cut-in must stay below rated speed for a valid curve; nudge down
        constrained = curve.with_cut_in(curve.rated_speed * (1 - 1e-12))
    else:
        constrained = curve.with_cut_in(speed)
    probs = wind_transition_probs(weibull, constrained)

    dg_av, dg_rel = system_curves(build_dg_model(dg_rates), t_end, times, n_points)
    wt_av, wt_rel = system_curves(build_wt_model(wt_rates, probs), t_end, dg_av.times)
    return MinOutputComparison(
        threshold_speed=speed, min_fraction=fraction, probs=probs,
        dg_availability=dg_av, dg_reliability=dg_rel,
        wt_availability=wt_av, wt_reliability=wt_rel,
        wind_diesel_availability=parallel_combine(dg_av, wt_av),
        wind_diesel_reliability=parallel_combine(dg_rel, wt_rel),
        warnings=tuple(notes),
    )


# -- dumps -----------------------------------------------------------------

def write_model_csv(m: MarkovModel, fh: IO[str]) -> None:
    """Generator matrix with state labels; a final column flags success states."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["to\\from", *m.state_labels, "success"])
    for i, label in enumerate(m.state_labels):
        w.writerow([label, *(float(x) for x in m.generator[i]), int(i in m.success_states)])
