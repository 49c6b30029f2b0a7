import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.optimize import brentq

from windnpp import markov
from windnpp.errors import (
    GeneratorError,
    InvalidInputError,
    MultipleRecurrentClassError,
    StiffnessError,
)
from windnpp.markov import (
    DieselRates,
    MarkovModel,
    TimeSeries,
    UnitRates,
    WindTransitionProbs,
    availability_curve,
    build_dg_model,
    build_two_state_model,
    build_wt_model,
    check_generator,
    integrate,
    min_output_scenario,
    parallel_combine,
    reliability_curve,
    steady_state,
    system_curves,
    threshold_wind_speed,
    unavailability_curve,
    validate_generator,
    wind_transition_probs,
    write_model_csv,
)
from windnpp.presets import DG_RATES, EL_DABAA_WEIBULL, WT_EPS_CURVE, WT_RATES
from windnpp.wind import TurbinePowerCurve, WeibullParams, power_fraction

LAM, MU = 5.2e-3, 0.05


def random_generator(rng, n, density=0.7):
    off = rng.uniform(0.001, 0.5, size=(n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(off, 0.0)
    # keep every state connected to the next so the chain is irreducible
    for j in range(n):
        off[(j + 1) % n, j] = max(off[(j + 1) % n, j], 0.01)
    return off - np.diag(off.sum(axis=0))


@st.composite
def probs(draw):
    a, b, c = (draw(st.floats(0, 1)) for _ in range(3))
    return WindTransitionProbs(a, 1 - a, b, 1 - b, c, 1 - c)


class TestGeneratorValidation:
    def test_dg_model_ok(self):
        assert validate_generator(build_dg_model(DG_RATES)).ok

    def test_wt_model_ok(self):
        p = wind_transition_probs(EL_DABAA_WEIBULL, WT_EPS_CURVE)
        assert validate_generator(build_wt_model(WT_RATES, p)).ok

    def test_negated_entry_named(self):
        gen = build_dg_model(DG_RATES).generator.copy()
        gen[1, 0] = -gen[1, 0]
        m = MarkovModel(("S0", "S1", "S2", "S3"), gen, (0, 1, 2), [1, 0, 0, 0])
        report = validate_generator(m)
        assert not report.ok
        assert (1, 0, pytest.approx(-LAM)) in report.negative_offdiagonal
        assert 0 in report.bad_columns
        with pytest.raises(GeneratorError):
            check_generator(m)

    def test_bad_initial_distribution(self):
        m = MarkovModel(("a", "b"), [[-1, 1], [1, -1]], (0,), [0.7, 0.7])
        assert not validate_generator(m).ok

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            MarkovModel(("a", "b"), np.zeros((3, 3)), (0,), [1, 0])

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.1))
    def test_dg_columns_sum_to_zero(self, lam, mu, ccf):
        gen = build_dg_model(DieselRates(lam, mu, ccf)).generator
        assert np.all(np.abs(gen.sum(axis=0)) <= 1e-12)
        assert np.all(gen - np.diag(np.diag(gen)) >= 0)

    @given(st.floats(0, 1), st.floats(0, 1), probs())
    def test_wt_columns_sum_to_zero(self, lam, mu, p):
        gen = build_wt_model(UnitRates(lam, mu), p).generator
        assert np.all(np.abs(gen.sum(axis=0)) <= 1e-12)
        assert np.all(gen - np.diag(np.diag(gen)) >= 0)


class TestTwoStateOracle:
    def test_availability_closed_form(self):
        m = build_two_state_model(UnitRates(LAM, MU))
        traj = integrate(m, 1000.0)
        t = traj.times
        exact = MU / (LAM + MU) + LAM / (LAM + MU) * np.exp(-(LAM + MU) * t)
        assert np.max(np.abs(availability_curve(traj, m.success_states).values - exact)) < 1e-6

    def test_reliability_closed_form(self):
        m = build_two_state_model(UnitRates(LAM, MU))
        rel = reliability_curve(m, 1000.0)
        assert np.max(np.abs(rel.values - np.exp(-LAM * rel.times))) < 1e-6

    def test_steady_state_closed_form(self):
        pi = steady_state(build_two_state_model(UnitRates(LAM, MU)))
        assert pi == pytest.approx([MU / (LAM + MU), LAM / (LAM + MU)], abs=1e-12)
        assert pi[0] == pytest.approx(0.9058, abs=1e-4)


class TestIntegration:
    def test_no_failure_stays_put(self):
        m = build_dg_model(DieselRates(0, 0.05, 0))
        traj = integrate(m, 500.0, n_points=51)
        assert np.allclose(traj.distributions[:, 0], 1.0, atol=1e-12)
        assert np.allclose(reliability_curve(m, 500.0, n_points=51).values, 1.0, atol=1e-12)

    def test_dg_matches_matrix_exponential(self):
        m = build_dg_model(DG_RATES)
        times = [0.0, 1.0, 10.0, 100.0, 1000.0]
        traj = integrate(m, 1000.0, times=times)
        for t, p in zip(times, traj.distributions):
            assert p == pytest.approx(expm(m.generator * t) @ m.initial_distribution, abs=1e-8)

    def test_reliability_matches_reduced_exponential(self):
        m = build_dg_model(DG_RATES)
        red = m.reduced()
        rel = reliability_curve(m, 200.0, times=[0.0, 50.0, 200.0])
        expected = [float((expm(red.generator * t) @ red.initial_distribution).sum())
                    for t in (0.0, 50.0, 200.0)]
        assert rel.values == pytest.approx(expected, abs=1e-8)

    def test_long_horizon_reaches_steady_state(self):
        m = build_dg_model(DG_RATES)
        traj = integrate(m, 5000.0, n_points=11)
        assert traj.distributions[-1] == pytest.approx(steady_state(m), abs=1e-6)

    def test_availability_complement(self):
        m = build_dg_model(DG_RATES)
        traj = integrate(m, 100.0, n_points=101)
        a = availability_curve(traj, m.success_states).values
        u = unavailability_curve(traj, m.failure_states).values
        assert np.max(np.abs(a + u - 1)) < 1e-8

    def test_all_success_is_one(self):
        m = build_two_state_model(UnitRates(LAM, MU))
        traj = integrate(m, 100.0, n_points=11)
        assert np.allclose(availability_curve(traj, [0, 1]).values, 1.0)

    def test_empty_success_set(self):
        m = build_two_state_model(UnitRates(LAM, MU))
        with pytest.raises(InvalidInputError):
            availability_curve(integrate(m, 1.0, n_points=3), [])

    def test_invalid_generator_not_integrated(self):
        m = MarkovModel(("a", "b"), [[-1, 0.5], [0.3, -0.5]], (0,), [1, 0])
        with pytest.raises(GeneratorError):
            integrate(m, 1.0)

    def test_stiffness_error_reports_diagonal(self, monkeypatch):
        class Failed:
            status, message = -1, "Required step size is less than spacing between numbers."

        monkeypatch.setattr(markov, "solve_ivp", lambda *a, **k: Failed())
        with pytest.raises(StiffnessError, match="largest diagonal magnitude"):
            integrate(build_dg_model(DG_RATES), 10.0)

    def test_bad_time_grid(self):
        with pytest.raises(InvalidInputError):
            integrate(build_dg_model(DG_RATES), 10.0, times=[1.0, 2.0])
        with pytest.raises(InvalidInputError):
            integrate(build_dg_model(DG_RATES), -1.0)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 5))
    def test_random_models_reliability_bounded_by_availability(self, seed, n):
        rng = np.random.default_rng(seed)
        gen = random_generator(rng, n)
        k = int(rng.integers(1, n))
        init = np.zeros(n)
        init[0] = 1.0
        m = MarkovModel(tuple(map(str, range(n))), gen, tuple(range(k)), init)
        avail, rel = system_curves(m, 50.0, n_points=101)
        assert np.all(rel.values <= avail.values + 1e-9)
        assert np.all(np.diff(rel.values) <= 0)
        assert np.all((rel.values >= 0) & (rel.values <= 1))
        traj = integrate(m, 50.0, n_points=11)
        assert np.max(np.abs(traj.distributions.sum(axis=1) - 1)) < 1e-8


    def test_reliability_decayed_to_noise_floor(self):
        # under the 20 MW minimum the pair leaves its success set within hours
        probs = min_output_scenario(100, 20, WT_EPS_CURVE, EL_DABAA_WEIBULL, WT_RATES, DG_RATES,
                                    t_end=1.0, n_points=2).probs
        m = build_wt_model(WT_RATES, probs)
        rel = reliability_curve(m, 1000.0)
        assert np.all(np.diff(rel.values) <= 0)
        assert rel.values.min() >= 0
        assert rel.values[-1] < 1e-9


class TestSteadyState:
    def test_symmetric_ring(self):
        gen = np.array([[-2, 1, 1], [1, -2, 1], [1, 1, -2]], dtype=float)
        pi = steady_state(MarkovModel(("a", "b", "c"), gen, (0,), [1, 0, 0]))
        assert pi == pytest.approx([1 / 3] * 3, abs=1e-12)

    def test_multiple_recurrent_classes(self):
        gen = np.zeros((3, 3))
        gen[1, 0], gen[0, 0] = 1.0, -1.0
        with pytest.raises(MultipleRecurrentClassError):
            steady_state(MarkovModel(("a", "b", "c"), gen, (0,), [1, 0, 0]))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 7))
    def test_null_space(self, seed, n):
        gen = random_generator(np.random.default_rng(seed), n)
        pi = steady_state(MarkovModel(tuple(map(str, range(n))), gen, (0,), np.eye(n)[0]))
        assert np.max(np.abs(gen @ pi)) < 1e-10
        assert pi.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(pi >= -1e-12)


class TestModels:
    def test_dg_common_cause_entry(self):
        m = build_dg_model(DG_RATES)
        assert m.generator[3, 0] == 2.59e-4
        assert m.success_states == (0, 1, 2)
        assert list(m.initial_distribution) == [1, 0, 0, 0]

    def test_dg_no_common_cause(self):
        assert build_dg_model(DieselRates(LAM, MU, 0)).generator[3, 0] == 0

    def test_wind_probs(self):
        p = wind_transition_probs(EL_DABAA_WEIBULL, WT_EPS_CURVE)
        assert p.p06 == pytest.approx(9.35e-4, abs=1e-5)
        assert p.p06 + p.p60 == pytest.approx(1.0, abs=1e-15)
        assert p.p30 + p.p03 == pytest.approx(1.0, abs=1e-15)
        assert p.p63 + p.p36 == pytest.approx(1.0, abs=1e-15)

    def test_wind_probs_small_cut_in(self):
        curve = TurbinePowerCurve(1e-6, 12, 25, 2)
        assert wind_transition_probs(WeibullParams(2.0, 7.0), curve).p06 < 1e-10

    def test_wt_layout(self):
        p = wind_transition_probs(EL_DABAA_WEIBULL, WT_EPS_CURVE)
        m = build_wt_model(WT_RATES, p)
        lam, mu = WT_RATES.failure_rate, WT_RATES.repair_rate
        g = m.generator
        assert g[6, 0] == p.p06
        assert g[0, 6] == p.p60
        assert g[6, 6] == pytest.approx(-(p.p60 + 4 * mu + 2 * p.p60 + 3 * p.p63))
        assert g[1, 0] == lam and g[0, 1] == mu
        assert m.success_states == (0, 1, 2, 3, 4, 5)
        assert m.failure_states == (6,)

    def test_wt_reduced_is_leading_block(self):
        p = wind_transition_probs(EL_DABAA_WEIBULL, WT_EPS_CURVE)
        m = build_wt_model(WT_RATES, p)
        red = m.reduced()
        assert red.generator.shape == (6, 6)
        assert np.array_equal(red.generator, m.generator[:6, :6])

    def test_model_dump(self):
        buf = io.StringIO()
        write_model_csv(build_dg_model(DG_RATES), buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "to\\from,S0,S1,S2,S3,success"
        assert lines[4].startswith("S3,0.000259,")
        assert lines[4].endswith(",0")


class TestParallel:
    def test_perfect_component(self):
        t = np.arange(3.0)
        out = parallel_combine(TimeSeries(t, np.ones(3)), TimeSeries(t, np.array([0.1, 0.5, 0.9])))
        assert np.all(out.values == 1.0)

    def test_arithmetic(self):
        t = np.zeros(1)
        assert parallel_combine(TimeSeries(t, [0.9]), TimeSeries(t, [0.9])).values[0] == pytest.approx(0.99)

    def test_grid_mismatch(self):
        with pytest.raises(InvalidInputError):
            parallel_combine(TimeSeries(np.arange(3.0), np.ones(3)),
                             TimeSeries(np.arange(4.0), np.ones(4)))

    @given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=20))
    def test_expansion_and_bound(self, pairs):
        a, b = np.array(pairs).T
        t = np.arange(len(a), dtype=float)
        out = parallel_combine(TimeSeries(t, a), TimeSeries(t, b)).values
        assert np.max(np.abs(out - (a + b - a * b))) <= 1e-15
        assert np.all(out >= np.maximum(a, b))

    def test_zero_partner_is_identity(self):
        t = np.arange(4.0)
        a = np.array([0.3524934297216302, 0.1, 0.7, 1e-17])
        assert np.array_equal(parallel_combine(TimeSeries(t, a), TimeSeries(t, np.zeros(4))).values, a)


class TestThreshold:
    def test_twenty_percent(self):
        curve = TurbinePowerCurve(3, 12, 25, 2)
        oracle = brentq(lambda v: power_fraction(v, curve) - 0.2, 3.0, 11.999, xtol=1e-14)
        assert threshold_wind_speed(curve, 0.2) == pytest.approx(oracle, abs=1e-6)
        assert threshold_wind_speed(curve, 0.2) == pytest.approx(7.08, abs=0.05)

    def test_full_output(self):
        assert threshold_wind_speed(TurbinePowerCurve(4, 13, 25, 2), 1.0) == pytest.approx(13.0)

    def test_tiny_fraction(self):
        assert threshold_wind_speed(TurbinePowerCurve(4, 13, 25, 2), 1e-12) == pytest.approx(4.0, abs=1e-6)

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            threshold_wind_speed(WT_EPS_CURVE, 1.5)
        with pytest.raises(InvalidInputError):
            threshold_wind_speed(WT_EPS_CURVE, 0.0)

    @given(st.floats(1, 6), st.floats(2, 12), st.floats(0.01, 0.99))
    def test_root_oracle(self, vi, span, frac):
        curve = TurbinePowerCurve(vi, vi + span, vi + span + 10, 2)
        v = threshold_wind_speed(curve, frac)
        oracle = brentq(lambda x: power_fraction(x, curve) - frac, vi, vi + span - 1e-12,
                        xtol=1e-13)
        assert v == pytest.approx(oracle, abs=1e-6)


class TestMinOutput:
    def test_zero_minimum_matches_unconstrained(self):
        cmp = min_output_scenario(100, 0, WT_EPS_CURVE, EL_DABAA_WEIBULL, WT_RATES, DG_RATES,
                                  t_end=24, n_points=25)
        p = wind_transition_probs(EL_DABAA_WEIBULL, WT_EPS_CURVE)
        assert cmp.threshold_speed == WT_EPS_CURVE.cut_in
        av, rel = system_curves(build_wt_model(WT_RATES, p), 24, n_points=25)
        assert np.array_equal(cmp.wt_availability.values, av.values)
        assert np.array_equal(cmp.wt_reliability.values, rel.values)

    def test_full_capacity_minimum_is_rated(self):
        cmp = min_output_scenario(100, 100, WT_EPS_CURVE, EL_DABAA_WEIBULL, WT_RATES, DG_RATES,
                                  t_end=10, n_points=11)
        assert cmp.threshold_speed == pytest.approx(WT_EPS_CURVE.rated_speed)
        assert cmp.warnings

    def test_per_train_fraction(self):
        cmp = min_output_scenario(100, 20, WT_EPS_CURVE, EL_DABAA_WEIBULL, WT_RATES, DG_RATES,
                                  t_end=10, n_points=11)
        assert cmp.min_fraction == pytest.approx(0.4)
        assert cmp.threshold_speed == pytest.approx(threshold_wind_speed(WT_EPS_CURVE, 0.4))
        assert cmp.threshold_speed == pytest.approx(8.7, abs=0.05)

    def test_invalid_minimum(self):
        with pytest.raises(InvalidInputError):
            min_output_scenario(100, 120, WT_EPS_CURVE, EL_DABAA_WEIBULL, WT_RATES, DG_RATES)
