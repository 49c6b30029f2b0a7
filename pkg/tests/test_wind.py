import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from windnpp.errors import InvalidInputError, ParseError, SingularCurveError
from windnpp.presets import EL_DABAA_WEIBULL, builtin_table
from windnpp.wind import (
    TurbinePowerCurve,
    WeibullParams,
    farm_power,
    ingest_wind_table,
    power_curve_coeffs,
    power_fraction,
    quadratic_fraction,
    shear_correct,
    weibull_prob_range,
)

SCENARIO_SETS = [(4, 10, 23), (4, 12, 25), (4, 13, 25), (3, 12, 25)]


@st.composite
def curves(draw):
    vi = draw(st.floats(0.5, 8.0))
    vr = vi + draw(st.floats(0.5, 12.0))
    vo = vr + draw(st.floats(0.5, 15.0))
    return TurbinePowerCurve(vi, vr, vo, draw(st.floats(0.1, 10.0)))


class TestShear:
    def test_reference_example(self):
        assert shear_correct(6.0, 24.5, 80, 0.1429) == pytest.approx(7.106, abs=1e-3)

    def test_identity_heights(self):
        assert shear_correct(5.0, 50, 50, 0.1429) == 5.0

    def test_zero_wind(self):
        assert shear_correct(0.0, 10, 80, 0.1429) == 0.0

    @pytest.mark.parametrize("h_ref,h_hub", [(0, 80), (24.5, 0), (-1, 80)])
    def test_non_positive_height(self, h_ref, h_hub):
        with pytest.raises(InvalidInputError):
            shear_correct(5.0, h_ref, h_hub)

    @given(st.floats(0, 40), st.floats(0, 40), st.floats(1, 200), st.floats(1, 200),
           st.floats(0, 1))
    def test_multiplicative_in_speed(self, v1, v2, h_ref, h_hub, alpha):
        lhs = shear_correct(v1 + v2, h_ref, h_hub, alpha)
        rhs = shear_correct(v1, h_ref, h_hub, alpha) + shear_correct(v2, h_ref, h_hub, alpha)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestPowerCurve:
    def test_coefficients_hand_values(self):
        a, b, c = power_curve_coeffs(TurbinePowerCurve(4, 10, 23, 2))
        assert a == pytest.approx(0.031111, abs=1e-6)
        assert b == pytest.approx(-0.077556, abs=1e-6)
        assert c == pytest.approx(0.017444, abs=1e-6)

    def test_singular_curve(self):
        with pytest.raises(SingularCurveError):
            TurbinePowerCurve(10, 10, 23, 2)

    @pytest.mark.parametrize("vi,vr,vo", [(5, 4, 20), (4, 10, 9), (0, 10, 20)])
    def test_invalid_ordering(self, vi, vr, vo):
        with pytest.raises(InvalidInputError):
            TurbinePowerCurve(vi, vr, vo, 2)

    def test_quadratic_branch_example(self):
        assert power_fraction(7.0, TurbinePowerCurve(4, 10, 23, 2)) == pytest.approx(0.343, abs=1e-3)

    def test_below_cut_in(self):
        assert power_fraction(3.0, TurbinePowerCurve(4, 10, 23, 2)) == 0.0

    def test_rated_branch(self):
        assert power_fraction(15.0, TurbinePowerCurve(4, 10, 23, 2)) == 1.0

    def test_boundaries(self):
        c = TurbinePowerCurve(4, 10, 23, 2)
        assert power_fraction(10.0, c) == 1.0
        assert power_fraction(23.0, c) == 0.0
        assert power_fraction(22.999, c) == 1.0

    def test_array_input(self):
        c = TurbinePowerCurve(4, 10, 23, 2)
        out = power_fraction(np.array([0.0, 7.0, 15.0, 30.0]), c)
        np.testing.assert_allclose(out, [0.0, 0.343, 1.0, 0.0], atol=1e-12)

    @pytest.mark.parametrize("vi,vr,vo", SCENARIO_SETS)
    def test_identities_scenario_sets(self, vi, vr, vo):
        c = TurbinePowerCurve(vi, vr, vo, 2)
        assert abs(power_fraction(vi, c)) < 1e-9
        assert abs(quadratic_fraction(vr, c) - 1.0) < 1e-9

    @given(curves())
    def test_identities_random_curves(self, c):
        a, b, cc = power_curve_coeffs(c)
        assert abs(a + b * c.cut_in + cc * c.cut_in ** 2) < 1e-9
        assert abs(a + b * c.rated_speed + cc * c.rated_speed ** 2 - 1.0) < 1e-9

    @given(curves(), st.floats(0, 60))
    def test_fraction_range_and_support(self, c, v):
        f = power_fraction(v, c)
        assert 0.0 <= f <= 1.0
        if v < c.cut_in or v >= c.cut_out:
            assert f == 0.0
        elif v >= c.rated_speed:
            assert f == 1.0

    def test_negative_speed(self):
        with pytest.raises(InvalidInputError):
            power_fraction(-1.0, TurbinePowerCurve(4, 10, 23, 2))


class TestFarmPower:
    def test_rated(self):
        assert farm_power(12.0, TurbinePowerCurve(4, 10, 23, 2), 100) == 200.0

    def test_below_cut_in(self):
        assert farm_power(2.0, TurbinePowerCurve(4, 10, 23, 2), 100) == 0.0

    def test_partial(self):
        assert farm_power(7.0, TurbinePowerCurve(4, 10, 23, 2), 250) == pytest.approx(171.5, abs=0.5)

    def test_zero_turbines(self):
        with pytest.raises(InvalidInputError):
            farm_power(7.0, TurbinePowerCurve(4, 10, 23, 2), 0)

    @given(curves(), st.floats(0, 40), st.integers(1, 500))
    def test_linear_in_count(self, c, v, n):
        assert farm_power(v, c, n) == n * c.rated_power * power_fraction(v, c)


class TestWeibull:
    def test_total_probability(self):
        assert weibull_prob_range(0, math.inf, WeibullParams(2.0, 7.0)) == 1.0

    def test_below_three(self):
        assert weibull_prob_range(0, 3, EL_DABAA_WEIBULL) == pytest.approx(9.35e-4, abs=1e-5)

    def test_above_twelve_vanishes(self):
        assert weibull_prob_range(12, math.inf, EL_DABAA_WEIBULL) < 1e-100

    def test_reversed_bounds(self):
        with pytest.raises(InvalidInputError):
            weibull_prob_range(5, 3, EL_DABAA_WEIBULL)

    @pytest.mark.parametrize("k,c,lo,hi", [(2.0, 7.0, 3.0, 12.0), (11.05, 5.64, 3.0, 6.0),
                                           (1.5, 9.0, 0.0, 25.0)])
    def test_matches_quadrature(self, k, c, lo, hi):
        w = WeibullParams(k, c)
        ref, _ = integrate.quad(w.pdf, lo, hi, epsabs=1e-13, epsrel=1e-12)
        assert weibull_prob_range(lo, hi, w) == pytest.approx(ref, abs=1e-10)

    @given(st.floats(0.5, 15), st.floats(1, 15), st.floats(0, 50))
    def test_split_sums_to_one(self, k, c, x):
        w = WeibullParams(k, c)
        assert abs(weibull_prob_range(0, x, w) + weibull_prob_range(x, math.inf, w) - 1) < 1e-12

    @pytest.mark.parametrize("k,c", [(0, 5), (2, 0), (-1, 5)])
    def test_invalid_params(self, k, c):
        with pytest.raises(InvalidInputError):
            WeibullParams(k, c)


def _table_csv(n_hours=24, mean=True, site=None):
    months = "Jan,Feb,Mar,Apr,May,Jun,Jul,Aug,Sep,Oct,Nov,Dec"
    head = ("site," if site else "") + "hour," + months + (",Mean" if mean else "")
    lines = [head]
    for h in range(n_hours):
        cells = [f"{h + m / 10:.1f}" for m in range(12)]
        row = ([site] if site else []) + [str(h)] + cells + (["1.0"] if mean else [])
        lines.append(",".join(row))
    if mean:
        lines.append(",".join(([site] if site else []) + ["Mean"] + ["0"] * 13))
    return "\n".join(lines) + "\n"


class TestIngest:
    def test_builtin_galala(self):
        assert builtin_table("el_galala").speed(1, 0) == 7.1

    def test_builtin_zafarana(self):
        assert builtin_table("zafarana").speed(6, 21) == 12.5

    def test_round_trip_layout(self):
        t = ingest_wind_table(_table_csv(), 24.5, site_name="x")
        assert t.values.shape == (12, 24)
        assert t.speed(3, 5) == pytest.approx(5.2)
        assert t.samples()[24] == t.speed(2, 0)

    def test_site_column(self):
        t = ingest_wind_table(io.StringIO(_table_csv(site="zaf", mean=False)), 10.0)
        assert t.speed(12, 23) == pytest.approx(24.1)

    def test_missing_hour_row(self):
        with pytest.raises(ParseError):
            ingest_wind_table(_table_csv(n_hours=23), 24.5)

    def test_non_numeric_cell_names_location(self):
        text = _table_csv().replace("\n5,5.0,", "\n5,abc,", 1)
        with pytest.raises(ParseError, match=r"row 7.*Jan"):
            ingest_wind_table(text, 24.5)

    def test_missing_cell(self):
        text = _table_csv(mean=False).replace("\n3,3.0,", "\n3,,", 1)
        with pytest.raises(ParseError, match="missing"):
            ingest_wind_table(text, 24.5)
