"""Printed voltage-quality results for the four reference scenarios (per-unit).

Values are kept as printed strings so the number of printed decimals is known.
"""

from decimal import Decimal

SCENARIOS = ("Scenario 1", "Scenario 2", "Scenario 3", "Scenario 4")

# attribute -> printed cell per scenario
PQ_TABLE = {
    "s60": ("0.655", "0.655", "2.01105", "2.01105"),
    "phi": ("10", "10", "0.41", "0.41"),
    "d_ss": ("0.00011", "0.00055", "0.00067", "0.00214"),
    "d_ss_farm": ("0.03788", "0.18176", "0.06743", "0.21360"),
    "c": ("5.2", "6.5", "2", "3"),
    "p_lt_continuous": ("0.003", "0.007", "0.004", "0.010"),
    "p_lt_continuous_farm": ("0.058", "0.120", "0.040", "0.100"),
    "k_u": ("1.05", "0.85", "0.3", "0.7"),
    "d_so": ("0.00063735", "0.0008599", "0.0006", "0.00233333"),
    "n120_cut_in": ("30", "30", "120", "120"),
    "k_f_cut_in": ("0.38", "0.34", "0.1", "0.1"),
    "p_lt_cut_in": ("0.005", "0.008", "0.007", "0.012"),
    "p_lt_cut_in_farm": ("1.764", "2.630", "0.706", "1.176"),
    "n120_rated": ("8", "8", "12", "12"),
    "k_f_rated": ("0.38", "0.34", "0.1", "0.1"),
    "p_lt_rated": ("0.004", "0.005", "0.003", "0.006"),
    "p_lt_rated_farm": ("1.171", "1.746", "0.346", "0.576"),
}

# quantities computed from the formulas (the rest echo datasheet inputs)
COMPUTED = ("s60", "phi", "d_ss", "d_ss_farm", "p_lt_continuous", "p_lt_continuous_farm",
            "d_so", "p_lt_cut_in", "p_lt_cut_in_farm", "p_lt_rated", "p_lt_rated_farm")


def cell_matches(computed: float, printed: str, rel: float = 0.01) -> bool:
    """Within ``rel`` of the printed value, or equal to it once rounded to its decimals."""
    ref = float(printed)
    if ref != 0 and abs(computed - ref) <= rel * abs(ref):
        return True
    exp = Decimal(printed).as_tuple().exponent
    rounded = Decimal(repr(computed)).quantize(Decimal(1).scaleb(exp))
    return rounded == Decimal(printed)
