import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from gsedetect import analysis as an

CD = {(4, 4): (2458, 234), (8, 8): (11050, 906), (16, 16): (46666, 3594)}

COST_ROWS = {
    (4, 4): (170, 10, 1144, 67, 2458, 144, 2692, 158),
    (8, 8): (650, 10, 5200, 67, 11050, 144, 11956, 158),
    (16, 16): (2570, 10, 22048, 67, 46666, 144, 50260, 158),
}
SUCCESS = {
    (4, 4): (0.999544, 0.106224, 0.952029, 0.046584, 0.993882),
    (8, 8): (0.999891, 0.089902, 0.801716, 0.173999, 0.953170),
    (16, 16): (0.999974, 0.088331, 0.393244, 0.341570, 0.555822),
}
OPTIMISTIC = {
    (4, 4): ("47/48", 0.991762, 0.999760, 0.274634),
    (8, 8): ("191/192", 0.997103, 0.999899, 0.089346),
    (16, 16): ("767/768", 0.999076, 0.999963, 0.024251),
}
BUDGET = {
    4: (192, 1934, 19355, 193559),
    8: (261, 2627, 26286, 262873),
    16: (330, 3320, 33217, 332187),
}
LAST_DIGIT = 1.5e-6


def naive_margin(c, d, s):
    # direct powers, no log-space tricks
    return -2 * c * s ** (2 * c + 2 * d) + 2 * c * s ** (2 * c + 2 * d - 1) + s ** (2 * d) - 1


def test_probability_definitions():
    c, d, s = 100, 20, 0.999
    assert an.p_g(c, s) == pytest.approx(s ** 200)
    assert an.p_e(c, d, s) == pytest.approx(s ** 200 * (1 - s ** 40))
    assert an.p_d(c, d, s) == pytest.approx(200 * (1 - s) * s ** 239)
    assert an.p_g_ed(c, d, s) == pytest.approx(
        (an.p_g(c, s) - an.p_e(c, d, s)) / (1 - an.p_d(c, d, s)))
    assert an.p_d(c, d, 1.0) == 0.0
    with pytest.raises(an.AnalysisError):
        an.p_g(10, 0.0)
    with pytest.raises(an.AnalysisError):
        an.p_g(10, 1.5)


@given(st.integers(1, 5000), st.integers(1, 5000), st.floats(0.99, 0.999999))
def test_margin_matches_naive_form(c, d, s):
    assert an.threshold_margin(c, d, s) == pytest.approx(naive_margin(c, d, s), abs=1e-9)


@pytest.mark.parametrize("size", list(CD))
def test_thresholds_match_brentq(size):
    c, d = CD[size]
    ours = an.improvement_threshold_s(c, d)
    ref = brentq(lambda s: naive_margin(c, d, s), 0.9, 1 - 1e-12, xtol=1e-14)
    assert ours == pytest.approx(ref, abs=1e-10)
    p_a = an.p_a_estimate(size[0])
    ref = brentq(lambda s: -p_a * s ** (2 * c) + s ** (2 * d) + p_a - 1, 0.9, 1 - 1e-12,
                 xtol=1e-14)
    assert an.arbitrary_error_threshold_s(c, d, p_a) == pytest.approx(ref, abs=1e-10)


def test_improvement_sign_around_threshold():
    c, d = CD[(4, 4)]
    s_star = an.improvement_threshold_s(c, d)
    for s in (s_star + 1e-5, 0.99999):
        assert an.p_g_ed(c, d, s) > an.p_g(c, s)
    assert an.p_g_ed(c, d, s_star - 1e-5) < an.p_g(c, s_star - 1e-5)


def test_target_condition_is_met_at_root():
    c, d = CD[(8, 8)]
    p_a = an.p_a_estimate(8)
    s = an.required_s_for_target(c, d, p_a, 0.95)

    def ratio(s):
        good = s ** (2 * c + 2 * d)
        return good / (good + (1 - s ** (2 * c)) * (1 - p_a))

    assert ratio(s) == pytest.approx(0.95, abs=1e-9)
    assert ratio(s + 1e-6) > 0.95 > ratio(s - 1e-6)


def test_boxed_variant_has_no_root():
    for c, d in CD.values():
        assert an.boxed_threshold_s(c, d) is None
        assert an.boxed_threshold_margin(c, d, 0.9999) < 0


def test_bisect_errors_and_endpoints():
    with pytest.raises(an.AnalysisError):
        an.bisect(lambda x: x * x + 1, -1, 1)
    assert an.bisect(lambda x: x, 0.0, 1.0) == 0.0
    assert an.bisect(lambda x: x - 0.25, 0, 1) == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(an.AnalysisError):
        an.improvement_threshold_s(0, 10)
    with pytest.raises(an.AnalysisError):
        an.required_s_for_target(10, 10, 0.9, 1.0)
    with pytest.raises(an.AnalysisError):
        an.arbitrary_error_threshold_s(10, 10, 1.5)


def test_p_a_estimate():
    assert an.p_a_fraction(4) == Fraction(47, 48)
    assert an.p_a_fraction(8) == Fraction(191, 192)
    assert an.p_a_fraction(16) == Fraction(767, 768)
    assert an.p_a_estimate(4) == pytest.approx(47 / 48)


@pytest.mark.parametrize("m", [4, 8, 16])
def test_second_round_budget(m):
    p_a = an.p_a_estimate(m)
    got = tuple(an.second_round_budget(p_a, s) for s in an.BUDGET_S)
    assert got == BUDGET[m]
    for s, db in zip(an.BUDGET_S, got):
        bound = math.log(1 - p_a) / (2 * math.log(s))
        assert db < bound <= db + 1
    with pytest.raises(an.AnalysisError):
        an.second_round_budget(p_a, 1.0)
    with pytest.raises(an.AnalysisError):
        an.second_round_budget(1.0, 0.99)


@pytest.mark.parametrize("size", list(COST_ROWS))
def test_cost_table_formula_columns(size):
    row = an.cost_table(*size, construct=False)
    keys = ("zero_state_gates", "zero_state_depth", "ansatz_gates", "ansatz_depth",
            "vqe_gates", "vqe_depth", "error_detected_gates", "error_detected_depth")
    assert tuple(row[k] for k in keys) == COST_ROWS[size]
    m, n = size
    assert row["error_detected_gates"] - row["vqe_gates"] == row["zero_state_gates"] + 4 * m * n
    assert row["vqe_gates"] == row["zero_state_gates"] + 2 * row["ansatz_gates"]


def test_ansatz_closed_forms_disagree():
    forms = an.ansatz_gates_closed_forms(4, 4)
    assert forms == {"sum_form": 952, "polynomial_form": 991, "per_term_form": 1144}
    assert an.n_ansatz_terms(4, 4) == 88 and an.n_loops(4, 4) == 17


def test_cost_table_constructed_columns():
    row = an.cost_table(4, 4, construct=True)
    assert row["zero_state_gates_built"] == 130
    assert row["zero_state_depth_built"] == 10
    assert row["ansatz_gates_built"] == 784
    assert row["bj_gates_built"] == 4 * 16
    with pytest.raises(an.AnalysisError):
        an.cost_table(3, 4)


def test_threshold_params_validation():
    p = an.ThresholdParams.for_lattice(4, 4)
    assert (p.c, p.d) == CD[(4, 4)]
    with pytest.raises(an.AnalysisError):
        an.ThresholdParams(-1, 2)
    with pytest.raises(an.AnalysisError):
        an.ThresholdParams(1, 2, s=0)
    with pytest.raises(an.AnalysisError):
        an.ThresholdParams(1, 2, p_a=2)


def test_threshold_table_values():
    for row in an.threshold_table():
        want = SUCCESS[(row["m"], row["n"])]
        got = (row["threshold_s"], row["threshold_p_g"], row["p_g"], row["p_d"], row["p_g_ed"])
        for g, w in zip(got, want):
            assert abs(g - w) < LAST_DIGIT, (row["m"], g, w)


def test_optimistic_table_values():
    for row in an.optimistic_table():
        frac, s_arb, s_req, pg = OPTIMISTIC[(row["m"], row["n"])]
        assert row["p_a"] == frac
        assert abs(row["threshold_s"] - s_arb) < LAST_DIGIT
        assert abs(row["target_s"] - s_req) < LAST_DIGIT
        assert abs(row["target_p_g"] - pg) < LAST_DIGIT


def test_budget_table_rows():
    rows = an.budget_table()
    assert len(rows) == 12
    assert [r["d"] for r in rows[::4]] == [234, 906, 3594]
    assert [r["d_b"] for r in rows] == [v for m in (4, 8, 16) for v in BUDGET[m]]
