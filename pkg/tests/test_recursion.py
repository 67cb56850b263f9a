import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from oracles import bisection_H, v2_by_enumeration
from quickest_selection import BetaThresholdTable, SolverConfig, build_tables
from quickest_selection.errors import DomainError
from quickest_selection.recursion import (
    G_value,
    delta_via_ghat,
    exact_variance_step,
    foc_residual,
    g_value,
    ghat_value,
    scaled_variance_step,
    solve_H,
)

EPS = np.finfo(float).eps


# g_value -------------------------------------------------------------------

def test_g_without_history_is_reciprocal():
    assert g_value(0.0, 0.5) == 2.0


def test_g_direct_substitution():
    assert g_value(1.0, 0.5) == pytest.approx(2.0 + 2.0 * math.log(2.0), rel=1e-15)


@pytest.mark.parametrize("t", [0.0, 1.0, -0.1, 1.5])
def test_g_rejects_threshold_outside_open_unit(t):
    with pytest.raises(DomainError):
        g_value(1.0, t)


def test_g_rejects_negative_x():
    with pytest.raises(DomainError):
        g_value(-1.0, 0.5)


def test_g_small_threshold_keeps_relative_accuracy():
    # near t = 0 the naive log(1 - t) loses digits; compare with a series expansion
    t, x = 1e-9, 3.0
    series = (1.0 + x * (t + t * t / 2 + t**3 / 3)) / t
    assert g_value(x, t) == pytest.approx(series, rel=1e-15)


@given(x=st.floats(0.0, 1e8), t=st.floats(1e-6, 1 - 1e-6))
def test_ghat_is_g_minus_x(x, t):
    assert ghat_value(x, t) == pytest.approx(g_value(x, t) - x, rel=1e-9, abs=1e-9 * x)


# solve_H -------------------------------------------------------------------

def test_solve_H_at_one_matches_bisection_oracle():
    t = solve_H(1.0)
    assert t == pytest.approx(0.6822, abs=5e-5)
    assert abs(t - bisection_H(1.0)) <= 1e-10


@pytest.mark.parametrize("x", [1.0, 10.0, 100.0, 1e4])
def test_solve_H_below_sqrt_two_over_x(x):
    assert solve_H(x) <= math.sqrt(2.0 / x)


@pytest.mark.parametrize("x", [1.0, 2.5, 10.0, 100.0, 1e4, 1e7])
def test_solve_H_matches_oracle(x):
    assert solve_H(x) == pytest.approx(bisection_H(x), rel=1e-10)


def test_solve_H_large_x_asymptotic():
    t = solve_H(1e4)
    assert abs(t / math.sqrt(2e-4) - 1.0) <= 0.02
    assert abs(bisection_H(1e4) / math.sqrt(2e-4) - 1.0) <= 0.02


@pytest.mark.parametrize("x", [0.5, 0.0, float("nan")])
def test_solve_H_domain(x):
    with pytest.raises(DomainError):
        solve_H(x)


@settings(max_examples=300)
@given(x=st.floats(1.0, 1e9))
def test_solve_H_root_properties(x):
    t = solve_H(x)
    assert 0.0 < t < 1.0
    assert t <= math.sqrt(2.0 / x)
    # residual within the tolerance-propagated allowance
    assert abs(foc_residual(t, x)) <= 10 * 1e-12 * t / (1 - t) ** 2 + 8 * EPS / x


@given(x=st.floats(1.0, 1e6), y=st.floats(1.0, 1e6))
def test_solve_H_decreasing_in_x(x, y):
    lo, hi = sorted((x, y))
    assert solve_H(hi) <= solve_H(lo)


@pytest.mark.parametrize("kwargs", [{"root_tol": 0.0}, {"root_tol": 1e-6}, {"root_tol": 1e-3}, {"max_iter": 63}])
def test_solver_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_looser_solver_config_still_close():
    cfg = SolverConfig(root_tol=1e-8, max_iter=64)
    assert solve_H(50.0, cfg) == pytest.approx(bisection_H(50.0), abs=1e-8)


# G_value -------------------------------------------------------------------

def test_G_at_one_is_beta2_range():
    assert 3.14 < G_value(1.0) < 3.15
    assert 3.14 < g_value(1.0, solve_H(1.0)) < 3.15


@pytest.mark.parametrize("x", [1.0, 5.0, 50.0])
def test_G_minimal_over_grid(x):
    G = G_value(x)
    for t in np.linspace(1e-4, 1 - 1e-4, 2001):
        assert G <= g_value(x, float(t)) * (1 + 4 * EPS)


@pytest.mark.parametrize("x", [1.0, 7.3, 1e3, 1e6])
def test_G_minimal_over_random_thresholds(x):
    rng = np.random.default_rng(2024)
    G = G_value(x)
    ts = rng.uniform(0.0, 1.0, 1000)
    ts = ts[(ts > 0) & (ts < 1)]
    assert all(G <= g_value(x, float(t)) * (1 + 4 * EPS) for t in ts)


@given(x=st.floats(1.0, 1e8), t=st.floats(1e-9, 1 - 1e-9))
def test_G_minimal_property(x, t):
    assert G_value(x) <= g_value(x, t) * (1 + 4 * EPS)


@pytest.mark.parametrize("x", [1.0, 3.0, 100.0, 1e5])
def test_G_matches_scalar_minimizer(x):
    # bounded Brent on g itself, independent of the first-order condition
    res = minimize_scalar(lambda t: g_value(x, t), bounds=(1e-12, 1 - 1e-12), method="bounded", options={"xatol": 1e-13})
    assert G_value(x) == pytest.approx(res.fun, rel=1e-12)
    assert solve_H(x) == pytest.approx(res.x, rel=1e-4)


def test_G_large_x_asymptotic():
    assert abs(G_value(1e4) / (100.0 + 2**-0.5) ** 2 - 1.0) <= 0.01


# delta_via_ghat -------------------------------------------------------------

def test_delta_via_ghat_first_step():
    assert 2.14 < delta_via_ghat(1.0) < 2.15


@pytest.mark.parametrize("n", [1, 10, 100])
def test_delta_via_ghat_matches_table(table_small, n):
    assert delta_via_ghat(float(table_small.beta[n])) == pytest.approx(table_small.delta[n], rel=1e-9)


def test_delta_via_ghat_monotone(table_small):
    d = [delta_via_ghat(float(table_small.beta[n])) for n in range(1, 101)]
    assert all(a <= b for a, b in zip(d, d[1:]))


# variance step -------------------------------------------------------------

def test_variance_step_without_history_is_geometric():
    t = 0.3
    assert exact_variance_step(t, 0.0, 0.0) == pytest.approx(1 / t**2 - 1 / t, rel=1e-15)
    assert scaled_variance_step(t, 0.0, 0.0) == pytest.approx(1 / t**2 - 1 / t, rel=1e-15)


def test_v2_matches_enumeration_oracle():
    t2 = solve_H(1.0)
    assert exact_variance_step(t2, 1.0, 0.0) == pytest.approx(v2_by_enumeration(t2), rel=1e-12)


def test_scaled_step_closed_form_at_two():
    # the gamma + R * T form: the second selection's cost is rescaled, not resampled
    t = solve_H(1.0)
    closed = (1 / t**2 - 1 / t) + 1 / (1 - t) - (math.log(1 - t) / t) ** 2
    assert scaled_variance_step(t, 1.0, 0.0) == pytest.approx(closed, rel=1e-13)


@given(t=st.floats(1e-6, 0.999), m=st.floats(0.0, 1e6), v=st.floats(0.0, 1e12))
def test_exact_step_adds_gap_noise(t, m, v):
    exact = exact_variance_step(t, m, v)
    scaled = scaled_variance_step(t, m, v)
    assert exact >= scaled >= 0.0
    gap = 1 / (1 - t) + math.log1p(-t) / t  # E[R^2] - E[R]
    assert exact - scaled == pytest.approx(gap * m, rel=1e-6, abs=1e-9 * (1 + exact))


@pytest.mark.parametrize("t", [1e-6, 0.01, 0.2, 0.2499, 0.2501, 0.5, 0.9])
def test_variance_series_branch_continuity(t):
    # series and closed forms agree near the branch point and the series is accurate below it
    m, v = 10.0, 5.0
    er = -math.log1p(-t) / t
    direct = (1 - t) / t**2 + (v + m * m) / (1 - t) - (er * m) ** 2 + (1 / (1 - t) - er) * m
    assert exact_variance_step(t, m, v) == pytest.approx(direct, rel=1e-6)


def test_variance_step_at_threshold_one():
    assert exact_variance_step(1.0, 0.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        exact_variance_step(1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        exact_variance_step(0.0, 1.0, 0.0)


# build_tables --------------------------------------------------------------

def test_build_tables_one():
    tab = build_tables(1)
    assert tab.n_max == 1
    assert (tab.beta[1], tab.t[1], tab.v[1]) == (1.0, 1.0, 0.0)
    assert tab.row(1)["delta"] is None


def test_build_tables_two():
    tab = build_tables(2)
    assert 3.14 < tab.beta[2] < 3.15
    assert tab.t[2] == solve_H(1.0)
    assert tab.delta[1] == tab.beta[2] - 1.0


@pytest.mark.parametrize("n_max", [0, -3])
def test_build_tables_rejects_empty(n_max):
    with pytest.raises(ValueError):
        build_tables(n_max)


def test_bounds_up_to_100(table_small):
    for n in range(2, 101):
        assert 0.5 * n * n <= table_small.beta[n] <= 0.5 * n * n + n * math.log(n)


def test_table_invariants(table_small):
    b, t, v, d = table_small.beta[1:], table_small.t[1:], table_small.v[1:], table_small.delta[1:]
    assert np.all(np.diff(b) > 0)
    assert np.all(np.diff(d) >= 0)
    assert np.all((t[1:] > 0) & (t[1:] < 1))
    assert np.all(np.diff(t[1:]) < 0)
    assert np.all(v[1:] > 0) and np.all(np.diff(v[1:]) > 0)


def test_thresholds_are_H_of_previous_beta(table_small):
    for n in (1, 2, 17, 199):
        assert table_small.t[n + 1] == solve_H(float(table_small.beta[n]))
        assert table_small.beta[n + 1] == g_value(float(table_small.beta[n]), float(table_small.t[n + 1]))


def test_table_is_read_only(table_small):
    with pytest.raises(ValueError):
        table_small.beta[3] = 0.0
    with pytest.raises(AttributeError):
        table_small.n_max = 5


def test_table_rows(table_small):
    row = table_small.row(10)
    assert set(row) == {"n", "beta", "t", "v", "lower", "upper", "delta"}
    assert row["lower"] == 50.0 and row["upper"] == 50.0 + 10 * math.log(10)
    assert len(list(table_small.rows())) == 200
    with pytest.raises(IndexError):
        table_small.row(0)
    with pytest.raises(IndexError):
        table_small.row(201)


def test_from_arrays_roundtrip(table_small):
    again = BetaThresholdTable.from_arrays(table_small.beta, table_small.t, table_small.v)
    np.testing.assert_array_equal(again.delta[1:], table_small.delta[1:])
    assert again.n_max == table_small.n_max
    with pytest.raises(ValueError):
        BetaThresholdTable.from_arrays([np.nan, 1.0], [np.nan, 1.0], [np.nan])


def test_prefix_stability():
    # tables of different lengths agree on their common prefix
    a, b = build_tables(30), build_tables(60)
    np.testing.assert_array_equal(a.beta[1:], b.beta[1:31])
    np.testing.assert_array_equal(a.v[1:], b.v[1:31])
