import math

import numpy as np
import pytest

from viprox import problems as prb
from viprox import schedules as sch
from viprox import verify
from viprox.rng import Rng


# ---------------------------------------------------------------------------
# step-sum lemma oracles


def test_sqrt_step_sums_small_case():
    rep = verify.step_sum_bounds_sqrt(1.0, 5)
    # window t = 2..5: 1/3 + 1/4 + 1/5 + 1/6 and the matching sqrt terms
    assert rep["sum_sq"] == pytest.approx(1.0 / 3 + 1.0 / 4 + 1.0 / 5 + 1.0 / 6)
    assert rep["sum"] == pytest.approx(sum(1 / math.sqrt(t + 1) for t in range(2, 6)))
    assert rep["bound_sq"] == pytest.approx(math.log(6.0))
    assert rep["bound_sum"] == pytest.approx(math.sqrt(6.0) / 2)
    assert rep["sq_ok"] and rep["sum_ok"]


def test_sqrt_step_sums_T1():
    # window starts at floor(1/2) = 0: both terms included
    rep = verify.step_sum_bounds_sqrt(2.0, 1)
    assert rep["sum_sq"] == pytest.approx(4.0 * (1.0 + 0.5))
    assert rep["bound_sq"] == pytest.approx(4.0 * math.log(6.0))
    assert rep["sq_ok"] and rep["sum_ok"]


def test_sqrt_step_sums_homogeneous_in_c():
    a = verify.step_sum_bounds_sqrt(1.0, 17)
    b = verify.step_sum_bounds_sqrt(3.0, 17)
    assert b["sum_sq"] == pytest.approx(9.0 * a["sum_sq"])
    assert b["bound_sq"] == pytest.approx(9.0 * a["bound_sq"])
    assert b["sum"] == pytest.approx(3.0 * a["sum"])
    assert b["bound_sum"] == pytest.approx(3.0 * a["bound_sum"])


def test_sqrt_step_suite_clean_and_negative_control():
    rep = verify.sqrt_step_suite(draws=200, seed=0)
    assert rep["violations"] == 0
    broken = verify.sqrt_step_suite(draws=200, seed=0, log_const=2.0)
    assert broken["violations"] > 0


def test_power_sums_part_i_example():
    parts = verify.power_step_sum_bounds(2.0, 0.5, 0.0, 3)
    expected = 2.0 * (1 + 1 / math.sqrt(2) + 1 / math.sqrt(3) + 0.5)
    assert parts["i"]["sum"] == pytest.approx(expected)
    assert parts["i"]["bound"] == pytest.approx(2.0 * 4**0.5)
    assert parts["i"]["holds"]


def test_power_sums_part_iv_example():
    parts = verify.power_step_sum_bounds(1.0, 0.5, 0.0, 4)
    expected = sum(math.sqrt(t + 1) for t in range(5))
    assert parts["iv"]["sum"] == pytest.approx(expected)
    assert parts["iv"]["bound"] == pytest.approx(4**1.5 / 1.5)
    assert parts["iv"]["holds"]


def test_power_sums_part_v_equality_at_T0():
    parts = verify.power_step_sum_bounds(1.0, 0.25, 0.0, 0)
    assert parts["v"]["sum"] == pytest.approx(1.0)
    assert parts["v"]["bound"] == pytest.approx(1.0)
    assert parts["v"]["holds"]


def test_power_sums_regime_skips():
    parts = verify.power_step_sum_bounds(1.0, 0.7, 0.0, 10)
    assert "skipped" in parts["v"]  # needs a < 1/2
    assert "skipped" in parts["iii"]  # needs p > 0
    parts = verify.power_step_sum_bounds(1.0, 0.3, 0.5, 10)
    assert parts["iii"]["holds"]


def test_power_sums_log_branch():
    # a = (1-p)/2 hits the logarithmic branch of part (ii); the harmonic sum
    # needs its leading term on top of the integral
    parts = verify.power_step_sum_bounds(1.5, 0.25, 0.5, 50)
    assert parts["ii"]["bound"] == pytest.approx(1.5**4 * (1.0 + math.log(51.0)))
    assert parts["ii"]["holds"]
    harmonic = sum(1.0 / (t + 1) for t in range(51))
    assert parts["ii"]["sum"] == pytest.approx(1.5**4 * harmonic)


def test_power_sums_supercritical_branch():
    # a above the critical value: the sum converges and the bound covers it
    parts = verify.power_step_sum_bounds(1.0, 0.75, 0.0, 100_00)
    s = parts["ii"]["sum"]
    assert parts["ii"]["bound"] == pytest.approx(1.5 / 0.5)
    assert s <= parts["ii"]["bound"]
    assert s >= 1.0  # the t = 0 term alone


def test_power_step_suite_clean():
    rep = verify.power_step_suite(draws=200, seed=0)
    assert rep["violations"] == 0


# ---------------------------------------------------------------------------
# max-value lemma


def test_max_value_reference_point():
    # grid search of sqrt(d) - d over [0, 4] peaks at 0.25
    assert verify.max_value_lemma(1.0, 1.0, 0.5) == pytest.approx(0.25)
    assert verify.max_value_argmax(1.0, 1.0, 0.5) == pytest.approx(0.25)
    d = np.linspace(0.0, 4.0, 100001)
    grid_peak = (np.sqrt(d) - d).max()
    assert grid_peak <= 0.25 + 1e-9


def test_max_value_zero_q():
    assert verify.max_value_lemma(0.0, 2.0, 0.3) == 0.0


def test_max_value_range_errors():
    with pytest.raises(ValueError):
        verify.max_value_lemma(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        verify.max_value_lemma(1.0, 0.0, 0.5)


def test_max_value_suite_clean():
    rep = verify.max_value_suite(draws=100, seed=0)
    assert rep["violations"] == 0


# ---------------------------------------------------------------------------
# theorem constants


def test_constants_nu_zero_branches():
    tc = verify.TheoremConstants(alpha=1.0, nu=0.0, L_nu=1.0, M_nu=0.0, sigma=1.0, D=1.0)
    consts = verify.theorem_constants(tc)
    assert consts["D_hat"] == pytest.approx(5.5)  # (9 + 2) / 2
    tc2 = verify.TheoremConstants(alpha=1.0, nu=0.0, L_nu=1.0, M_nu=1.0, sigma=0.0, D=1.0)
    assert verify.theorem_constants(tc2)["D_bar"] == pytest.approx(2.0)  # (1+1)^2 / 2


def test_constants_vanish_without_sources():
    tc = verify.TheoremConstants(alpha=1.0, nu=0.5, L_nu=1e-300, M_nu=0.0, sigma=0.0, D=1.0)
    consts = verify.theorem_constants(tc)
    assert consts["D_hat"] <= 1e-12
    assert consts["D_bar"] <= 1e-12


def test_residual_constants_need_fractional_nu():
    tc = verify.TheoremConstants(nu=1.0, L_nu=1.0, D=1.0)
    assert verify.theorem_constants(tc)["C_hat"] is None
    with pytest.raises(ValueError):
        verify.c_hat(tc)
    with pytest.raises(ValueError):
        verify.c_tilde(tc)
    tc_frac = verify.TheoremConstants(nu=0.5, L_nu=2.0, D=1.0)
    assert verify.c_hat(tc_frac) > 0
    assert verify.c_tilde(tc_frac) > 0


# ---------------------------------------------------------------------------
# rate bounds


def _tc(D=4.0, d_hat_target=5.5):
    # nu = 0 with L0 = 1, M0 = 0 and sigma = 1 gives D_hat = 5.5 exactly
    return verify.TheoremConstants(alpha=1.0, nu=0.0, L_nu=1.0, M_nu=0.0, sigma=1.0, D=D)


def test_rate_bound_constant_horizon():
    bound = verify.rate_bound_stochastic(
        _tc(), sch.constant_horizon_schedule(1.0, 0.5),
        sch.AveragingScheme("uniform", "zero"), 399)
    assert bound == pytest.approx((2 * 4 + 5.5) / 20.0)  # 0.675


def test_rate_bound_inverse_weights_matches_half_exponent_form():
    bound = verify.rate_bound_stochastic(
        _tc(), sch.power_schedule(1.0, 0.5),
        sch.AveragingScheme("inverse_step", "zero"), 400)
    assert bound == pytest.approx(6 * 4 / 20.0 + 3 * 5.5 / 20.0)  # 2.025


def test_rate_bound_power_branches():
    tc = _tc()
    avg = sch.AveragingScheme("step", "zero")
    T = 999
    for a in (0.25, 0.5, 0.75):
        bound = verify.rate_bound_stochastic(tc, sch.power_schedule(1.0, a), avg, T)
        lead = 2 * tc.D / ((T + 1) ** (1 - a))
        if a < 0.5:
            tail = 5.5 * 2 ** (1 - 2 * a) / ((1 - 2 * a) * (T + 1) ** a)
        elif a == 0.5:
            tail = 5.5 * math.log(T + 2) / (T + 1) ** 0.5
        else:
            tail = 5.5 / ((2 * a - 1) * (T + 1) ** (1 - a))
        assert bound == pytest.approx(lead + tail)


def test_rate_bound_half_window():
    bound = verify.rate_bound_stochastic(
        _tc(), sch.power_schedule(1.0, 0.5), sch.AveragingScheme("step", "half"), 399)
    assert bound == pytest.approx((4 * 4 + 2 * 5.5 * math.log(6.0)) / 20.0)


def test_rate_bound_unmatched_config():
    with pytest.raises(ValueError):
        verify.rate_bound_stochastic(
            _tc(), sch.fixed_schedule(0.05), sch.AveragingScheme("uniform", "zero"), 100)
    with pytest.raises(ValueError):
        verify.rate_bound_stochastic(
            _tc(), sch.power_schedule(1.0, 0.5),
            sch.AveragingScheme("inverse_step", "half"), 100)


def test_residual_bound_reference_value():
    tc = verify.TheoremConstants(alpha=1.0, r=0.5, w5=2.0, nu=1.0, L_nu=10.0, D=0.0)
    bound = verify.residual_bound_lipschitz(tc, 1.0 / 30.0, 899, 0.5)
    assert bound == pytest.approx(4.0)


def test_residual_bound_monotone_in_T():
    tc = verify.TheoremConstants(alpha=1.0, r=0.5, w5=2.0, nu=1.0, L_nu=10.0, D=0.0)
    bounds = [verify.residual_bound_lipschitz(tc, 1.0 / 30.0, T, 0.5) for T in (10, 100, 1000)]
    assert bounds[0] > bounds[1] > bounds[2]
    assert verify.residual_bound_lipschitz(tc, 1.0 / 30.0, 10, 0.0) == 0.0


def test_residual_bound_rejects_large_gamma():
    tc = verify.TheoremConstants(alpha=1.0, r=0.5, w5=2.0, nu=1.0, L_nu=10.0, D=0.0)
    with pytest.raises(ValueError):
        verify.residual_bound_lipschitz(tc, 0.05, 100, 0.5)


def test_optimal_c():
    assert verify.optimal_c(4.0, 1.0, 1.0) == pytest.approx(2.0)
    assert verify.optimal_c(3.0, 3.0, 1.0) == pytest.approx(1.0)
    assert verify.optimal_c(8.0, 2.0, 1.0) == pytest.approx(2.0 * verify.optimal_c(2.0, 2.0, 1.0))
    with pytest.raises(ValueError):
        verify.optimal_c(0.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# exact gap oracle


def test_exact_gap_dominates_sampled_brute_force(game):
    rng = Rng(77)
    from viprox.geometry import sample_simplex_product

    Z = sample_simplex_product(rng, 2, 2, 50_000)
    FZ = game.map_batch(Z)
    offset = np.einsum("ij,ij->i", FZ, Z)
    for x in sample_simplex_product(rng, 2, 2, 10):
        brute = float((FZ @ x - offset).max())
        exact = verify.exact_matrix_game_gap(game, x)
        assert exact >= brute - 1e-10
        assert exact <= brute + 0.05  # brute force nearly saturates the sup


def test_exact_gap_nonnegative_on_domain(game):
    from viprox.geometry import sample_simplex_product

    for x in sample_simplex_product(Rng(78), 2, 2, 20):
        assert verify.exact_matrix_game_gap(game, x) >= 0.0


# ---------------------------------------------------------------------------
# suite aggregation


def test_run_suites_all_clean():
    report = verify.run_suites(seed=0)
    ids = {item["lemma_id"] for item in report}
    assert "step_sums_sqrt" in ids and "three_point_identity" in ids
    assert all(item["violations"] == 0 for item in report)
