"""Sensing design: radii, power windows, and the energy detector."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from tiernet.analytic import max_contention_density_cellular, shot_noise_c_f
from tiernet.linkmodel import SystemParams, linear_to_db, location_coeffs
from tiernet.sensing import (
    InfeasiblePlanError,
    blended_power_policy,
    detection_probability_ray,
    detection_probability_sc,
    false_alarm_probability,
    max_sensing_range,
    min_sensing_radius,
    noise_floor_dbm,
    pilot_snr,
    power_ratio_bounds,
    sensing_plan,
    solve_threshold,
)
from tiernet.simulator import ChannelDraw, ChannelMode, Drop, cellular_sir
from tiernet.specfun import reg_inc_beta

P = SystemParams()
LAMBDA_60 = 60.0 / (math.pi * P.r_c**2)


def test_min_sensing_radius_frozen():
    assert min_sensing_radius(1.0, P) == pytest.approx(161.810506715, abs=1e-6)


def test_min_sensing_radius_scales_with_macro_distance():
    # with alpha_c = alpha_fo the radius is linear in D
    assert min_sensing_radius(0.5, P) == pytest.approx(
        min_sensing_radius(1.0, P) / 2.0, rel=1e-12
    )


def test_one_interferer_at_sensing_radius_hits_outage_budget():
    """A single femtocell at exactly the minimum sensing radius from a
    cell-edge user drives that user's outage to eps."""
    d_sense = min_sensing_radius(1.0, P)
    drop = Drop(femto_positions=np.array([[P.r_c + d_sense, 0.0]]), seed=0)
    rng = np.random.default_rng(90125)
    n = 1_000_000
    draws = ChannelDraw(
        desired_power=rng.gamma(P.t_c - P.u_c + 1, 1.0, size=n),
        cross_tier_power=np.zeros(n),
        mark_powers=rng.gamma(P.u_f, 1.0, size=(n, 1)),
        mode=ChannelMode.FAST_CHI2,
    )
    sir = cellular_sir(1.0, drop, draws, P)
    outage = float(np.mean(sir < P.gamma_target))
    assert outage == pytest.approx(P.eps, abs=0.005)


def test_power_ratio_bounds_frozen_at_cell_edge():
    lo_db, hi_db = power_ratio_bounds(1.0, LAMBDA_60, P)
    assert lo_db == pytest.approx(37.7161749754, abs=1e-6)
    assert hi_db == pytest.approx(57.2650912002, abs=1e-6)


def test_power_ratio_gap_constant_in_distance():
    gaps = []
    for d_norm in (0.3, 0.5, 0.8, 1.0):
        lo_db, hi_db = power_ratio_bounds(d_norm, LAMBDA_60, P)
        gaps.append(hi_db - lo_db)
    assert max(gaps) - min(gaps) < 0.01
    assert gaps[0] == pytest.approx(19.5489162248, abs=1e-6)


def test_power_floor_inverts_cellular_density_cap():
    """Setting P_c/P_f to the window floor makes the cellular-side density
    cap exactly the design density."""
    for d_norm in (0.4, 1.0):
        lo_db, _ = power_ratio_bounds(d_norm, LAMBDA_60, P)
        p_lo = dataclasses.replace(P, p_c_dbm=P.p_f_dbm + lo_db)
        lam_back = max_contention_density_cellular(d_norm, p_lo)
        assert lam_back == pytest.approx(LAMBDA_60, rel=1e-9)


def test_power_ceiling_inverts_femto_cap_with_worst_case_correction():
    delta = 2.0 / P.alpha_fo
    k_max = (P.t_f - P.u_f + 1) ** delta * math.gamma(1.0 - delta)
    for d_norm in (0.4, 1.0):
        _, hi_db = power_ratio_bounds(d_norm, LAMBDA_60, P)
        p_hi = dataclasses.replace(P, p_c_dbm=P.p_f_dbm + hi_db)
        loc = location_coeffs(d_norm, p_hi)
        macro_term = reg_inc_beta(
            loc.kappa / (loc.kappa + 1.0), P.t_f - P.u_f + 1, P.u_c
        )
        lam_back = (
            (P.eps - macro_term)
            / (1.0 / k_max - macro_term)
            / (shot_noise_c_f(P) * (loc.q_f * P.gamma_target) ** delta)
        )
        assert lam_back == pytest.approx(LAMBDA_60, rel=1e-9)


def test_blended_power_policy():
    lo_db, hi_db = power_ratio_bounds(1.0, LAMBDA_60, P)
    assert blended_power_policy(1.0, LAMBDA_60, 0.0, P) == pytest.approx(lo_db)
    assert blended_power_policy(1.0, LAMBDA_60, 1.0, P) == pytest.approx(hi_db)
    assert blended_power_policy(1.0, LAMBDA_60, 0.7, P) == pytest.approx(
        51.4004163328, abs=1e-6
    )
    with pytest.raises(ValueError):
        blended_power_policy(1.0, LAMBDA_60, 1.2, P)


def test_power_window_infeasible_when_load_too_high():
    with pytest.raises(InfeasiblePlanError):
        power_ratio_bounds(1.0, 0.01, P)  # shot-noise load >= 1
    with pytest.raises(InfeasiblePlanError):
        power_ratio_bounds(1.0, 5e-4, P)  # load eats the whole outage budget


def test_noise_floor_frozen():
    assert noise_floor_dbm(P) == pytest.approx(-111.03089987, abs=1e-6)


def test_pilot_snr_budget():
    # 20 dBm pilot, indoor wall, outdoor slope, referenced to the noise floor
    assert linear_to_db(pilot_snr(1.0, P)) == pytest.approx(98.0, abs=1e-4)
    assert linear_to_db(pilot_snr(10.0, P)) == pytest.approx(98.0 - 38.0, abs=1e-4)
    with pytest.raises(ValueError):
        pilot_snr(0.0, P)


def test_threshold_solves_false_alarm_target():
    for m in (1, 10, 500):
        lam = solve_threshold(m, 0.1)
        assert false_alarm_probability(m, lam) == pytest.approx(0.1, abs=1e-9)
    assert solve_threshold(500, 0.1) == pytest.approx(1040.73430801, abs=1e-4)


def test_detection_probability_zero_snr_is_false_alarm():
    lam = solve_threshold(500, 0.1)
    assert detection_probability_ray(0.0, 500, lam) == pytest.approx(
        false_alarm_probability(500, lam), abs=1e-12
    )


def test_detection_probability_limits_and_monotonicity():
    lam = solve_threshold(100, 0.1)
    gbars = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0]
    vals = [detection_probability_ray(g, 100, lam) for g in gbars]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0.97
    assert all(0.0 <= v <= 1.0 for v in vals)
    # tighter threshold detects less
    assert detection_probability_ray(0.01, 100, lam * 1.2) < vals[2]


def test_selection_combining_reduces_to_single_branch():
    lam = solve_threshold(200, 0.1)
    for g in (0.01, 0.1):
        assert detection_probability_sc(g, 200, lam, 1) == pytest.approx(
            detection_probability_ray(g, 200, lam), rel=1e-12
        )
        assert detection_probability_sc(g, 200, lam, 2) > detection_probability_ray(
            g, 200, lam
        )


def test_detector_closed_forms_match_monte_carlo():
    """Energy statistic: Gamma(2m,1) under noise only; with a Rayleigh-faded
    pilot, noncentral chi-squared (4m dof, noncentrality 2m*gbar*x) on the
    half scale. Selection combining takes the best of t_f pilot branches."""
    m = 500
    lam = solve_threshold(m, 0.1)
    rng = np.random.default_rng(2026)
    n = 1_000_000
    y0 = rng.gamma(2 * m, 1.0, size=n)
    assert np.mean(y0 > lam) == pytest.approx(0.1, abs=0.005)
    for gbar in (0.012, 0.05):
        x = rng.exponential(1.0, size=n)
        y1 = 0.5 * rng.noncentral_chisquare(4 * m, 2 * m * gbar * x, size=n)
        assert np.mean(y1 > lam) == pytest.approx(
            detection_probability_ray(gbar, m, lam), abs=0.005
        )
    gbar = 0.012
    x_sc = np.maximum(rng.exponential(1.0, size=n), rng.exponential(1.0, size=n))
    y2 = 0.5 * rng.noncentral_chisquare(4 * m, 2 * m * gbar * x_sc, size=n)
    assert np.mean(y2 > lam) == pytest.approx(
        detection_probability_sc(gbar, m, lam, 2), abs=0.005
    )


def test_max_sensing_range_frozen():
    assert max_sensing_range(500, 0.9, 0.1, P) == pytest.approx(544.280045542, abs=1e-3)


def test_max_sensing_range_grows_with_integration_time():
    r100 = max_sensing_range(100, 0.9, 0.1, P)
    r900 = max_sensing_range(900, 0.9, 0.1, P)
    assert r100 < r900


def test_max_sensing_range_detects_at_boundary():
    m, p_d, p_fa = 300, 0.9, 0.1
    r = max_sensing_range(m, p_d, p_fa, P)
    lam = solve_threshold(m, p_fa)
    assert detection_probability_sc(pilot_snr(r, P), m, lam, P.t_f) == pytest.approx(
        p_d, abs=1e-6
    )


def test_max_sensing_range_infeasible_target():
    # detection probability never drops below the false-alarm floor, so a
    # target at or under it has no finite crossing distance
    with pytest.raises(InfeasiblePlanError):
        max_sensing_range(500, 0.09, 0.1, P)


def test_sensing_plan_bundles_components():
    plan = sensing_plan(1.0, LAMBDA_60, P)
    assert plan.d_sense_m == pytest.approx(min_sensing_radius(1.0, P), rel=1e-12)
    lo_db, hi_db = power_ratio_bounds(1.0, LAMBDA_60, P)
    assert (plan.pc_over_pf_lb_db, plan.pc_over_pf_ub_db) == (lo_db, hi_db)
    assert plan.blend_weight == 0.7
    assert plan.m_tw == 500
    assert plan.p_false == pytest.approx(0.1, abs=1e-9)
    assert plan.p_detect == pytest.approx(
        detection_probability_sc(
            pilot_snr(plan.d_sense_m, P), 500, plan.threshold, P.t_f
        ),
        rel=1e-12,
    )
    assert plan.noise_power_dbm == noise_floor_dbm(P)
