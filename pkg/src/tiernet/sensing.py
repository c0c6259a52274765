"""Carrier-sensing design for femtocell power control: the minimum sensing
radius protecting nearby cellular users, the feasible window of macro-to-femto
transmit-power ratios, uplink pilot-SNR calibration, and the performance of
the energy detector with selection combining.

Power ratios are handled in dB at the API surface; detector quantities
(threshold, SNR) are linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import k_c, shot_noise_c_f
from .linkmodel import (
    SystemParams,
    db_to_linear,
    linear_to_db,
    link_budget,
    location_coeffs,
)
from .specfun import (
    inv_reg_inc_beta,
    ln_gamma,
    ln_reg_lower_gamma,
    reg_upper_gamma,
)

__all__ = [
    "InfeasiblePlanError",
    "SensingPlan",
    "min_sensing_radius",
    "power_ratio_bounds",
    "blended_power_policy",
    "noise_floor_dbm",
    "pilot_snr",
    "false_alarm_probability",
    "detection_probability_ray",
    "detection_probability_sc",
    "solve_threshold",
    "max_sensing_range",
    "sensing_plan",
]

# The sensed uplink pilot is transmitted this far below the maximum user
# terminal power.
PILOT_BACKOFF_DB = 3.0

_BISECT_TOL = 1e-9


class InfeasiblePlanError(ValueError):
    """No feasible sensing/power plan exists for the requested operating
    point (outage budget already spent, or the power window is empty)."""


@dataclass(frozen=True)
class SensingPlan:
    """One fully-resolved carrier-sensing operating point.

    The power window [pc_over_pf_lb_db, pc_over_pf_ub_db] is the feasible
    range of P_c/P_f; its dB width is independent of the macro distance.
    p_detect is evaluated at the minimum sensing radius d_sense_m.
    """

    d_sense_m: float
    pc_over_pf_lb_db: float
    pc_over_pf_ub_db: float
    blend_weight: float
    m_tw: int
    threshold: float
    p_detect: float
    p_false: float
    noise_power_dbm: float


def min_sensing_radius(d_norm: float, p: SystemParams) -> float:
    """Smallest radius a femtocell must sense so that a single unsensed
    femtocell at that distance keeps a cellular user at D = d_norm·r_c
    within the outage target."""
    loc = location_coeffs(d_norm, p)
    y = inv_reg_inc_beta(p.eps, p.t_c - p.u_c + 1, p.u_f)
    return (loc.q_c * p.gamma_target / p.u_f * (1.0 - y) / y) ** (1.0 / p.alpha_fo)


def power_ratio_bounds(
    d_norm: float, lambda_f: float, p: SystemParams
) -> tuple[float, float]:
    """Feasible (P_c/P_f) window in dB at D = d_norm·r_c under femtocell
    density lambda_f.

    The floor keeps cellular users at D covered (their outage budget caps
    how weak the macro can be relative to the femto field); the ceiling
    keeps femtocell users covered against macro interference, with the
    worst-case hotspot correction factor substituted for the
    location-dependent one.

    Raises:
        InfeasiblePlanError: outage budget infeasible at this density, or
            the window is empty (floor above ceiling).
    """
    if not lambda_f > 0:
        raise ValueError(f"power_ratio_bounds requires lambda_f > 0, got {lambda_f}")
    delta = 2.0 / p.alpha_fo
    budget = link_budget(p)
    loc = location_coeffs(d_norm, p)
    d = d_norm * p.r_c
    g = p.gamma_target
    c_f = shot_noise_c_f(p)

    lb_lin = (
        g
        * (budget.a_cf / budget.a_c)
        * p.u_c
        * d**p.alpha_c
        * (c_f * lambda_f / (p.eps * k_c(p))) ** (1.0 / delta)
    )

    k_max = (p.t_f - p.u_f + 1) ** delta * math.exp(ln_gamma(1.0 - delta))
    load = lambda_f * c_f * (loc.q_f * g) ** delta
    if load >= 1.0:
        raise InfeasiblePlanError(
            f"femtocell load {load:.4g} >= 1 at lambda_f={lambda_f:.4g}"
        )
    eps_eff = (p.eps - load / k_max) / (1.0 - load)
    if not 0.0 < eps_eff < 1.0:
        raise InfeasiblePlanError(
            f"effective outage budget {eps_eff:.4g} outside (0,1) at "
            f"lambda_f={lambda_f:.4g}, d_norm={d_norm:.4g}"
        )
    y = inv_reg_inc_beta(eps_eff, p.t_f - p.u_f + 1, p.u_c)
    kappa_star = y / (1.0 - y)
    ub_lin = (
        kappa_star
        * p.u_c
        * (budget.a_fi / budget.a_fc)
        * d**p.alpha_c
        / (g * p.u_f * p.r_f**p.alpha_fi)
    )

    lo_db, hi_db = linear_to_db(lb_lin), linear_to_db(ub_lin)
    if lo_db > hi_db:
        raise InfeasiblePlanError(
            f"empty power window at d_norm={d_norm:.4g}, "
            f"lambda_f={lambda_f:.4g}: floor {lo_db:.2f} dB > ceiling {hi_db:.2f} dB"
        )
    return lo_db, hi_db


def blended_power_policy(
    d_norm: float, lambda_f: float, weight: float, p: SystemParams
) -> float:
    """Operating P_c/P_f in dB: weight·ceiling + (1−weight)·floor."""
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight must lie in [0,1], got {weight}")
    lo_db, hi_db = power_ratio_bounds(d_norm, lambda_f, p)
    return weight * hi_db + (1.0 - weight) * lo_db


def noise_floor_dbm(p: SystemParams) -> float:
    """Receiver noise power N₀W in dBm, calibrated so a cell-edge macro user
    sees snr_edge_db of average SNR."""
    budget = link_budget(p)
    return (
        p.p_c_dbm
        - budget.a_c_db
        - 10.0 * p.alpha_c * math.log10(p.r_c)
        - p.snr_edge_db
    )


def pilot_snr(d_femto_to_user: float, p: SystemParams) -> float:
    """Average sensed uplink-pilot SNR (linear) at a femtocell a distance
    d_femto_to_user meters from the transmitting cellular user.

    The pilot is sent PILOT_BACKOFF_DB below the maximum terminal power and
    propagates on the outdoor exponent with the outdoor-to-indoor fixed loss.

    Raises:
        ValueError: if d_femto_to_user <= 0.
    """
    if not d_femto_to_user > 0:
        raise ValueError(f"pilot_snr requires d > 0, got {d_femto_to_user}")
    budget = link_budget(p)
    snr_db = (
        (p.p_ut_dbm - PILOT_BACKOFF_DB)
        - budget.a_fc_db
        - 10.0 * p.alpha_c * math.log10(d_femto_to_user)
        - noise_floor_dbm(p)
    )
    return db_to_linear(snr_db)


def false_alarm_probability(m_tw: int, threshold: float) -> float:
    """P_false of the energy detector with time-bandwidth product m_tw."""
    if m_tw < 1:
        raise ValueError(f"m_tw must be >= 1, got {m_tw}")
    if threshold < 0:
        raise ValueError(f"threshold must be nonnegative, got {threshold}")
    return reg_upper_gamma(2 * m_tw, threshold)


def detection_probability_ray(gamma_bar: float, m_tw: int, threshold: float) -> float:
    """Detection probability of the energy detector for a Rayleigh-faded
    signal with average SNR gamma_bar.

    Evaluated in log space: for large m_tw the middle factor
    (1+1/(m·γ̄))^(2m−1) and the lower-tail incomplete gamma underflow/overflow
    separately while their product stays in [0,1].
    """
    if m_tw < 1:
        raise ValueError(f"m_tw must be >= 1, got {m_tw}")
    if gamma_bar < 0:
        raise ValueError(f"gamma_bar must be nonnegative, got {gamma_bar}")
    a = 2 * m_tw - 1
    u = m_tw * gamma_bar
    if u == 0.0:
        return false_alarm_probability(m_tw, threshold)
    ln_mid = -threshold / (1.0 + u) + a * math.log1p(1.0 / u)
    ln_tail = ln_reg_lower_gamma(a, threshold * u / (1.0 + u))
    val = reg_upper_gamma(a, threshold) + math.exp(min(ln_mid + ln_tail, 0.0))
    return min(1.0, max(0.0, val))


def detection_probability_sc(
    gamma_bar: float, m_tw: int, threshold: float, t_f: int
) -> float:
    """Detection probability with selection combining over t_f antenna
    branches: the detector sees the strongest of t_f i.i.d. Rayleigh fades,
    giving the alternating-sign sum over single-branch detectors at
    gamma_bar/(i+1)."""
    if t_f < 1:
        raise ValueError(f"t_f must be >= 1, got {t_f}")
    total = 0.0
    for i in range(t_f):
        p_ray = detection_probability_ray(gamma_bar / (i + 1), m_tw, threshold)
        total += (-1.0) ** i * math.comb(t_f - 1, i) / (i + 1) * p_ray
    return min(1.0, max(0.0, t_f * total))


def solve_threshold(m_tw: int, p_false_target: float) -> float:
    """Detector threshold achieving the false-alarm target (constant
    false-alarm-rate calibration); bisection on the monotone tail."""
    if not 0.0 < p_false_target < 1.0:
        raise ValueError(f"p_false_target must lie in (0,1), got {p_false_target}")
    lo, hi = 0.0, 1.0
    while false_alarm_probability(m_tw, hi) > p_false_target:
        hi *= 2.0
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if false_alarm_probability(m_tw, mid) > p_false_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def max_sensing_range(
    m_tw: int,
    p_detect_target: float,
    p_false_target: float,
    p: SystemParams,
) -> float:
    """Largest distance at which the pilot of a cellular user is still
    detected with probability >= p_detect_target, after calibrating the
    threshold to p_false_target.

    Raises:
        InfeasiblePlanError: the detect target is unreachable even as the
            pilot source approaches the femtocell.
    """
    if not 0.0 < p_detect_target < 1.0:
        raise ValueError(f"p_detect_target must lie in (0,1), got {p_detect_target}")
    threshold = solve_threshold(m_tw, p_false_target)

    def p_detect(d: float) -> float:
        return detection_probability_sc(pilot_snr(d, p), m_tw, threshold, p.t_f)

    lo = 1e-3
    if p_detect(lo) < p_detect_target:
        raise InfeasiblePlanError(
            f"detect target {p_detect_target} unreachable at m_tw={m_tw} "
            f"(P_detect={p_detect(lo):.4f} even at {lo} m)"
        )
    hi = 1.0
    while p_detect(hi) >= p_detect_target:
        hi *= 2.0
        if hi > 1e8:
            raise InfeasiblePlanError(
                f"detect target {p_detect_target} not bounded above the "
                f"false-alarm floor at m_tw={m_tw}"
            )
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if p_detect(mid) >= p_detect_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sensing_plan(
    d_norm: float,
    lambda_f: float,
    p: SystemParams,
    m_tw: int = 500,
    blend_weight: float = 0.7,
    p_detect_target: float = 0.9,
    p_false_target: float = 0.1,
) -> SensingPlan:
    """Resolve the full sensing design at one location/density: minimum
    sensing radius, the power window, and the detector operating point with
    p_detect evaluated for a pilot at exactly the minimum sensing radius."""
    d_sense = min_sensing_radius(d_norm, p)
    lo_db, hi_db = power_ratio_bounds(d_norm, lambda_f, p)
    threshold = solve_threshold(m_tw, p_false_target)
    return SensingPlan(
        d_sense_m=d_sense,
        pc_over_pf_lb_db=lo_db,
        pc_over_pf_ub_db=hi_db,
        blend_weight=blend_weight,
        m_tw=m_tw,
        threshold=threshold,
        p_detect=detection_probability_sc(
            pilot_snr(d_sense, p), m_tw, threshold, p.t_f
        ),
        p_false=false_alarm_probability(m_tw, threshold),
        noise_power_dbm=noise_floor_dbm(p),
    )
