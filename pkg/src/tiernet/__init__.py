"""Coverage analysis for a two-tier macro/femto network with multi-antenna
zero-forcing transmitters and carrier-sensing femtocells.

Closed-form quantities (contention density caps, coverage radii, transmit
power windows, sensing radii) live in :mod:`tiernet.analytic` and
:mod:`tiernet.sensing`; the stochastic-geometry Monte Carlo used to validate
them lives in :mod:`tiernet.simulator`.
"""

from .analytic import (
    CoverageSolution,
    Regime,
    area_spectral_efficiency,
    cellular_coverage_radius,
    coverage_solution,
    k_c,
    k_correction_bounds,
    k_f_limit,
    max_contention_density_cellular,
    max_contention_density_femto,
    no_coverage_radius,
    shot_noise_c_f,
    shot_noise_constants,
    shot_noise_k_f,
    su_mu_radius_ratios,
)
from .linkmodel import (
    LinkBudget,
    LinkType,
    LocationCoefficients,
    SystemParams,
    link_budget,
    location_coeffs,
    path_loss_db,
)
from .sensing import (
    InfeasiblePlanError,
    SensingPlan,
    blended_power_policy,
    detection_probability_ray,
    detection_probability_sc,
    false_alarm_probability,
    max_sensing_range,
    min_sensing_radius,
    noise_floor_dbm,
    power_ratio_bounds,
    sensing_plan,
    solve_threshold,
)
from .simulator import (
    ChannelMode,
    OutageEstimate,
    PowerPolicy,
    RateCdf,
    Scenario,
    ScenarioConfig,
    cellular_sir,
    draw_ppp,
    estimate_outage,
    femto_sir,
    rate_cdf,
    zf_precoder,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelMode",
    "CoverageSolution",
    "InfeasiblePlanError",
    "LinkBudget",
    "LinkType",
    "LocationCoefficients",
    "OutageEstimate",
    "PowerPolicy",
    "RateCdf",
    "Regime",
    "Scenario",
    "ScenarioConfig",
    "SensingPlan",
    "SystemParams",
    "area_spectral_efficiency",
    "blended_power_policy",
    "cellular_coverage_radius",
    "cellular_sir",
    "coverage_solution",
    "detection_probability_ray",
    "detection_probability_sc",
    "draw_ppp",
    "estimate_outage",
    "false_alarm_probability",
    "femto_sir",
    "k_c",
    "k_correction_bounds",
    "k_f_limit",
    "link_budget",
    "location_coeffs",
    "max_contention_density_cellular",
    "max_contention_density_femto",
    "max_sensing_range",
    "min_sensing_radius",
    "no_coverage_radius",
    "noise_floor_dbm",
    "path_loss_db",
    "power_ratio_bounds",
    "rate_cdf",
    "sensing_plan",
    "shot_noise_c_f",
    "shot_noise_constants",
    "shot_noise_k_f",
    "solve_threshold",
    "su_mu_radius_ratios",
    "zf_precoder",
]
