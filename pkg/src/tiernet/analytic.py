"""Closed-form coverage results for the two-tier network: the no-coverage
femtocell radius, per-tier maximum contention densities, the cellular
coverage radius, and area spectral efficiency.

All formulas are first-order in the outage target eps (shot-noise Taylor
expansion); the Monte Carlo engine in `tiernet.simulator` validates them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .linkmodel import SystemParams, link_budget, location_coeffs, db_to_linear
from .specfun import beta, inv_reg_inc_beta, ln_gamma, reg_inc_beta

__all__ = [
    "Regime",
    "CoverageSolution",
    "ShotNoiseConstants",
    "no_coverage_radius",
    "su_mu_radius_ratios",
    "shot_noise_c_f",
    "shot_noise_k_f",
    "k_f_limit",
    "k_c",
    "shot_noise_constants",
    "max_contention_density_femto",
    "max_contention_density_cellular",
    "cellular_coverage_radius",
    "area_spectral_efficiency",
    "coverage_solution",
]


class Regime(Enum):
    CELLULAR_LIMITED = "CellularLimited"
    HOTSPOT_LIMITED = "HotspotLimited"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class CoverageSolution:
    """Analytic outputs at one normalized location."""

    d_f_m: float
    d_c_m: float
    lambda_star: float
    n_f: float
    regime: Regime


@dataclass(frozen=True)
class ShotNoiseConstants:
    """The dimensionless shot-noise constants: the interference coefficient
    c_f, the location-dependent correction k_f, its kappa->0 limit
    k_f_limit, and the cellular-side k_c."""

    c_f: float
    k_f: float
    k_f_limit: float
    k_c: float


def _falling_delta_product(length: int, delta: float) -> float:
    # prod_{m=0}^{length-1} (m - delta), evaluated in index order
    out = 1.0
    for m in range(length):
        out *= m - delta
    return out


def no_coverage_radius(p: SystemParams) -> float:
    """Radius D_f around the macrocell inside which no femtocell user can
    meet the outage target, due to macro-tier interference alone."""
    lb = link_budget(p)
    y = inv_reg_inc_beta(p.eps, p.t_f - p.u_f + 1, p.u_c)
    k = (lb.a_fi / lb.a_fc) * p.r_f ** (-p.alpha_fi)
    pf_over_pc = db_to_linear(p.p_f_dbm - p.p_c_dbm)
    val = (k / p.gamma_target) * (pf_over_pc * p.u_c / p.u_f) * y / (1.0 - y)
    return val ** (-1.0 / p.alpha_c)


def su_mu_radius_ratios(p: SystemParams) -> tuple[float, float]:
    """Exact no-coverage-radius reductions from single-user precoding with
    t_f antennas: (D_f,SU / D_f,MU, D_f,SU / D_f,single-antenna).

    Requires u_c = 1 (single macro user), matching the closed forms.
    """
    if p.u_c != 1:
        raise ValueError(f"su_mu_radius_ratios requires u_c = 1, got {p.u_c}")
    eps, t_f = p.eps, p.t_f
    y_su = eps ** (1.0 / t_f)
    # SU vs MU (u_f = t_f): the MU side loses the array gain and splits power
    ratio_mu = (((1.0 - y_su) / y_su) * (eps / (1.0 - eps)) / t_f) ** (1.0 / p.alpha_c)
    # SU vs a single transmit antenna (u_f = 1 both sides, no power split)
    ratio_one = (((1.0 - y_su) / y_su) * (eps / (1.0 - eps))) ** (1.0 / p.alpha_c)
    return ratio_mu, ratio_one


def shot_noise_c_f(p: SystemParams) -> float:
    """Shot-noise interference coefficient C_f of the femtocell field:
    pi·delta·u_f^(-delta) · sum_k C(u_f,k)·B(k+delta, u_f-k-delta)."""
    delta = 2.0 / p.alpha_fo
    total = 0.0
    for k in range(p.u_f):
        total += math.comb(p.u_f, k) * beta(k + delta, p.u_f - k - delta)
    return math.pi * delta * p.u_f ** (-delta) * total


def k_f_limit(p: SystemParams) -> float:
    """kappa -> 0 limit of the shot-noise correction (hotspot-limited
    regime): [1 + sum_{l=1}^{t_f-u_f} (1/l!)·prod_{m<l}(m-delta)]^(-1)."""
    delta = 2.0 / p.alpha_fo
    s = 1.0
    for l in range(1, p.t_f - p.u_f + 1):
        s += _falling_delta_product(l, delta) / math.factorial(l)
    return 1.0 / s


def shot_noise_k_f(kappa: float, p: SystemParams) -> float:
    """Location-dependent shot-noise correction K_f; equals 1 when
    u_f = t_f, and k_f_limit(p) at kappa = 0."""
    if kappa < 0:
        raise ValueError(f"kappa must be nonnegative, got {kappa}")
    if p.u_f == p.t_f:
        return 1.0
    delta = 2.0 / p.alpha_fo
    ratio = kappa / (kappa + 1.0)
    correction = 0.0
    for j in range(p.t_f - p.u_f):
        inner = 0.0
        for l in range(1, p.t_f - p.u_f - j + 1):
            inner += _falling_delta_product(l, delta) / math.factorial(l)
        weight = ratio**j * math.comb(p.u_c + j - 1, j) / (1.0 + kappa) ** p.u_c
        correction += weight * inner
    return 1.0 / (1.0 + correction)


def k_correction_bounds(t: int, u: int, p: SystemParams) -> tuple[float, float]:
    """Closed-form sandwich for the shot-noise corrections: both k_f_limit
    and k_c lie in [(t-u+1)^delta, (t-u+1)^delta * Gamma(1-delta)]."""
    if not 1 <= u <= t:
        raise ValueError(f"need 1 <= u <= t, got t={t}, u={u}")
    delta = 2.0 / p.alpha_fo
    base = (t - u + 1) ** delta
    return base, base * math.gamma(1.0 - delta)


def k_c(p: SystemParams) -> float:
    """Cellular-side shot-noise constant K_c =
    [1 + sum_{j=1}^{t_c-u_c} (1/j!)·prod_{k<j}(k-delta)]^(-1)."""
    delta = 2.0 / p.alpha_fo
    s = 1.0
    for j in range(1, p.t_c - p.u_c + 1):
        s += _falling_delta_product(j, delta) / math.factorial(j)
    return 1.0 / s


def shot_noise_constants(kappa: float, p: SystemParams) -> ShotNoiseConstants:
    return ShotNoiseConstants(
        c_f=shot_noise_c_f(p),
        k_f=shot_noise_k_f(kappa, p),
        k_f_limit=k_f_limit(p),
        k_c=k_c(p),
    )


def max_contention_density_femto(d_norm: float, p: SystemParams) -> tuple[float, Regime]:
    """Maximum femtocell density (per m²) keeping femto-tier outage at eps
    for a reference femtocell at D = d_norm·r_c, with the regime label.

    Returns density 0 with Regime.INFEASIBLE when the macro-tier
    interference alone already exceeds the outage budget (D below the
    no-coverage radius).
    """
    delta = 2.0 / p.alpha_fo
    loc = location_coeffs(d_norm, p)
    macro_term = reg_inc_beta(
        loc.kappa / (loc.kappa + 1.0), p.t_f - p.u_f + 1, p.u_c
    )
    if macro_term >= p.eps:
        return 0.0, Regime.INFEASIBLE
    c_f = shot_noise_c_f(p)
    k_f = shot_noise_k_f(loc.kappa, p)
    scale = 1.0 / (c_f * (loc.q_f * p.gamma_target) ** delta)
    lam = scale * (p.eps - macro_term) / (1.0 / k_f - macro_term)
    regime = Regime.CELLULAR_LIMITED if macro_term >= p.eps / 2.0 else Regime.HOTSPOT_LIMITED
    return lam, regime


def max_contention_density_cellular(d_norm: float, p: SystemParams) -> float:
    """Maximum femtocell density (per m²) keeping the outage of a cellular
    user at D = d_norm·r_c within eps."""
    delta = 2.0 / p.alpha_fo
    loc = location_coeffs(d_norm, p)
    c_f = shot_noise_c_f(p)
    return p.eps * k_c(p) / (c_f * (loc.q_c * p.gamma_target) ** delta)


def _coverage_radius_with_kc(lambda_f: float, p: SystemParams, kc_value: float) -> float:
    if not lambda_f > 0:
        raise ValueError(f"cellular_coverage_radius requires lambda_f > 0, got {lambda_f}")
    delta = 2.0 / p.alpha_fo
    lb = link_budget(p)
    pc_over_pf = db_to_linear(p.p_c_dbm - p.p_f_dbm)
    prefix = (pc_over_pf * (lb.a_c / lb.a_cf) / (p.gamma_target * p.u_c)) ** (1.0 / p.alpha_c)
    return prefix * (p.eps * kc_value / (lambda_f * shot_noise_c_f(p))) ** (
        1.0 / (delta * p.alpha_c)
    )


def cellular_coverage_radius(lambda_f: float, p: SystemParams) -> float:
    """Largest macro distance D_c at which a cellular user still meets the
    outage target under femtocell density lambda_f; algebraic inverse of
    max_contention_density_cellular."""
    return _coverage_radius_with_kc(lambda_f, p, k_c(p))


def area_spectral_efficiency(lambda_f: float, p: SystemParams) -> float:
    """Network throughput per Hz and m²: (1-eps)·u_f·lambda_f·log2(1+Γ)."""
    if lambda_f < 0:
        raise ValueError(f"lambda_f must be nonnegative, got {lambda_f}")
    return (1.0 - p.eps) * p.u_f * lambda_f * math.log2(1.0 + p.gamma_target)


def coverage_solution(
    d_norm: float, p: SystemParams, lambda_f: float | None = None
) -> CoverageSolution:
    """Bundle of the analytic answers at one location.

    d_c_m is evaluated at `lambda_f` when given, else at the femto-side
    maximum density for this location (math.inf if that density is 0 —
    with no femtocells and no noise, cellular coverage is unbounded).
    """
    lam, regime = max_contention_density_femto(d_norm, p)
    lam_for_dc = lambda_f if lambda_f is not None else lam
    d_c = cellular_coverage_radius(lam_for_dc, p) if lam_for_dc > 0 else math.inf
    return CoverageSolution(
        d_f_m=no_coverage_radius(p),
        d_c_m=d_c,
        lambda_star=lam,
        n_f=lam * math.pi * p.r_c**2,
        regime=regime,
    )
