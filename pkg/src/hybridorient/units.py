"""Physical pulse parameters to dimensionless kick areas.

    A_hcp   = mu0 * integral(E_hcp dt) / hbar
    A_l     = delta_alpha * integral(E_l^2 dt) / (4 hbar)
    tau_rot = pi hbar / B

E_l is the amplitude of the laser carrier, so E_l^2 = 2 I / (c eps0).
Durations are FWHM of the field envelope (HCP) or intensity envelope (laser);
a flat-top pulse has width equal to its duration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA 2018/2022, SI. h and c are exact by definition.
CONSTANTS = {
    "h": 6.62607015e-34,  # J s
    "c": 299792458.0,  # m / s
    "eps0": 8.8541878188e-12,  # F / m
}
HBAR = CONSTANTS["h"] / (2 * math.pi)
DEBYE = 1e-21 / CONSTANTS["c"]  # C m
ANGSTROM3 = 1e-30  # m^3, polarizability volume
PS = 1e-12
KV_PER_CM = 1e5  # V / m
W_PER_CM2 = 1e4  # W / m^2
PER_CM = 100.0  # m^-1

# integral of the envelope divided by (peak * FWHM)
ENVELOPE_FACTORS = {
    "flat-top": 1.0,
    "gaussian": math.sqrt(math.pi / (4 * math.log(2))),
    "sine-squared": 1.0,
}


def _positive(**kw):
    for name, value in kw.items():
        if value is None:
            continue
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be a positive number, got {value!r}")


def _factor(envelope: str) -> float:
    try:
        return ENVELOPE_FACTORS[envelope]
    except KeyError:
        raise ValueError(f"unknown envelope {envelope!r}; expected one of {sorted(ENVELOPE_FACTORS)}") from None


def rotational_period(b_cm1: float) -> float:
    """tau_rot in seconds for a rotational constant in cm^-1."""
    _positive(b_cm1=b_cm1)
    b_joule = CONSTANTS["h"] * CONSTANTS["c"] * b_cm1 * PER_CM
    return math.pi * HBAR / b_joule


def hcp_area(mu0_debye: float, e_hcp_kv_cm: float, duration_ps: float, envelope: str = "flat-top") -> float:
    _positive(mu0_debye=mu0_debye, e_hcp_kv_cm=e_hcp_kv_cm, duration_ps=duration_ps)
    field_integral = e_hcp_kv_cm * KV_PER_CM * duration_ps * PS * _factor(envelope)
    return mu0_debye * DEBYE * field_integral / HBAR


def _laser_area_per_polarizability(intensity_w_cm2, duration_ps, envelope):
    c, eps0 = CONSTANTS["c"], CONSTANTS["eps0"]
    e2_integral = 2 * intensity_w_cm2 * W_PER_CM2 / (c * eps0) * duration_ps * PS * _factor(envelope)
    # SI polarizability per unit polarizability volume
    return 4 * math.pi * eps0 * ANGSTROM3 * e2_integral / (4 * HBAR)


def laser_area(delta_alpha_a3: float, intensity_w_cm2: float, duration_ps: float,
               envelope: str = "flat-top") -> float:
    _positive(delta_alpha_a3=delta_alpha_a3, intensity_w_cm2=intensity_w_cm2, duration_ps=duration_ps)
    return delta_alpha_a3 * _laser_area_per_polarizability(intensity_w_cm2, duration_ps, envelope)


def implied_polarizability(a_l: float, intensity_w_cm2: float, duration_ps: float,
                           envelope: str = "flat-top") -> float:
    """Polarizability anisotropy (A^3) that gives laser area ``a_l``."""
    _positive(a_l=a_l, intensity_w_cm2=intensity_w_cm2, duration_ps=duration_ps)
    return a_l / _laser_area_per_polarizability(intensity_w_cm2, duration_ps, envelope)


@dataclass(frozen=True)
class Conversion:
    tau_rot_ps: float
    a_hcp: float | None
    a_l: float | None
    implied_delta_alpha_a3: float | None = None


def convert_physical_to_areas(
    b_cm1: float,
    mu0_debye: float | None = None,
    e_hcp_kv_cm: float | None = None,
    hcp_duration_ps: float | None = None,
    delta_alpha_a3: float | None = None,
    laser_intensity_w_cm2: float | None = None,
    laser_duration_ps: float | None = None,
    hcp_envelope: str = "flat-top",
    laser_envelope: str = "flat-top",
    target_a_l: float | None = None,
) -> Conversion:
    """Areas that can be formed from the given inputs; the rest are None.

    Without ``delta_alpha_a3`` but with ``target_a_l`` and laser parameters,
    the polarizability anisotropy implied by the target area is reported.
    """
    _positive(mu0_debye=mu0_debye, e_hcp_kv_cm=e_hcp_kv_cm, hcp_duration_ps=hcp_duration_ps,
              delta_alpha_a3=delta_alpha_a3, laser_intensity_w_cm2=laser_intensity_w_cm2,
              laser_duration_ps=laser_duration_ps, target_a_l=target_a_l)
    tau = rotational_period(b_cm1) / PS
    a_hcp = None
    if None not in (mu0_debye, e_hcp_kv_cm, hcp_duration_ps):
        a_hcp = hcp_area(mu0_debye, e_hcp_kv_cm, hcp_duration_ps, hcp_envelope)
    a_l = implied = None
    if None not in (laser_intensity_w_cm2, laser_duration_ps):
        if delta_alpha_a3 is not None:
            a_l = laser_area(delta_alpha_a3, laser_intensity_w_cm2, laser_duration_ps, laser_envelope)
        elif target_a_l is not None:
            implied = implied_polarizability(target_a_l, laser_intensity_w_cm2, laser_duration_ps,
                                             laser_envelope)
    return Conversion(tau, a_hcp, a_l, implied)
