"""
Entanglement-distribution link budget.

A pair source at the transmitter keeps one photon and sends the other
through a Gaussian beam, the atmosphere, and into a receiving telescope.
The ebit rate is the source rate times every transmittance along the way
times both detector efficiencies.
"""
from __future__ import annotations

import math

import numpy as np

from .entities import ArrayLike, ChannelParams, LinkDirection, LinkRates


def eta_freespace(
    distance_m: ArrayLike,
    tx_diameter_m: float,
    rx_diameter_m: float,
    wavelength_m: float,
    fill_factor: float = 1.0,
    divergence_rad: float = 0.0,
) -> ArrayLike:
    """
    Fraction of a Gaussian beam captured by a circular receiver.

    The waist is fill_factor * tx_diameter / 2. divergence_rad adds a
    spread term (divergence * L)^2 to the beam radius squared, used for
    pointing jitter and for an uplink transmitter that is wider than its
    diffraction limit.
    """
    L = np.asarray(distance_m, dtype=float)
    w0 = fill_factor * tx_diameter_m / 2.0
    rayleigh = math.pi * w0 ** 2 / wavelength_m
    w_sq = w0 ** 2 * (1.0 + (L / rayleigh) ** 2) + (divergence_rad * L) ** 2
    a = rx_diameter_m / 2.0
    eta = -np.expm1(-2.0 * a ** 2 / w_sq)
    return float(eta) if np.ndim(eta) == 0 else eta


def eta_atmosphere(
    zenith_angle_rad: ArrayLike,
    zenith_transmittance: float,
    max_zenith_rad: float = math.radians(60.0),
) -> ArrayLike:
    """Secant-law transmittance, zero outside the elevation mask"""
    zeta = np.asarray(zenith_angle_rad, dtype=float)
    inside = zeta <= max_zenith_rad
    # cos is positive wherever the mask lets us in
    safe_cos = np.where(inside, np.cos(np.minimum(zeta, max_zenith_rad)), 1.0)
    eta = np.where(inside, zenith_transmittance ** (1.0 / safe_cos), 0.0)
    return float(eta) if np.ndim(eta) == 0 else eta


def _beam_spread(params: ChannelParams, direction: LinkDirection) -> float:
    extra = params.pointing_jitter_rad ** 2
    if direction is LinkDirection.UP:
        extra += params.uplink_divergence_rad ** 2
    return math.sqrt(extra)


def ebit_rate(
    distance_m: ArrayLike,
    zenith_angle_rad: ArrayLike,
    visible,
    params: ChannelParams,
    direction: LinkDirection,
) -> ArrayLike:
    """
    Ebit rate for one direction. Downlink: satellite transmits, ground receives.
    Uplink: ground transmits, satellite receives.
    """
    if direction is LinkDirection.DOWN:
        tx, rx, fill = params.sat_aperture_diameter_m, params.ground_aperture_diameter_m, params.fill_factor
    else:
        tx, rx, fill = params.ground_aperture_diameter_m, params.sat_aperture_diameter_m, params.ground_fill_factor

    eta_fs = eta_freespace(
        distance_m, tx, rx, params.wavelength_m,
        fill_factor=fill, divergence_rad=_beam_spread(params, direction),
    )
    eta_atm = eta_atmosphere(zenith_angle_rad, params.zenith_transmittance, params.max_zenith_rad)
    rate = (
        params.source_rate_pairs_per_s
        * np.asarray(eta_fs)
        * np.asarray(eta_atm)
        * params.detector_eff_sat
        * params.detector_eff_ground
    )
    rate = np.where(np.asarray(visible, dtype=bool), rate, 0.0)
    return float(rate) if np.ndim(rate) == 0 else rate


def loss_db(rate: ArrayLike, source_rate: float) -> ArrayLike:
    """-10 log10(rate / source); inf where the rate is zero"""
    r = np.asarray(rate, dtype=float)
    if np.any(r > source_rate) or np.any(r < 0):
        raise ValueError("Ebit rate must lie in [0, source rate]")
    with np.errstate(divide="ignore"):
        loss = -10.0 * np.log10(r / source_rate)
    return float(loss) if np.ndim(loss) == 0 else loss


def link_rates(distance_m: ArrayLike, zenith_angle_rad: ArrayLike, visible, params: ChannelParams) -> LinkRates:
    """Both directions at once for the same geometry"""
    down = ebit_rate(distance_m, zenith_angle_rad, visible, params, LinkDirection.DOWN)
    up = ebit_rate(distance_m, zenith_angle_rad, visible, params, LinkDirection.UP)
    source = params.source_rate_pairs_per_s
    return LinkRates(
        downlink_ebits_per_s=down,
        uplink_ebits_per_s=up,
        downlink_loss_db=loss_db(down, source),
        uplink_loss_db=loss_db(up, source),
    )
