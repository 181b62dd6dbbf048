# usecase/compute_shadow.py
"""
Use Case: ComputeShadowInteractor
---------------------------------
  * Called by the `shadow` command
  * Finds the ground footprint inside which a satellite's weaker link stays
    above the cut-off rate, and how far holdover stretches it along track
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Protocol, runtime_checkable

import numpy as np
import structlog
from scipy.optimize import brentq

from domain.entities import ChannelParams, LinkDirection, Scenario, ShadowSpec
from domain.errors import ConfigError, EmptyShadowError
from domain.link_budget import ebit_rate
from domain.orbits import central_from_zenith, orbital_period, slant_range, zenith_from_central

logger = structlog.get_logger(__name__)

# stay a hair inside the mask so the edge sample counts as visible
_EDGE = 1.0 - 1e-12


def weaker_link_rate(params: ChannelParams, altitude_m: float, central_angle_rad: float) -> float:
    """min(uplink, downlink) rate for a station a given central angle off the sub-satellite point"""
    distance = slant_range(altitude_m, central_angle_rad)
    zenith = zenith_from_central(altitude_m, central_angle_rad)
    visible = zenith <= params.max_zenith_rad
    up = ebit_rate(distance, zenith, visible, params, LinkDirection.UP)
    down = ebit_rate(distance, zenith, visible, params, LinkDirection.DOWN)
    return float(min(up, down))


def shadow(params: ChannelParams, altitude_m: float, cutoff: float, tau_s: float = 0.0) -> ShadowSpec:
    """
    Shadow diameter is twice the central angle at which the weaker link
    drops to the cut-off, or twice the mask edge when the rate is still
    above cut-off there.
    """
    if tau_s < 0:
        raise ValueError(f"Holdover time cannot be negative, got {tau_s}")
    zenith_rate = weaker_link_rate(params, altitude_m, 0.0)
    if zenith_rate <= cutoff:
        raise EmptyShadowError(
            f"Cut-off {cutoff} ebits/s is not below the zenith rate {zenith_rate:.1f} ebits/s at {altitude_m:.0f} m"
        )

    gamma_mask = float(central_from_zenith(altitude_m, params.max_zenith_rad)) * _EDGE
    mask_limited = weaker_link_rate(params, altitude_m, gamma_mask) >= cutoff
    if mask_limited:
        radius = gamma_mask
    else:
        radius = brentq(lambda g: weaker_link_rate(params, altitude_m, g) - cutoff, 0.0, gamma_mask, xtol=1e-12)

    diameter = 2.0 * math.degrees(radius)
    period = orbital_period(altitude_m)
    return ShadowSpec(
        altitude_m=altitude_m,
        cutoff_ebits=cutoff,
        tau_s=tau_s,
        orbital_period_s=period,
        instantaneous_angular_diameter_deg=diameter,
        elongated_angular_length_deg=diameter + 360.0 / period * tau_s,
        mask_limited=bool(mask_limited),
    )


def shadow_profile(params: ChannelParams, altitude_m: float, n_points: int = 181) -> np.ndarray:
    """(central angle in degrees, weaker-link rate) across the visibility disc"""
    gamma_mask = float(central_from_zenith(altitude_m, params.max_zenith_rad)) * _EDGE
    gammas = np.linspace(0.0, gamma_mask, n_points)
    rates = np.array([weaker_link_rate(params, altitude_m, g) for g in gammas])
    return np.column_stack([np.degrees(gammas), rates])


# --------------------------------------------------------------------------- #
# Input / Output DTO
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class ComputeShadowInput:
    scenario: Scenario


@dataclass(frozen=True)
class ComputeShadowOutput:
    shadows: List[ShadowSpec]


@runtime_checkable
class ComputeShadowUseCase(Protocol):
    def execute(self, inp: ComputeShadowInput) -> ComputeShadowOutput: ...


class ComputeShadowInteractor(ComputeShadowUseCase):
    # ---------- Business Entry ----------
    def execute(self, inp: ComputeShadowInput) -> ComputeShadowOutput:
        sc = inp.scenario
        if sc.shadow is None:
            raise ConfigError("Scenario has no [shadow] block", source=sc.name)
        block = sc.shadow
        shadows = [shadow(sc.channel, block.altitude_m, block.cutoff, tau) for tau in block.taus_s]
        logger.info(
            "shadow_done",
            scenario=sc.name,
            diameter_deg=round(shadows[0].instantaneous_angular_diameter_deg, 3) if shadows else None,
            mask_limited=shadows[0].mask_limited if shadows else None,
        )
        return ComputeShadowOutput(shadows=shadows)
