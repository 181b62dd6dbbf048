# usecase/sweep_separation.py
"""
Use Case: SweepSeparationInteractor
---------------------------------
  * Called by the `sweep` command
  * Two equatorial stations a given arc distance apart share one prograde
    equatorial satellite. For every (altitude, separation):
      1. day-averaged product of the two uplink rates
      2. fraction of one synodic revisit during which both links are up
  * Per altitude: linear fit of the connected ratio against separation and
    the first separation with a zero product
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import List, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np
import structlog
from scipy.ndimage import maximum_filter1d
from scipy.stats import linregress

from domain.entities import (
    ChannelParams,
    Constellation,
    GroundStation,
    LinkDirection,
    Scenario,
    SeparationSweep,
    new_equatorial_orbit,
)
from domain.errors import ConfigError
from domain.orbits import R_EARTH_M, synodic_period
from domain.policies import SyncAdmissionPolicy
from usecase.build_traces import TaskPool, build_connection_trace

logger = structlog.get_logger(__name__)


def _station_pair(separation_km: float) -> Tuple[GroundStation, GroundStation]:
    lon = math.degrees(separation_km * 1e3 / R_EARTH_M)
    if lon > 180.0:
        raise ValueError(f"Separation {separation_km} km exceeds half the equator")
    return GroundStation("GS1", 0.0, 0.0), GroundStation("GS2", 0.0, lon)


def _dual_uplink(
    params: ChannelParams, altitude_m: float, separation_km: float, tau_s: float, span_s: float, step_s: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Rate at station 1 and holdover-windowed rate at station 2 for the lone satellite"""
    constellation = Constellation(orbits=(new_equatorial_orbit(altitude_m),))
    gs1, gs2 = _station_pair(separation_km)
    r1 = build_connection_trace(constellation, gs1, params, span_s, step_s, LinkDirection.UP).rates[:, 0]
    r2 = build_connection_trace(constellation, gs2, params, span_s, step_s, LinkDirection.UP).rates[:, 0]
    window = SyncAdmissionPolicy(cutoff=0.0, tau_s=tau_s).window_samples(step_s)
    if window is None:
        r2_held = np.full_like(r2, r2.max())
    elif window == 0:
        r2_held = r2
    else:
        r2_held = maximum_filter1d(r2, size=2 * window + 1, mode="constant", cval=0.0)
    return r1, r2_held


def sweep_point(
    params: ChannelParams, tau_s: float, span_s: float, step_s: float, point: Tuple[float, float],
) -> Tuple[float, float]:
    """(day-averaged product, connected ratio over one synodic revisit)"""
    altitude_m, separation_km = point
    r1, r2 = _dual_uplink(params, altitude_m, separation_km, tau_s, span_s, step_s)
    mean_product = float(np.mean(r1 * r2))

    revisit = synodic_period(altitude_m)
    r1_pass, r2_pass = _dual_uplink(params, altitude_m, separation_km, tau_s, revisit, step_s)
    ratio = float(np.mean((r1_pass > 0) & (r2_pass > 0)))
    return mean_product, ratio


def sweep_separation(
    altitudes_m: Sequence[float],
    separations_km: Sequence[float],
    params: ChannelParams,
    tau_s: float = 0.0,
    span_s: float = 86400.0,
    step_s: float = 1.0,
    pool: TaskPool | None = None,
) -> SeparationSweep:
    points = [(h, d) for h in altitudes_m for d in separations_km]
    task = partial(sweep_point, params, tau_s, span_s, step_s)
    results = pool.map(task, points) if pool is not None else [task(p) for p in points]

    shape = (len(altitudes_m), len(separations_km))
    product = np.array([r[0] for r in results], dtype=float).reshape(shape)
    ratio = np.array([r[1] for r in results], dtype=float).reshape(shape)
    seps = np.asarray(separations_km, dtype=float)

    r_squared: List[float] = []
    slopes: List[float] = []
    intercepts: List[float] = []
    critical: List[float] = []
    for row in range(shape[0]):
        keep = ratio[row] > 0
        if keep.sum() >= 3:
            fit = linregress(seps[keep], ratio[row][keep])
            r_squared.append(float(fit.rvalue ** 2))
            slopes.append(float(fit.slope))
            intercepts.append(float(fit.intercept))
        else:
            r_squared.append(math.nan)
            slopes.append(math.nan)
            intercepts.append(math.nan)
        zero = np.flatnonzero(product[row] == 0.0)
        critical.append(float(seps[zero[0]]) if zero.size else math.nan)

    return SeparationSweep(
        altitudes_m=tuple(float(h) for h in altitudes_m),
        separations_km=tuple(float(d) for d in separations_km),
        tau_s=tau_s,
        mean_product=product,
        connected_ratio=ratio,
        r_squared=tuple(r_squared),
        slope_per_km=tuple(slopes),
        intercept=tuple(intercepts),
        critical_separation_km=tuple(critical),
    )


# --------------------------------------------------------------------------- #
# Input / Output DTO
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class SweepSeparationInput:
    scenario: Scenario


@dataclass(frozen=True)
class SweepSeparationOutput:
    sweep: SeparationSweep


@runtime_checkable
class SweepSeparationUseCase(Protocol):
    def execute(self, inp: SweepSeparationInput) -> SweepSeparationOutput: ...


class SweepSeparationInteractor(SweepSeparationUseCase):
    def __init__(self, pool: TaskPool) -> None:
        self._pool = pool

    # ---------- Business Entry ----------
    def execute(self, inp: SweepSeparationInput) -> SweepSeparationOutput:
        sc = inp.scenario
        if sc.sweep is None:
            raise ConfigError("Scenario has no [sweep] block", source=sc.name)
        block = sc.sweep
        logger.info("sweep_started", scenario=sc.name, altitudes=len(block.altitudes_m),
                    separations=len(block.separations_km), tau_s=block.tau_s)
        result = sweep_separation(
            block.altitudes_m, block.separations_km, sc.channel,
            tau_s=block.tau_s, span_s=block.span_s, step_s=block.step_s, pool=self._pool,
        )
        logger.info("sweep_done", scenario=sc.name, critical_km=list(result.critical_separation_km))
        return SweepSeparationOutput(sweep=result)
