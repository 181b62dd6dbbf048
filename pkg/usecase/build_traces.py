# usecase/build_traces.py
"""
Use Case: BuildTracesInteractor
---------------------------------
  * Called by the `trace` and `sync` commands
  * Responsibilities:
      1. Sample every satellite/station link of a scenario on one time grid
      2. Turn the samples into connection traces (one per station)
      3. Combine station pairs into holdover-windowed sync traces
      4. Optionally emit the raw trajectory table
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, Iterable, List, Optional, Protocol, Sequence, Tuple, TypeVar, runtime_checkable

import numpy as np
import pandas as pd
import structlog
from scipy.ndimage import maximum_filter1d

from domain.entities import (
    ChannelParams,
    ConnectionTrace,
    Constellation,
    GroundStation,
    LinkDirection,
    Scenario,
    SyncTrace,
)
from domain.errors import GridMismatchError
from domain.link_budget import ebit_rate
from domain.orbits import constellation_positions, link_geometry
from domain.policies import SyncAdmissionPolicy

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


# --------------------------------------------------------------------------- #
# 1. Dependency Ports
# --------------------------------------------------------------------------- #
class TaskPool(Protocol):
    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]: ...


# --------------------------------------------------------------------------- #
# 2. Trace builders
# --------------------------------------------------------------------------- #
def sample_times(span_s: float, step_s: float) -> np.ndarray:
    """Uniform grid t_k = k * step over the span"""
    if step_s <= 0:
        raise ValueError(f"Sampling step must be positive, got {step_s}")
    if span_s < step_s:
        raise ValueError(f"Span {span_s} s is shorter than one step of {step_s} s")
    n = int(round(span_s / step_s))
    return np.arange(n) * step_s


def build_connection_trace(
    constellation: Constellation,
    gs: GroundStation,
    params: ChannelParams,
    span_s: float,
    step_s: float,
    direction: LinkDirection,
) -> ConnectionTrace:
    """Per-satellite ebit rate to one station at every grid sample"""
    times = sample_times(span_s, step_s)
    positions = constellation_positions(constellation, times)
    n_sats = positions.shape[1]
    rates = np.zeros((times.shape[0], n_sats))
    for s in range(n_sats):
        geom = link_geometry(positions[:, s], gs, times, params.max_zenith_rad)
        rates[:, s] = ebit_rate(geom.distance_m, geom.zenith_angle_rad, geom.visible, params, direction)
    return ConnectionTrace(
        gs=gs.name,
        direction=direction,
        step_s=step_s,
        times=times,
        rates=rates,
        sat_ids=tuple(range(n_sats)),
    )


def _check_same_grid(trace1: ConnectionTrace, trace2: ConnectionTrace) -> None:
    if trace1.rates.shape != trace2.rates.shape or trace1.sat_ids != trace2.sat_ids:
        raise GridMismatchError(
            f"Traces {trace1.gs} and {trace2.gs} differ in shape "
            f"{trace1.rates.shape} vs {trace2.rates.shape} or satellite set"
        )
    if not math.isclose(trace1.step_s, trace2.step_s) or not np.allclose(trace1.times, trace2.times):
        raise GridMismatchError(f"Traces {trace1.gs} and {trace2.gs} are sampled on different grids")


def _partner_window(above: np.ndarray, window: Optional[int]) -> np.ndarray:
    """True where the partner was above cut-off anywhere in [k - w, k + w]"""
    if window is None:
        return np.broadcast_to(above.any(axis=0, keepdims=True), above.shape)
    if window == 0 or above.shape[0] == 0:
        return above
    spread = maximum_filter1d(above.astype(np.uint8), size=2 * window + 1, axis=0, mode="constant", cval=0)
    return spread > 0


def _best_admitted(rates: np.ndarray, admitted: np.ndarray, sat_ids: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    n = rates.shape[0]
    if rates.shape[1] == 0:
        return np.zeros(n), np.full(n, -1, dtype=np.int64)
    masked = np.where(admitted, rates, 0.0)
    # argmax returns the first maximum, so the lowest satellite index wins ties
    col = np.argmax(masked, axis=1)
    q = masked[np.arange(n), col]
    sat = np.where(q > 0, np.asarray(sat_ids, dtype=np.int64)[col], -1)
    return q, sat


def build_sync_trace(
    trace1: ConnectionTrace,
    trace2: ConnectionTrace,
    tau_s: float,
    cutoff: float,
) -> SyncTrace:
    """
    Q1(t) = max over satellites j with Q1j(t) > cutoff and Q2j above
    cut-off somewhere in [t - tau, t + tau]; Q2 symmetrically.
    """
    _check_same_grid(trace1, trace2)
    policy = SyncAdmissionPolicy(cutoff=cutoff, tau_s=tau_s)
    window = policy.window_samples(trace1.step_s)

    above1 = policy.above(trace1.rates)
    above2 = policy.above(trace2.rates)
    q1, sat1 = _best_admitted(trace1.rates, above1 & _partner_window(above2, window), trace1.sat_ids)
    q2, sat2 = _best_admitted(trace2.rates, above2 & _partner_window(above1, window), trace2.sat_ids)

    return SyncTrace(
        pair=(trace1.gs, trace2.gs),
        tau_s=tau_s,
        cutoff=cutoff,
        step_s=trace1.step_s,
        times=trace1.times,
        q1=q1,
        q2=q2,
        sat1=sat1,
        sat2=sat2,
    )


def trajectory_table(
    constellation: Constellation,
    stations: Sequence[GroundStation],
    times: np.ndarray,
    max_zenith_rad: float,
) -> pd.DataFrame:
    """Long-format geometry dump: one row per (t, satellite, station)"""
    positions = constellation_positions(constellation, times)
    frames = []
    for s in range(positions.shape[1]):
        for gs in stations:
            geom = link_geometry(positions[:, s], gs, times, max_zenith_rad)
            frames.append(pd.DataFrame({
                "t_s": times,
                "sat_id": s,
                "gs_name": gs.name,
                "distance_m": geom.distance_m,
                "zenith_deg": np.degrees(geom.zenith_angle_rad),
                "visible": geom.visible,
            }))
    if not frames:
        return pd.DataFrame(columns=["t_s", "sat_id", "gs_name", "distance_m", "zenith_deg", "visible"])
    return pd.concat(frames, ignore_index=True).sort_values(["t_s", "sat_id", "gs_name"], kind="stable").reset_index(drop=True)


# --------------------------------------------------------------------------- #
# 3. Input / Output DTO
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class BuildTracesInput:
    scenario: Scenario
    directions: Tuple[LinkDirection, ...] = (LinkDirection.UP,)
    with_sync: bool = False
    with_trajectory: bool = False


@dataclass(frozen=True)
class BuildTracesOutput:
    connection: Dict[Tuple[str, LinkDirection], ConnectionTrace]
    sync: List[SyncTrace] = field(default_factory=list)
    trajectory: Optional[pd.DataFrame] = None


# --------------------------------------------------------------------------- #
# 4. Use-Case Interface
# --------------------------------------------------------------------------- #
@runtime_checkable
class BuildTracesUseCase(Protocol):
    def execute(self, inp: BuildTracesInput) -> BuildTracesOutput: ...


def _trace_task(scenario: Scenario, task: Tuple[GroundStation, LinkDirection]) -> ConnectionTrace:
    gs, direction = task
    net = scenario.network
    return build_connection_trace(scenario.constellation, gs, scenario.channel, net.span_s, net.step_s, direction)


# --------------------------------------------------------------------------- #
# 5. Use Case Implementation
# --------------------------------------------------------------------------- #
class BuildTracesInteractor(BuildTracesUseCase):
    """
    Connection traces for every (station, direction), sync traces for every
    configured pair and every (cut-off, holdover) combination.
    """

    def __init__(self, pool: TaskPool) -> None:
        self._pool = pool

    # ---------- Business Entry ----------
    def execute(self, inp: BuildTracesInput) -> BuildTracesOutput:
        sc = inp.scenario
        if sc.constellation.n_satellites == 0:
            logger.warning("empty_constellation", scenario=sc.name)

        directions = list(inp.directions)
        if inp.with_sync and sc.network.direction not in directions:
            directions.append(sc.network.direction)
        tasks = [(gs, direction) for direction in directions for gs in sc.stations]
        logger.info("building_connection_traces", scenario=sc.name, traces=len(tasks),
                    satellites=sc.constellation.n_satellites, span_s=sc.network.span_s)
        traces = self._pool.map(partial(_trace_task, sc), tasks)
        connection = {(gs.name, direction): trace for (gs, direction), trace in zip(tasks, traces)}

        sync: List[SyncTrace] = []
        if inp.with_sync:
            direction = sc.network.direction
            for cutoff in sc.network.cutoffs:
                for tau in sc.network.taus_s:
                    for a, b in sc.station_pairs():
                        sync.append(build_sync_trace(connection[(a, direction)], connection[(b, direction)], tau, cutoff))
            logger.info("built_sync_traces", scenario=sc.name, count=len(sync))

        trajectory = None
        if inp.with_trajectory:
            times = connection[tasks[0]].times if tasks else np.empty(0)
            trajectory = trajectory_table(sc.constellation, sc.stations, times, sc.channel.max_zenith_rad)

        return BuildTracesOutput(connection=connection, sync=sync, trajectory=trajectory)
