# usecase/evaluate_network.py
"""
Use Case: EvaluateNetworkInteractor
---------------------------------
  * Called by the `fom` command
  * Responsibilities:
      1. Build uplink and downlink connection traces for every station
      2. Build the sync trace of every pair for each (cut-off, holdover) block
      3. Reduce each sync trace to one figures-of-merit row
      4. Summarise single-station coverage
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np
import structlog

from domain.entities import (
    ConnectionTrace,
    FiguresOfMerit,
    LinkDirection,
    LossAverage,
    Scenario,
    StationConnection,
    SyncTrace,
)
from domain.errors import GridMismatchError
from domain.policies import LossAveragingPolicy
from usecase.build_traces import BuildTracesInput, BuildTracesUseCase, build_sync_trace

logger = structlog.get_logger(__name__)


# --------------------------------------------------------------------------- #
# 1. Reductions
# --------------------------------------------------------------------------- #
def longest_run(mask: np.ndarray) -> int:
    """Length of the longest run of True values"""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return 0
    padded = np.concatenate(([0], mask.astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    return int((edges[1::2] - edges[0::2]).max())


def count_runs(mask: np.ndarray) -> int:
    mask = np.asarray(mask, dtype=bool)
    if mask.size == 0:
        return 0
    return int(mask[0]) + int(np.count_nonzero(mask[1:] & ~mask[:-1]))


def _selected_rates(trace: ConnectionTrace, sat: np.ndarray) -> np.ndarray:
    """Rate of the selected satellite at each sample, zero where none is selected"""
    if trace.rates.shape[1] == 0:
        return np.zeros(sat.shape[0])
    column_of = {sat_id: col for col, sat_id in enumerate(trace.sat_ids)}
    chosen = sat >= 0
    cols = np.array([column_of[int(s)] for s in sat[chosen]], dtype=np.int64)
    out = np.zeros(sat.shape[0])
    out[chosen] = trace.rates[np.flatnonzero(chosen), cols]
    return out


def figures_of_merit(
    sync: SyncTrace,
    uplink_traces: Tuple[ConnectionTrace, ConnectionTrace],
    downlink_traces: Tuple[ConnectionTrace, ConnectionTrace],
    source_rate: float,
    loss_average: LossAverage = LossAverage.DB,
) -> FiguresOfMerit:
    """
    Average up/down losses per station over the samples where that station's
    sync trace is nonzero (using the satellite the sync trace picked),
    connected fraction and longest gap of the pair.
    """
    for trace in (*uplink_traces, *downlink_traces):
        if trace.n_samples != sync.times.shape[0]:
            raise GridMismatchError(
                f"Trace for {trace.gs} has {trace.n_samples} samples, sync trace has {sync.times.shape[0]}"
            )

    averaging = LossAveragingPolicy(loss_average)
    selections = (sync.sat1, sync.sat2)
    up = tuple(
        averaging.average_loss_db(_selected_rates(trace, sat), source_rate)
        for trace, sat in zip(uplink_traces, selections)
    )
    down = tuple(
        averaging.average_loss_db(_selected_rates(trace, sat), source_rate)
        for trace, sat in zip(downlink_traces, selections)
    )

    connected = sync.connected()
    n = connected.shape[0]
    fraction = float(connected.mean()) if n else 0.0
    gap_s = longest_run(~connected) * sync.step_s

    return FiguresOfMerit(
        pair=sync.pair,
        cutoff=sync.cutoff,
        tau_s=sync.tau_s,
        avg_uplink_loss_db=up,
        avg_downlink_loss_db=down,
        connected_fraction=fraction,
        longest_gap_s=gap_s,
        span_s=sync.span_s,
    )


def station_connection(trace: ConnectionTrace, cutoff: float, source_rate: float) -> StationConnection:
    """Thresholded single-station coverage"""
    best = trace.best_rate()
    above = best > cutoff
    fraction = float(above.mean()) if above.size else 0.0
    mean_loss = LossAveragingPolicy(LossAverage.DB).average_loss_db(np.where(above, best, 0.0), source_rate)
    return StationConnection(
        gs=trace.gs,
        direction=trace.direction,
        cutoff=cutoff,
        connected_fraction=fraction,
        minutes_per_day=fraction * 1440.0,
        passes=count_runs(above),
        mean_loss_db=mean_loss,
    )


# --------------------------------------------------------------------------- #
# 2. Input / Output DTO
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class EvaluateNetworkInput:
    scenario: Scenario


@dataclass(frozen=True)
class EvaluateNetworkOutput:
    rows: List[FiguresOfMerit]
    stations: List[StationConnection]


# --------------------------------------------------------------------------- #
# 3. Use-Case Interface
# --------------------------------------------------------------------------- #
@runtime_checkable
class EvaluateNetworkUseCase(Protocol):
    def execute(self, inp: EvaluateNetworkInput) -> EvaluateNetworkOutput: ...


# --------------------------------------------------------------------------- #
# 4. Use Case Implementation
# --------------------------------------------------------------------------- #
class EvaluateNetworkInteractor(EvaluateNetworkUseCase):
    def __init__(self, traces: BuildTracesUseCase) -> None:
        self._traces = traces

    # ---------- Business Entry ----------
    def execute(self, inp: EvaluateNetworkInput) -> EvaluateNetworkOutput:
        sc = inp.scenario
        net = sc.network
        built = self._traces.execute(
            BuildTracesInput(scenario=sc, directions=(LinkDirection.UP, LinkDirection.DOWN))
        ).connection
        source = sc.channel.source_rate_pairs_per_s

        rows: List[FiguresOfMerit] = []
        for cutoff in net.cutoffs:
            for tau in net.taus_s:
                for a, b in sc.station_pairs():
                    sync = build_sync_trace(built[(a, net.direction)], built[(b, net.direction)], tau, cutoff)
                    rows.append(figures_of_merit(
                        sync,
                        (built[(a, LinkDirection.UP)], built[(b, LinkDirection.UP)]),
                        (built[(a, LinkDirection.DOWN)], built[(b, LinkDirection.DOWN)]),
                        source,
                        net.loss_average,
                    ))
                logger.info("fom_block_done", scenario=sc.name, cutoff=cutoff, tau_s=tau,
                            pairs=len(sc.station_pairs()))

        stations = [
            station_connection(built[(gs.name, net.direction)], cutoff, source)
            for cutoff in net.cutoffs
            for gs in sc.stations
        ]
        return EvaluateNetworkOutput(rows=rows, stations=stations)


def fom_records(rows: Sequence[FiguresOfMerit]) -> List[Dict[str, object]]:
    """Flat table rows in the published column order"""
    return [
        {
            "cutoff": row.cutoff,
            "tau_s": row.tau_s,
            "pair": f"{row.pair[0]}/{row.pair[1]}",
            "uplink_loss_db_gs1": row.avg_uplink_loss_db[0],
            "uplink_loss_db_gs2": row.avg_uplink_loss_db[1],
            "downlink_loss_db_gs1": row.avg_downlink_loss_db[0],
            "downlink_loss_db_gs2": row.avg_downlink_loss_db[1],
            "percent_connected": row.percent_connected,
            "longest_gap_h": row.longest_gap_h,
        }
        for row in rows
    ]
