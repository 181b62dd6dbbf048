"""
`fom`: network figures of merit, one block per (cut-off, holdover)
"""
from __future__ import annotations

import pandas as pd

from api.commands.base import CommandContext
from usecase.evaluate_network import EvaluateNetworkInput, fom_records

HELP = "figures-of-merit table for every station pair"

FOM_COLUMNS = [
    "cutoff", "tau_s", "pair",
    "uplink_loss_db_gs1", "uplink_loss_db_gs2",
    "downlink_loss_db_gs1", "downlink_loss_db_gs2",
    "percent_connected", "longest_gap_h",
]


def run(ctx: CommandContext) -> None:
    result = ctx.container.get_evaluate_network().execute(EvaluateNetworkInput(scenario=ctx.scenario))
    repo = ctx.tables("fom")

    table = pd.DataFrame(fom_records(result.rows), columns=FOM_COLUMNS)
    best = table["percent_connected"].max() if len(table) else 0.0
    ctx.emit(repo, "fom", table, f"fom: {len(table)} rows, best pair {best:.1f}% connected")

    stations = pd.DataFrame(
        [
            {
                "gs": s.gs,
                "direction": s.direction.value,
                "cutoff": s.cutoff,
                "percent_connected": 100.0 * s.connected_fraction,
                "minutes_per_day": s.minutes_per_day,
                "passes": s.passes,
                "mean_loss_db": s.mean_loss_db,
            }
            for s in result.stations
        ],
        columns=["gs", "direction", "cutoff", "percent_connected", "minutes_per_day", "passes", "mean_loss_db"],
    )
    ctx.emit(repo, "stations", stations, f"stations: {len(stations)} rows")
