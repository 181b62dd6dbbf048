"""
`trace`: connection traces of every station plus per-station coverage
"""
from __future__ import annotations

import numpy as np
import pandas as pd

from api.commands.base import CommandContext
from domain.entities import ConnectionTrace
from usecase.build_traces import BuildTracesInput
from usecase.evaluate_network import station_connection

HELP = "connection traces (t_s, sat_id, rate) for every station"


def trace_frame(trace: ConnectionTrace) -> pd.DataFrame:
    """Nonzero samples only, in (t, satellite) order"""
    k, s = np.nonzero(trace.rates > 0)
    return pd.DataFrame({
        "t_s": trace.times[k],
        "sat_id": np.asarray(trace.sat_ids, dtype=np.int64)[s] if trace.sat_ids else np.empty(0, dtype=np.int64),
        "rate": trace.rates[k, s],
    })


def run(ctx: CommandContext) -> None:
    sc = ctx.scenario
    direction = sc.network.direction
    out = ctx.container.get_build_traces().execute(
        BuildTracesInput(scenario=sc, directions=(direction,), with_trajectory=sc.output.dump_trajectory)
    )
    repo = ctx.tables("trace")
    source = sc.channel.source_rate_pairs_per_s

    rows = []
    for (gs, _), trace in out.connection.items():
        frame = trace_frame(trace)
        ctx.emit(repo, f"{gs}_{direction.value}", frame,
                 f"trace {gs} {direction.value}: {len(frame)} nonzero samples")
        for cutoff in sc.network.cutoffs:
            conn = station_connection(trace, cutoff, source)
            rows.append({
                "gs": conn.gs,
                "direction": conn.direction.value,
                "cutoff": conn.cutoff,
                "percent_connected": 100.0 * conn.connected_fraction,
                "minutes_per_day": conn.minutes_per_day,
                "passes": conn.passes,
                "mean_loss_db": conn.mean_loss_db,
            })

    summary = pd.DataFrame(rows, columns=["gs", "direction", "cutoff", "percent_connected",
                                          "minutes_per_day", "passes", "mean_loss_db"])
    total_minutes = summary.groupby("cutoff")["minutes_per_day"].sum() if len(summary) else pd.Series(dtype=float)
    headline = "trace_summary: " + ", ".join(
        f"cutoff {c:g}: {m:.1f} min/day total" for c, m in total_minutes.items()
    )
    ctx.emit(repo, "trace_summary", summary, headline)

    if out.trajectory is not None:
        ctx.emit(repo, "trajectory", out.trajectory, f"trajectory: {len(out.trajectory)} rows")
