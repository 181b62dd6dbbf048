"""
`sync`: holdover-windowed sync traces for every station pair and (cut-off, holdover) block
"""
from __future__ import annotations

import pandas as pd

from api.commands.base import CommandContext, tag
from domain.entities import SyncTrace
from usecase.build_traces import BuildTracesInput

HELP = "sync traces (t_s, q1, sat1, q2, sat2) for every station pair"


def sync_frame(sync: SyncTrace) -> pd.DataFrame:
    """Samples where either side of the pair is nonzero"""
    keep = sync.connected()
    return pd.DataFrame({
        "t_s": sync.times[keep],
        "q1": sync.q1[keep],
        "sat1": sync.sat1[keep],
        "q2": sync.q2[keep],
        "sat2": sync.sat2[keep],
    })


def run(ctx: CommandContext) -> None:
    sc = ctx.scenario
    out = ctx.container.get_build_traces().execute(
        BuildTracesInput(scenario=sc, directions=(sc.network.direction,), with_sync=True)
    )
    repo = ctx.tables("sync")

    rows = []
    for sync in out.sync:
        a, b = sync.pair
        frame = sync_frame(sync)
        name = f"{a}_{b}_rc{tag(sync.cutoff)}_tau{tag(sync.tau_s)}"
        ctx.emit(repo, name, frame, f"sync {a}/{b} cutoff {sync.cutoff:g} tau {sync.tau_s:g}: {len(frame)} samples")
        rows.append({
            "pair": f"{a}/{b}",
            "cutoff": sync.cutoff,
            "tau_s": sync.tau_s,
            "percent_connected": 100.0 * float(sync.connected().mean()) if sync.times.size else 0.0,
        })

    summary = pd.DataFrame(rows, columns=["pair", "cutoff", "tau_s", "percent_connected"])
    ctx.emit(repo, "sync_summary", summary, f"sync_summary: {len(summary)} pair blocks")
