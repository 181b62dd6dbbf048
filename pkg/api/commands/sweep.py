"""
`sweep`: dual-uplink product and connected ratio over altitude x separation
"""
from __future__ import annotations

import pandas as pd

from api.commands.base import CommandContext
from usecase.sweep_separation import SweepSeparationInput

HELP = "altitude/separation grid of day-averaged dual-uplink rates"


def run(ctx: CommandContext) -> None:
    sweep = ctx.container.get_sweep_separation().execute(SweepSeparationInput(scenario=ctx.scenario)).sweep
    repo = ctx.tables("sweep")

    grid = pd.DataFrame(
        [
            {
                "altitude_m": h,
                "separation_km": d,
                "tau_s": sweep.tau_s,
                "mean_product": sweep.mean_product[i, j],
                "connected_ratio": sweep.connected_ratio[i, j],
            }
            for i, h in enumerate(sweep.altitudes_m)
            for j, d in enumerate(sweep.separations_km)
        ],
        columns=["altitude_m", "separation_km", "tau_s", "mean_product", "connected_ratio"],
    )
    ctx.emit(repo, "sweep", grid, f"sweep: {len(grid)} grid points")

    fit = pd.DataFrame({
        "altitude_m": sweep.altitudes_m,
        "r_squared": sweep.r_squared,
        "slope_per_km": sweep.slope_per_km,
        "intercept": sweep.intercept,
        "critical_separation_km": sweep.critical_separation_km,
    })
    critical = ", ".join(f"{h / 1e3:g} km: {c:g}" for h, c in zip(sweep.altitudes_m, sweep.critical_separation_km))
    ctx.emit(repo, "sweep_fit", fit, f"sweep_fit: critical separation ({critical})")
