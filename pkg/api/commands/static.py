"""
`static`: fixed-geometry Monte Carlo rows of the two-way protocol
"""
from __future__ import annotations

from dataclasses import asdict

import pandas as pd

from api.commands.base import CommandContext
from domain.errors import ConfigError
from usecase.run_static_scenario import RunStaticInput

HELP = "static Monte Carlo table (success rate, SNR, offset error per loss)"

STATIC_COLUMNS = [
    "loss_db", "success_pct", "mean_ebit_rate",
    "snr_mean", "snr_sd",
    "err_mean_ps", "err_sd_ps",
    "err_success_mean_ps", "err_success_sd_ps",
    "label", "acquisition_s", "n_instances", "measured_ebit_rate", "mean_total_ebits",
]


def run(ctx: CommandContext) -> None:
    sc = ctx.scenario
    if not sc.static:
        raise ConfigError("Scenario has no [[static]] block", source=sc.name)

    result = ctx.container.get_run_static().execute(
        RunStaticInput(scenarios=sc.static, keep_timestamps=sc.output.dump_timestamps)
    )
    repo = ctx.tables("static")
    table = pd.DataFrame([asdict(s) for s in result.summaries])[STATIC_COLUMNS]
    rates = ", ".join(f"{row.loss_db:g} dB {row.success_pct:.0f}%" for row in table.itertuples())
    ctx.emit(repo, "static", table, f"static: {len(table)} rows ({rates})")

    if result.timestamps:
        dumps = ctx.container.get_timestamp_repository(ctx.out_dir / "static" / "timestamps")
        for key, series in result.timestamps.items():
            path = dumps.save(tag_key(key), series)
            ctx.written.append(path)
            print(f"timestamps {key} -> {path}", file=ctx.stdout)


def tag_key(key: str) -> str:
    return key.replace(".", "p")
