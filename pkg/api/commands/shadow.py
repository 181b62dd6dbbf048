"""
`shadow`: satellite shadow diameter and its holdover elongation
"""
from __future__ import annotations

import pandas as pd

from api.commands.base import CommandContext
from usecase.compute_shadow import ComputeShadowInput, shadow_profile

HELP = "shadow diameter and elongated length for each holdover time"


def run(ctx: CommandContext) -> None:
    sc = ctx.scenario
    shadows = ctx.container.get_compute_shadow().execute(ComputeShadowInput(scenario=sc)).shadows
    repo = ctx.tables("shadow")

    table = pd.DataFrame(
        [
            {
                "altitude_m": s.altitude_m,
                "cutoff": s.cutoff_ebits,
                "tau_s": s.tau_s,
                "orbital_period_s": s.orbital_period_s,
                "instantaneous_angular_diameter_deg": s.instantaneous_angular_diameter_deg,
                "elongated_angular_length_deg": s.elongated_angular_length_deg,
                "mask_limited": s.mask_limited,
            }
            for s in shadows
        ]
    )
    lengths = ", ".join(f"tau {s.tau_s:g}: {s.elongated_angular_length_deg:.1f} deg" for s in shadows)
    diameter = shadows[0].instantaneous_angular_diameter_deg if shadows else float("nan")
    ctx.emit(repo, "shadow", table, f"shadow: diameter {diameter:.1f} deg ({lengths})")

    profile = pd.DataFrame(shadow_profile(sc.channel, sc.shadow.altitude_m),
                           columns=["central_angle_deg", "weaker_link_rate"])
    ctx.emit(repo, "shadow_profile", profile, f"shadow_profile: {len(profile)} points")
