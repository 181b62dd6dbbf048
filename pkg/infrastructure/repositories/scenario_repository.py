"""
Scenario Repository: TOML scenario files validated with pydantic
"""
from __future__ import annotations

import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import replace
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple, Union

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from domain.entities import (
    ChannelParams,
    CircularOrbit,
    Constellation,
    DetectorModel,
    GroundStation,
    LinkDirection,
    LossAverage,
    NetworkSettings,
    OutputSettings,
    Scenario,
    ShadowSettings,
    SkewCompensation,
    SkewMode,
    StaticScenario,
    SweepSettings,
    uniform_detectors,
)
from domain.errors import ConfigError

logger = structlog.get_logger(__name__)

FloatOrList = Union[float, List[float]]


# --------------------------------------------------------------------------- #
# File schema
# --------------------------------------------------------------------------- #
class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class StationModel(_Strict):
    name: str
    latitude: float
    longitude: float
    altitude_m: float = 0.0


class OrbitModel(_Strict):
    altitude_m: float
    inclination_deg: float = 0.0
    raan_deg: float = 0.0
    phase_deg: float = 0.0
    n_satellites: int = 1


class GeometryModel(_Strict):
    stations: List[StationModel] = Field(default_factory=list)
    orbits: List[OrbitModel] = Field(default_factory=list)


class ChannelModel(_Strict):
    source_rate_pairs_per_s: float = ChannelParams.source_rate_pairs_per_s
    wavelength_m: float = ChannelParams.wavelength_m
    sat_aperture_diameter_m: float = ChannelParams.sat_aperture_diameter_m
    fill_factor: float = ChannelParams.fill_factor
    ground_aperture_diameter_m: float = ChannelParams.ground_aperture_diameter_m
    ground_fill_factor: float = ChannelParams.ground_fill_factor
    detector_eff_sat: float = ChannelParams.detector_eff_sat
    detector_eff_ground: float = ChannelParams.detector_eff_ground
    zenith_transmittance: float = ChannelParams.zenith_transmittance
    max_zenith_deg: float = ChannelParams.max_zenith_deg
    pointing_jitter_rad: float = ChannelParams.pointing_jitter_rad
    uplink_divergence_rad: float = ChannelParams.uplink_divergence_rad


class NetworkModel(_Strict):
    cutoff: FloatOrList = 200.0
    tau_s: FloatOrList = 100.0
    span_s: float = 2 * 86400.0
    step_s: float = 1.0
    direction: LinkDirection = LinkDirection.UP
    pairs: List[Tuple[str, str]] = Field(default_factory=list)
    loss_average: LossAverage = LossAverage.DB


class StaticModel(_Strict):
    label: str = "static"
    pair_rate: float = 1e7
    link_loss_db: FloatOrList = 40.0
    acquisition_s: FloatOrList = 0.25
    local_loss_db: float = 0.0
    efficiency: float = 0.5
    dark_rate_hz: float = 1000.0
    jitter_fwhm_s: float = 0.0
    resolution_s: float = 50e-12
    skew: float = 3e-10
    skew_mode: SkewMode = SkewMode.SIGN
    offset_max_s: float = 1e-6
    propagation_delay_s: float = 0.0
    n_instances: int = 100
    search_half_width_s: float = 2e-6
    success_threshold_s: float = 1e-9
    compensation: SkewCompensation = SkewCompensation.NONE
    windows_per_estimate: int = 1
    correlation_period_s: Optional[float] = None
    whole_tick_offset: bool = False


class SweepModel(_Strict):
    altitudes_m: List[float]
    separations_km: List[float]
    tau_s: float = 0.0
    span_s: float = 86400.0
    step_s: float = 1.0


class ShadowModel(_Strict):
    altitude_m: float = 500e3
    cutoff: float = 200.0
    tau_s: FloatOrList = 0.0


class OutputModel(_Strict):
    directory: str = "out"
    formats: List[str] = Field(default_factory=lambda: ["csv"])
    dump_trajectory: bool = False
    dump_timestamps: bool = False


class ScenarioModel(_Strict):
    seed: int = Field(default=0, ge=0)
    geometry: GeometryModel = Field(default_factory=GeometryModel)
    channel: ChannelModel = Field(default_factory=ChannelModel)
    network: NetworkModel = Field(default_factory=NetworkModel)
    static: List[StaticModel] = Field(default_factory=list)
    sweep: Optional[SweepModel] = None
    shadow: Optional[ShadowModel] = None
    output: OutputModel = Field(default_factory=OutputModel)


# --------------------------------------------------------------------------- #
# Helpers
# --------------------------------------------------------------------------- #
_TOML_LINE = re.compile(r"at line (\d+)")


def _as_tuple(value: FloatOrList) -> Tuple[float, ...]:
    return tuple(float(v) for v in value) if isinstance(value, list) else (float(value),)


def find_key_line(text: str, loc: Sequence[Any]) -> Optional[int]:
    """1-based line where the dotted key path (or its table header) appears"""
    lines = text.splitlines()
    start = 0
    found: Optional[int] = None
    for key in (part for part in loc if isinstance(part, str)):
        assignment = re.compile(rf"^\s*{re.escape(key)}\s*=")
        header = re.compile(rf"^\s*\[\[?\s*(?:[\w\-]+\.)*{re.escape(key)}\s*\]\]?\s*(?:#.*)?$")
        for i in range(start, len(lines)):
            if assignment.match(lines[i]) or header.match(lines[i]):
                found, start = i + 1, i
                break
    return found


# --------------------------------------------------------------------------- #
# Repository
# --------------------------------------------------------------------------- #
class ScenarioRepository:
    """
    Loads scenario files into domain Scenario objects
    """

    def __init__(self, scenario_dir: Union[str, Path] = "scenarios"):
        self.scenario_dir = Path(scenario_dir)

    def resolve(self, path: Union[str, Path]) -> Path:
        candidate = Path(path)
        if candidate.exists():
            return candidate
        fallback = self.scenario_dir / candidate
        if fallback.exists():
            return fallback
        if fallback.with_suffix(".toml").exists():
            return fallback.with_suffix(".toml")
        raise ConfigError(f"Scenario file not found: {path}")

    def load(self, path: Union[str, Path]) -> Scenario:
        resolved = self.resolve(path)
        text = resolved.read_text(encoding="utf-8")
        scenario = self.parse(text, name=resolved.stem, source=str(resolved))
        logger.info("scenario_loaded", path=str(resolved), satellites=scenario.constellation.n_satellites,
                    stations=len(scenario.stations), static_rows=len(scenario.static))
        return scenario

    def parse(self, text: str, name: str = "scenario", source: Optional[str] = None) -> Scenario:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            match = _TOML_LINE.search(str(e))
            raise ConfigError(f"TOML syntax error: {e}", line=int(match.group(1)) if match else None,
                              source=source) from e

        try:
            model = ScenarioModel.model_validate(raw)
        except ValidationError as e:
            first = e.errors()[0]
            dotted = ".".join(str(part) for part in first["loc"])
            raise ConfigError(f"{dotted}: {first['msg']}", line=find_key_line(text, first["loc"]),
                              source=source) from e

        try:
            return self._model_to_entity(model, name)
        except ValueError as e:
            raise ConfigError(str(e), source=source) from e

    # ---------- Conversion ----------
    def _model_to_entity(self, model: ScenarioModel, name: str) -> Scenario:
        stations = tuple(GroundStation(**s.model_dump()) for s in model.geometry.stations)
        names = [gs.name for gs in stations]
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate station names in {names}")
        for a, b in model.network.pairs:
            if a not in names or b not in names:
                raise ValueError(f"Pair ({a}, {b}) names an unknown station")

        net = model.network
        network = NetworkSettings(
            cutoffs=_as_tuple(net.cutoff),
            taus_s=_as_tuple(net.tau_s),
            span_s=net.span_s,
            step_s=net.step_s,
            direction=net.direction,
            pairs=tuple(tuple(p) for p in net.pairs),
            loss_average=net.loss_average,
        )
        if network.step_s <= 0 or network.span_s < network.step_s:
            raise ValueError("network.step_s must be positive and no longer than span_s")

        sweep = None
        if model.sweep is not None:
            sweep = SweepSettings(
                altitudes_m=tuple(model.sweep.altitudes_m),
                separations_km=tuple(model.sweep.separations_km),
                tau_s=model.sweep.tau_s,
                span_s=model.sweep.span_s,
                step_s=model.sweep.step_s,
            )
        shadow = None
        if model.shadow is not None:
            shadow = ShadowSettings(
                altitude_m=model.shadow.altitude_m,
                cutoff=model.shadow.cutoff,
                taus_s=_as_tuple(model.shadow.tau_s),
            )

        return Scenario(
            name=name,
            constellation=Constellation(orbits=tuple(CircularOrbit(**o.model_dump()) for o in model.geometry.orbits)),
            stations=stations,
            channel=ChannelParams(**model.channel.model_dump()),
            network=network,
            static=tuple(
                row for block in model.static for row in self._static_rows(block, model.seed)
            ),
            sweep=sweep,
            shadow=shadow,
            output=OutputSettings(
                directory=model.output.directory,
                formats=tuple(model.output.formats),
                dump_trajectory=model.output.dump_trajectory,
                dump_timestamps=model.output.dump_timestamps,
            ),
            seed=model.seed,
        )

    @staticmethod
    def _static_rows(block: StaticModel, seed: int) -> List[StaticScenario]:
        """One StaticScenario per (acquisition time, link loss) combination"""
        detector = DetectorModel(
            efficiency=block.efficiency,
            dark_rate_hz=block.dark_rate_hz,
            jitter_fwhm_s=block.jitter_fwhm_s,
            resolution_s=block.resolution_s,
        )
        return [
            StaticScenario(
                label=block.label,
                pair_rate=block.pair_rate,
                link_loss_db=loss,
                local_loss_db=block.local_loss_db,
                acquisition_s=acquisition,
                detectors=uniform_detectors(detector),
                skew=block.skew,
                skew_mode=block.skew_mode,
                offset_max_s=block.offset_max_s,
                propagation_delay_s=block.propagation_delay_s,
                n_instances=block.n_instances,
                seed=seed,
                search_half_width_s=block.search_half_width_s,
                success_threshold_s=block.success_threshold_s,
                compensation=block.compensation,
                windows_per_estimate=block.windows_per_estimate,
                correlation_period_s=block.correlation_period_s,
                whole_tick_offset=block.whole_tick_offset,
            )
            for acquisition in _as_tuple(block.acquisition_s)
            for loss in _as_tuple(block.link_loss_db)
        ]


def scenario_with_overrides(scenario: Scenario, seed: Optional[int] = None, out: Optional[str] = None) -> Scenario:
    """Apply --seed / --out on top of a loaded scenario"""
    if seed is not None:
        if seed < 0:
            raise ConfigError(f"Seed must be non-negative, got {seed}")
        scenario = replace(scenario, seed=seed, static=tuple(replace(row, seed=seed) for row in scenario.static))
    if out is not None:
        scenario = replace(scenario, output=replace(scenario.output, directory=out))
    return scenario

