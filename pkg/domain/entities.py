# domain/entities.py
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


# Enums
class LinkDirection(str, Enum):
    """Which way the travelling photon goes"""
    UP = "up"        # ground transmits, satellite receives
    DOWN = "down"    # satellite transmits, ground receives


class CorrelationDirection(str, Enum):
    """Pairs born at A and detected at B, or the reverse"""
    AB = "AB"
    BA = "BA"


class SkewMode(str, Enum):
    """How clock B's fractional frequency offset is drawn per instance"""
    SIGN = "sign"          # fixed magnitude, random sign
    UNIFORM = "uniform"    # uniform in [-skew, skew]


class SkewCompensation(str, Enum):
    """Correction applied to clock B's timestamps before correlating"""
    NONE = "none"
    KNOWN = "known"        # relative velocity known exactly
    SEARCH = "search"      # grid search over candidate skews


class LossAverage(str, Enum):
    """How per-sample losses are combined into a figure of merit"""
    DB = "db"              # arithmetic mean of dB values
    RATE = "rate"          # dB of the mean rate


# Geometry
@dataclass(frozen=True)
class GroundStation:
    """
    Earth-fixed station on a spherical Earth
    """
    name: str
    latitude: float            # degrees, [-90, 90]
    longitude: float           # degrees, [-180, 180]
    altitude_m: float = 0.0

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"Station {self.name}: latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"Station {self.name}: longitude {self.longitude} outside [-180, 180]")

    def mirrored(self) -> "GroundStation":
        """Same station reflected across the equator"""
        return replace(self, latitude=-self.latitude)


@dataclass(frozen=True)
class CircularOrbit:
    """
    Circular orbit carrying n_satellites equally spaced in phase.

    inclination_deg is the tilt away from a polar orbit: 0 is polar,
    90 is prograde equatorial, -50 is a polar orbit rotated 50 degrees
    the other way (conventional inclination 140 degrees).
    """
    altitude_m: float
    inclination_deg: float = 0.0
    raan_deg: float = 0.0
    phase_deg: float = 0.0
    n_satellites: int = 1

    def __post_init__(self) -> None:
        if self.altitude_m <= 0:
            raise ValueError(f"Orbit altitude must be positive, got {self.altitude_m}")
        if self.n_satellites < 1:
            raise ValueError(f"Orbit needs at least one satellite, got {self.n_satellites}")

    @property
    def conventional_inclination_deg(self) -> float:
        return 90.0 - self.inclination_deg

    def mirrored(self) -> "CircularOrbit":
        """Orbit whose every position is the equatorial reflection of this one"""
        # negating the conventional inclination flips z and nothing else
        return replace(self, inclination_deg=180.0 - self.inclination_deg)


@dataclass(frozen=True)
class SatelliteRef:
    """Stable handle on one satellite of a constellation"""
    sat_id: int
    orbit_index: int
    index_in_orbit: int

    @property
    def label(self) -> str:
        return f"sat{self.sat_id}"


@dataclass(frozen=True)
class Constellation:
    """
    Ordered list of orbits; satellite ids run orbit by orbit, phase by phase
    """
    orbits: Tuple[CircularOrbit, ...] = ()

    @property
    def n_satellites(self) -> int:
        return sum(orbit.n_satellites for orbit in self.orbits)

    def satellites(self) -> Iterator[Tuple[CircularOrbit, SatelliteRef]]:
        sat_id = 0
        for orbit_index, orbit in enumerate(self.orbits):
            for k in range(orbit.n_satellites):
                yield orbit, SatelliteRef(sat_id=sat_id, orbit_index=orbit_index, index_in_orbit=k)
                sat_id += 1

    def mirrored(self) -> "Constellation":
        return Constellation(orbits=tuple(orbit.mirrored() for orbit in self.orbits))


@dataclass(frozen=True)
class LinkGeometry:
    """
    Line of sight between one satellite and one station.
    Fields are floats for a single instant or arrays for a time series.
    """
    distance_m: ArrayLike
    zenith_angle_rad: ArrayLike
    visible: Union[bool, np.ndarray]


# Link budget
@dataclass(frozen=True)
class ChannelParams:
    """
    Hardware knobs of one satellite/ground link
    """
    source_rate_pairs_per_s: float = 1e7
    wavelength_m: float = 810e-9
    sat_aperture_diameter_m: float = 0.10
    fill_factor: float = 0.8
    ground_aperture_diameter_m: float = 0.60
    ground_fill_factor: float = 0.8
    detector_eff_sat: float = 0.5
    detector_eff_ground: float = 0.5
    zenith_transmittance: float = 0.5
    max_zenith_deg: float = 60.0
    pointing_jitter_rad: float = 0.0
    uplink_divergence_rad: float = 0.0

    def __post_init__(self) -> None:
        for name in ("fill_factor", "ground_fill_factor", "detector_eff_sat",
                     "detector_eff_ground", "zenith_transmittance"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        for name in ("source_rate_pairs_per_s", "wavelength_m",
                     "sat_aperture_diameter_m", "ground_aperture_diameter_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.max_zenith_deg <= 90.0:
            raise ValueError(f"max_zenith_deg must lie in (0, 90], got {self.max_zenith_deg}")
        if self.pointing_jitter_rad < 0 or self.uplink_divergence_rad < 0:
            raise ValueError("Beam-spread terms cannot be negative")

    @property
    def max_zenith_rad(self) -> float:
        return math.radians(self.max_zenith_deg)


@dataclass(frozen=True)
class LinkRates:
    """Quantum data rate pair for one geometry"""
    downlink_ebits_per_s: ArrayLike
    uplink_ebits_per_s: ArrayLike
    downlink_loss_db: ArrayLike
    uplink_loss_db: ArrayLike


# Network traces
@dataclass(frozen=True)
class ConnectionTrace:
    """
    Ebit rate between one station and every satellite on a uniform grid.
    rates has shape (n_samples, n_satellites).
    """
    gs: str
    direction: LinkDirection
    step_s: float
    times: np.ndarray
    rates: np.ndarray
    sat_ids: Tuple[int, ...]

    @property
    def n_samples(self) -> int:
        return int(self.times.shape[0])

    @property
    def span_s(self) -> float:
        return self.n_samples * self.step_s

    def best_rate(self) -> np.ndarray:
        """Max over satellites at each sample, zero for an empty constellation"""
        if self.rates.shape[1] == 0:
            return np.zeros(self.n_samples)
        return self.rates.max(axis=1)


@dataclass(frozen=True)
class SyncTrace:
    """
    Holdover-windowed overlap of two connection traces.
    sat1/sat2 hold the satellite chosen at each sample, -1 where the trace is zero.
    """
    pair: Tuple[str, str]
    tau_s: float
    cutoff: float
    step_s: float
    times: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    sat1: np.ndarray
    sat2: np.ndarray

    @property
    def span_s(self) -> float:
        return self.times.shape[0] * self.step_s

    def connected(self) -> np.ndarray:
        return (self.q1 > 0) | (self.q2 > 0)


@dataclass(frozen=True)
class FiguresOfMerit:
    """One row of the network figures-of-merit table"""
    pair: Tuple[str, str]
    cutoff: float
    tau_s: float
    avg_uplink_loss_db: Tuple[float, float]
    avg_downlink_loss_db: Tuple[float, float]
    connected_fraction: float
    longest_gap_s: float
    span_s: float

    @property
    def percent_connected(self) -> float:
        return 100.0 * self.connected_fraction

    @property
    def longest_gap_h(self) -> float:
        return self.longest_gap_s / 3600.0


@dataclass(frozen=True)
class StationConnection:
    """Single-station coverage summary over a thresholded connection trace"""
    gs: str
    direction: LinkDirection
    cutoff: float
    connected_fraction: float
    minutes_per_day: float
    passes: int
    mean_loss_db: float


@dataclass(frozen=True)
class ShadowSpec:
    """Ground footprint where a satellite's weaker link stays above the cut-off"""
    altitude_m: float
    cutoff_ebits: float
    tau_s: float
    orbital_period_s: float
    instantaneous_angular_diameter_deg: float
    elongated_angular_length_deg: float
    mask_limited: bool = False


@dataclass(frozen=True)
class SeparationSweep:
    """
    Dual-uplink figures on an (altitude x separation) grid.
    mean_product and connected_ratio have shape (n_altitudes, n_separations).
    """
    altitudes_m: Tuple[float, ...]
    separations_km: Tuple[float, ...]
    tau_s: float
    mean_product: np.ndarray
    connected_ratio: np.ndarray
    r_squared: Tuple[float, ...]
    slope_per_km: Tuple[float, ...]
    intercept: Tuple[float, ...]
    critical_separation_km: Tuple[float, ...]


# Timestamp simulation
@dataclass(frozen=True)
class ClockModel:
    """
    Local clock: reading(t) = (1 + skew) * (t - epoch) + epoch + offset
    """
    offset_s: float = 0.0
    skew: float = 0.0
    epoch_s: float = 0.0

    def __post_init__(self) -> None:
        if not abs(self.skew) < 1.0:
            raise ValueError(f"Clock skew must satisfy |f| < 1, got {self.skew}")

    def read(self, t: ArrayLike) -> ArrayLike:
        return (1.0 + self.skew) * (np.asarray(t) - self.epoch_s) + self.epoch_s + self.offset_s

    def true_time(self, reading: ArrayLike) -> ArrayLike:
        return (np.asarray(reading) - self.epoch_s - self.offset_s) / (1.0 + self.skew) + self.epoch_s


@dataclass(frozen=True)
class DetectorModel:
    """
    Single-photon detector plus timestamper
    """
    efficiency: float = 0.5
    dark_rate_hz: float = 1000.0
    jitter_fwhm_s: float = 0.0
    resolution_s: float = 50e-12

    def __post_init__(self) -> None:
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"Detector efficiency must lie in (0, 1], got {self.efficiency}")
        if self.dark_rate_hz < 0 or self.jitter_fwhm_s < 0:
            raise ValueError("Dark rate and jitter cannot be negative")
        if self.resolution_s <= 0:
            raise ValueError(f"Timestamp resolution must be positive, got {self.resolution_s}")

    @property
    def jitter_sigma_s(self) -> float:
        return self.jitter_fwhm_s / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class TimestampSeries:
    """
    Sorted local-clock detection times of one detector, stored as integer
    multiples of the timestamper resolution. pair_ids keeps the index of the
    originating pair for signal clicks and -1 for dark counts.
    """
    detector: str
    ticks: np.ndarray
    resolution_s: float
    acquisition_s: float
    pair_ids: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.ticks.shape[0])

    @property
    def seconds(self) -> np.ndarray:
        return self.ticks * self.resolution_s


@dataclass(frozen=True)
class CorrelationResult:
    """
    Lag histogram of remote minus local timestamps over the search window.
    lag_ticks[k] is the lag (in resolution units) of counts[k].
    """
    direction: CorrelationDirection
    peak_lag_s: float
    peak_height: int
    snr: float
    bin_s: float
    lag_ticks: np.ndarray
    counts: np.ndarray

    @property
    def histogram(self) -> Dict[float, int]:
        return {float(lag) * self.bin_s: int(c) for lag, c in zip(self.lag_ticks, self.counts)}


@dataclass(frozen=True)
class OffsetEstimate:
    """Two-way estimate of clock B's offset and of the round-trip time"""
    delta_hat_s: float
    roundtrip_hat_s: float
    success: Optional[bool] = None
    error_s: Optional[float] = None


@dataclass(frozen=True)
class StaticScenario:
    """
    Fixed-geometry Monte Carlo configuration of the two-way protocol.
    detectors is keyed A1, A2, B1, B2 (local/remote at each end).

    correlation_period_s folds both series modulo one correlation frame
    before histogramming, as a fixed-length FFT over the whole acquisition
    does, so accidentals from every frame pile onto the searched lags.
    whole_tick_offset rounds the drawn clock offset to the timestamp grid.
    """
    label: str = "static"
    pair_rate: float = 1e7
    link_loss_db: float = 40.0
    local_loss_db: float = 0.0
    acquisition_s: float = 0.25
    detectors: Dict[str, DetectorModel] = field(default_factory=lambda: uniform_detectors(DetectorModel()))
    skew: float = 3e-10
    skew_mode: SkewMode = SkewMode.SIGN
    offset_max_s: float = 1e-6
    propagation_delay_s: float = 0.0
    n_instances: int = 100
    seed: int = 0
    search_half_width_s: float = 2e-6
    success_threshold_s: float = 1e-9
    compensation: SkewCompensation = SkewCompensation.NONE
    windows_per_estimate: int = 1
    correlation_period_s: Optional[float] = None
    whole_tick_offset: bool = False

    def __post_init__(self) -> None:
        if self.pair_rate <= 0:
            raise ValueError(f"Pair rate must be positive, got {self.pair_rate}")
        if self.link_loss_db < 0 or self.local_loss_db < 0:
            raise ValueError("Losses cannot be negative")
        if self.acquisition_s <= 0:
            raise ValueError(f"Acquisition time must be positive, got {self.acquisition_s}")
        if self.n_instances < 1 or self.windows_per_estimate < 1:
            raise ValueError("Need at least one instance and one window per estimate")
        missing = {"A1", "A2", "B1", "B2"} - set(self.detectors)
        if missing:
            raise ValueError(f"Missing detectors: {sorted(missing)}")
        resolutions = {d.resolution_s for d in self.detectors.values()}
        if len(resolutions) != 1:
            raise ValueError("All four timestampers must share one resolution")
        if self.search_half_width_s <= 0:
            raise ValueError(f"Search half-width must be positive, got {self.search_half_width_s}")
        if self.correlation_period_s is not None:
            if self.correlation_period_s <= 0:
                raise ValueError(f"Correlation period must be positive, got {self.correlation_period_s}")
            if 2.0 * (self.search_half_width_s + abs(self.propagation_delay_s)) >= self.correlation_period_s:
                raise ValueError("Lag search window does not fit inside one correlation period")

    @property
    def resolution_s(self) -> float:
        return self.detectors["A1"].resolution_s

    @property
    def analytic_ebit_rate(self) -> float:
        """Expected true-coincidence rate per direction"""
        return (self.pair_rate
                * 10 ** (-(self.link_loss_db + self.local_loss_db) / 10.0)
                * self.detectors["A1"].efficiency
                * self.detectors["B2"].efficiency)


@dataclass(frozen=True)
class StaticSummary:
    """One row of a static-simulation table"""
    label: str
    loss_db: float
    acquisition_s: float
    n_instances: int
    success_pct: float
    mean_ebit_rate: float
    measured_ebit_rate: float
    mean_total_ebits: float
    snr_mean: float
    snr_sd: float
    err_mean_ps: float
    err_sd_ps: float
    err_success_mean_ps: float
    err_success_sd_ps: float


# Scenario
@dataclass(frozen=True)
class NetworkSettings:
    cutoffs: Tuple[float, ...] = (200.0,)
    taus_s: Tuple[float, ...] = (100.0,)
    span_s: float = 2 * 86400.0
    step_s: float = 1.0
    direction: LinkDirection = LinkDirection.UP
    pairs: Tuple[Tuple[str, str], ...] = ()
    loss_average: LossAverage = LossAverage.DB


@dataclass(frozen=True)
class SweepSettings:
    altitudes_m: Tuple[float, ...] = (500e3,)
    separations_km: Tuple[float, ...] = (0.0,)
    tau_s: float = 0.0
    span_s: float = 86400.0
    step_s: float = 1.0


@dataclass(frozen=True)
class ShadowSettings:
    altitude_m: float = 500e3
    cutoff: float = 200.0
    taus_s: Tuple[float, ...] = (0.0,)


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    formats: Tuple[str, ...] = ("csv",)
    dump_trajectory: bool = False
    dump_timestamps: bool = False


@dataclass(frozen=True)
class Scenario:
    """
    Everything a run needs; fully determined by the file plus the seed
    """
    name: str
    constellation: Constellation = field(default_factory=Constellation)
    stations: Tuple[GroundStation, ...] = ()
    channel: ChannelParams = field(default_factory=ChannelParams)
    network: NetworkSettings = field(default_factory=NetworkSettings)
    static: Tuple[StaticScenario, ...] = ()
    sweep: Optional[SweepSettings] = None
    shadow: Optional[ShadowSettings] = None
    output: OutputSettings = field(default_factory=OutputSettings)
    seed: int = 0

    def station(self, name: str) -> GroundStation:
        for gs in self.stations:
            if gs.name == name:
                return gs
        raise KeyError(name)

    def station_pairs(self) -> List[Tuple[str, str]]:
        if self.network.pairs:
            return list(self.network.pairs)
        names = [gs.name for gs in self.stations]
        return [(a, b) for i, a in enumerate(names) for b in names[i + 1:]]


# Factory functions for creating entities
def uniform_detectors(detector: DetectorModel) -> Dict[str, DetectorModel]:
    return {label: detector for label in ("A1", "A2", "B1", "B2")}


def new_tilted_polar_constellation(
    altitude_m: float,
    tilts_deg: Tuple[float, ...],
    sats_per_orbit: int,
    raan_deg: float = 0.0,
) -> Constellation:
    """Polar orbits rotated by each tilt, phases staggered by half a slot between orbits"""
    slot = 360.0 / sats_per_orbit
    orbits = tuple(
        CircularOrbit(
            altitude_m=altitude_m,
            inclination_deg=tilt,
            raan_deg=raan_deg,
            phase_deg=(k * slot / len(tilts_deg)) % 360.0,
            n_satellites=sats_per_orbit,
        )
        for k, tilt in enumerate(tilts_deg)
    )
    return Constellation(orbits=orbits)


def new_equatorial_orbit(altitude_m: float, n_satellites: int = 1) -> CircularOrbit:
    return CircularOrbit(altitude_m=altitude_m, inclination_deg=90.0, n_satellites=n_satellites)
