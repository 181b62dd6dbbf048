"""
Circular-orbit kinematics and satellite/station line-of-sight geometry.

All positions live in an Earth-centred inertial frame whose z axis is the
rotation axis and whose x axis points at longitude 0 at t = 0.
"""
from __future__ import annotations

import math
from typing import Union

import numpy as np

from .entities import ArrayLike, CircularOrbit, Constellation, GroundStation, LinkGeometry
from .policies import VisibilityPolicy

R_EARTH_M = 6371e3
MU_EARTH = 3.986004418e14          # m^3 / s^2
OMEGA_EARTH = 7.2921159e-5         # rad / s, sidereal
SIDEREAL_DAY_S = 2 * math.pi / OMEGA_EARTH


def orbital_period(orbit: Union[CircularOrbit, float]) -> float:
    """Kepler period of a circular orbit, given the orbit or just its altitude"""
    altitude_m = orbit.altitude_m if isinstance(orbit, CircularOrbit) else float(orbit)
    a = R_EARTH_M + altitude_m
    return 2 * math.pi * math.sqrt(a ** 3 / MU_EARTH)


def synodic_period(altitude_m: float) -> float:
    """Time for a prograde equatorial satellite to return over the same ground point"""
    period = orbital_period(altitude_m)
    if period >= SIDEREAL_DAY_S:
        raise ValueError(f"No synodic repeat for altitude {altitude_m} m: orbit is not faster than Earth")
    return 1.0 / (1.0 / period - 1.0 / SIDEREAL_DAY_S)


def satellite_position(orbit: CircularOrbit, index: int, t: ArrayLike) -> np.ndarray:
    """
    Inertial position of satellite `index` of `orbit` at time(s) t.
    Returns shape (3,) for scalar t and (len(t), 3) for an array.
    """
    if not 0 <= index < orbit.n_satellites:
        raise IndexError(f"Satellite index {index} outside orbit of {orbit.n_satellites}")

    r = R_EARTH_M + orbit.altitude_m
    incl = math.radians(orbit.conventional_inclination_deg)
    raan = math.radians(orbit.raan_deg)
    phase0 = math.radians(orbit.phase_deg + 360.0 * index / orbit.n_satellites)

    t_arr = np.asarray(t, dtype=float)
    u = np.mod(phase0 + 2 * math.pi * t_arr / orbital_period(orbit.altitude_m), 2 * math.pi)
    cos_u, sin_u = np.cos(u), np.sin(u)

    pos = np.stack(
        [
            r * (math.cos(raan) * cos_u - math.sin(raan) * sin_u * math.cos(incl)),
            r * (math.sin(raan) * cos_u + math.cos(raan) * sin_u * math.cos(incl)),
            r * sin_u * math.sin(incl),
        ],
        axis=-1,
    )
    return pos


def ground_position(gs: GroundStation, t: ArrayLike) -> np.ndarray:
    """Inertial position of a station rotating with the Earth"""
    r = R_EARTH_M + gs.altitude_m
    lat = math.radians(gs.latitude)
    theta = math.radians(gs.longitude) + OMEGA_EARTH * np.asarray(t, dtype=float)
    return np.stack(
        [
            r * math.cos(lat) * np.cos(theta),
            r * math.cos(lat) * np.sin(theta),
            np.full_like(theta, r * math.sin(lat)),
        ],
        axis=-1,
    )


def link_geometry(
    sat_pos: np.ndarray,
    gs: GroundStation,
    t: ArrayLike,
    max_zenith_rad: float = math.radians(60.0),
) -> LinkGeometry:
    """
    Slant range, zenith angle and visibility between a satellite position
    (as returned by satellite_position at the same t) and a station.
    """
    gs_pos = ground_position(gs, t)
    diff = np.asarray(sat_pos, dtype=float) - gs_pos
    distance = np.linalg.norm(diff, axis=-1)
    up = gs_pos / np.linalg.norm(gs_pos, axis=-1, keepdims=True)
    cos_zenith = np.clip(np.sum(diff * up, axis=-1) / distance, -1.0, 1.0)
    zenith = np.arccos(cos_zenith)
    visible = VisibilityPolicy(max_zenith_rad).is_visible(zenith)

    if np.ndim(distance) == 0:
        return LinkGeometry(float(distance), float(zenith), bool(visible))
    return LinkGeometry(distance, zenith, visible)


def constellation_positions(constellation: Constellation, t: np.ndarray) -> np.ndarray:
    """Positions of every satellite, shape (len(t), n_satellites, 3)"""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if constellation.n_satellites == 0:
        return np.empty((t_arr.shape[0], 0, 3))
    return np.stack(
        [satellite_position(orbit, ref.index_in_orbit, t_arr) for orbit, ref in constellation.satellites()],
        axis=1,
    )


# ---------- Spherical-triangle helpers ----------
def slant_range(altitude_m: float, central_angle_rad: ArrayLike) -> ArrayLike:
    """Distance from a ground point to a satellite separated by a central angle"""
    r = R_EARTH_M + altitude_m
    gamma = np.asarray(central_angle_rad, dtype=float)
    return np.sqrt(R_EARTH_M ** 2 + r ** 2 - 2 * R_EARTH_M * r * np.cos(gamma))


def zenith_from_central(altitude_m: float, central_angle_rad: ArrayLike) -> ArrayLike:
    r = R_EARTH_M + altitude_m
    gamma = np.asarray(central_angle_rad, dtype=float)
    cos_zenith = (r * np.cos(gamma) - R_EARTH_M) / slant_range(altitude_m, gamma)
    return np.arccos(np.clip(cos_zenith, -1.0, 1.0))


def central_from_zenith(altitude_m: float, zenith_rad: ArrayLike) -> ArrayLike:
    r = R_EARTH_M + altitude_m
    zeta = np.asarray(zenith_rad, dtype=float)
    return zeta - np.arcsin(R_EARTH_M * np.sin(zeta) / r)


def great_circle_distance_m(a: GroundStation, b: GroundStation) -> float:
    lat1, lat2 = math.radians(a.latitude), math.radians(b.latitude)
    dlon = math.radians(b.longitude - a.longitude)
    cos_c = math.sin(lat1) * math.sin(lat2) + math.cos(lat1) * math.cos(lat2) * math.cos(dlon)
    return R_EARTH_M * math.acos(max(-1.0, min(1.0, cos_c)))

