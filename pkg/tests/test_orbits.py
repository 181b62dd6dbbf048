import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from domain.entities import CircularOrbit, Constellation, GroundStation, new_equatorial_orbit
from domain.orbits import (
    MU_EARTH,
    R_EARTH_M,
    SIDEREAL_DAY_S,
    central_from_zenith,
    constellation_positions,
    great_circle_distance_m,
    ground_position,
    link_geometry,
    orbital_period,
    satellite_position,
    slant_range,
    synodic_period,
    zenith_from_central,
)


def test_orbital_period_follows_kepler():
    for h in (0.0, 500e3, 5000e3):
        expected = 2 * math.pi * math.sqrt((R_EARTH_M + h) ** 3 / MU_EARTH)
        assert orbital_period(h) == pytest.approx(expected, rel=1e-12)
    assert orbital_period(CircularOrbit(altitude_m=500e3)) == pytest.approx(5668, abs=2)
    assert orbital_period(0.0) == pytest.approx(5061, abs=2)
    assert orbital_period(5000e3) == pytest.approx(12067, abs=5)


def test_orbit_rejects_non_positive_altitude():
    with pytest.raises(ValueError):
        CircularOrbit(altitude_m=0.0)


def test_equatorial_satellite_starts_on_x_axis():
    orbit = new_equatorial_orbit(500e3)
    pos = satellite_position(orbit, 0, 0.0)
    np.testing.assert_allclose(pos, [R_EARTH_M + 500e3, 0.0, 0.0], atol=1e-6)


def test_position_is_periodic_and_antipodal_at_half_period():
    orbit = CircularOrbit(altitude_m=700e3, inclination_deg=30.0, raan_deg=40.0, phase_deg=10.0, n_satellites=3)
    T = orbital_period(orbit)
    for k in range(3):
        p0 = satellite_position(orbit, k, 0.0)
        np.testing.assert_allclose(satellite_position(orbit, k, T), p0, atol=1e-3)
        np.testing.assert_allclose(satellite_position(orbit, k, T / 2), -p0, atol=1e-3)
        assert np.linalg.norm(p0) == pytest.approx(R_EARTH_M + 700e3)


def test_satellite_index_out_of_range():
    orbit = CircularOrbit(altitude_m=500e3, n_satellites=2)
    with pytest.raises(IndexError):
        satellite_position(orbit, 2, 0.0)


def test_vectorised_times_match_scalar_calls():
    orbit = CircularOrbit(altitude_m=500e3, inclination_deg=50.0)
    times = np.array([0.0, 100.0, 2500.0])
    batch = satellite_position(orbit, 0, times)
    assert batch.shape == (3, 3)
    for t, row in zip(times, batch):
        np.testing.assert_allclose(row, satellite_position(orbit, 0, t))


def test_tilt_convention():
    polar = CircularOrbit(altitude_m=500e3, inclination_deg=0.0)
    assert polar.conventional_inclination_deg == 90.0
    retro = CircularOrbit(altitude_m=500e3, inclination_deg=-50.0)
    assert retro.conventional_inclination_deg == 140.0
    # a quarter period after the node a polar satellite sits over the pole
    quarter = satellite_position(polar, 0, orbital_period(polar) / 4)
    np.testing.assert_allclose(quarter, [0.0, 0.0, R_EARTH_M + 500e3], atol=1e-3)


def test_pole_station_is_fixed_and_equator_station_returns_after_sidereal_day():
    pole = GroundStation("P", 90.0, 0.0)
    np.testing.assert_allclose(ground_position(pole, 0.0), ground_position(pole, 12345.0), atol=1e-6)
    eq = GroundStation("E", 0.0, 30.0)
    np.testing.assert_allclose(ground_position(eq, SIDEREAL_DAY_S), ground_position(eq, 0.0), atol=1e-3)


@given(dlon=st.floats(min_value=0.0, max_value=180.0), t=st.floats(min_value=0.0, max_value=2e5))
def test_rigid_rotation_preserves_equatorial_separation(dlon, t):
    a = GroundStation("A", 0.0, 0.0)
    b = GroundStation("B", 0.0, dlon)
    pa, pb = ground_position(a, t), ground_position(b, t)
    angle = math.acos(np.clip(np.dot(pa, pb) / (np.linalg.norm(pa) * np.linalg.norm(pb)), -1.0, 1.0))
    assert R_EARTH_M * angle == pytest.approx(great_circle_distance_m(a, b), abs=1.0)
    assert great_circle_distance_m(a, b) == pytest.approx(R_EARTH_M * math.radians(dlon), abs=1e-3)


def test_overhead_satellite_geometry():
    orbit = new_equatorial_orbit(500e3)
    gs = GroundStation("E", 0.0, 0.0)
    geom = link_geometry(satellite_position(orbit, 0, 0.0), gs, 0.0)
    assert geom.distance_m == pytest.approx(500e3, abs=1e-3)
    assert geom.zenith_angle_rad == pytest.approx(0.0, abs=1e-6)
    assert geom.visible is True


def test_far_side_satellite_is_not_visible():
    orbit = new_equatorial_orbit(500e3)
    gs = GroundStation("E", 0.0, 180.0)
    geom = link_geometry(satellite_position(orbit, 0, 0.0), gs, 0.0)
    assert geom.visible is False


def test_displaced_satellite_distance_matches_law_of_cosines():
    orbit = new_equatorial_orbit(500e3)
    gs = GroundStation("E", 0.0, 20.0)
    geom = link_geometry(satellite_position(orbit, 0, 0.0), gs, 0.0, max_zenith_rad=math.radians(90.0))
    r = R_EARTH_M + 500e3
    expected = math.sqrt(R_EARTH_M ** 2 + r ** 2 - 2 * R_EARTH_M * r * math.cos(math.radians(20.0)))
    assert geom.distance_m == pytest.approx(expected, rel=1e-9)
    assert geom.distance_m == pytest.approx(slant_range(500e3, math.radians(20.0)), rel=1e-9)
    assert geom.zenith_angle_rad == pytest.approx(float(zenith_from_central(500e3, math.radians(20.0))), abs=1e-9)


def test_central_angle_and_zenith_helpers_invert_each_other():
    gammas = np.radians([0.0, 5.0, 10.0, 15.0])
    zeniths = zenith_from_central(500e3, gammas)
    np.testing.assert_allclose(central_from_zenith(500e3, zeniths), gammas, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(
    lat=st.floats(min_value=-89.0, max_value=89.0),
    lon=st.floats(min_value=-180.0, max_value=180.0),
    tilt=st.floats(min_value=-90.0, max_value=90.0),
    raan=st.floats(min_value=0.0, max_value=360.0),
    t=st.floats(min_value=0.0, max_value=1e5),
)
def test_equatorial_mirror_leaves_distances_unchanged(lat, lon, tilt, raan, t):
    orbit = CircularOrbit(altitude_m=800e3, inclination_deg=tilt, raan_deg=raan)
    gs = GroundStation("G", lat, lon)
    d = link_geometry(satellite_position(orbit, 0, t), gs, t).distance_m
    d_mirror = link_geometry(satellite_position(orbit.mirrored(), 0, t), gs.mirrored(), t).distance_m
    assert d_mirror == pytest.approx(d, rel=1e-9, abs=1e-3)


def test_visible_samples_respect_distance_bounds(leo_constellation):
    gs = GroundStation("NYC", 40.7128, -74.0060)
    times = np.arange(0.0, 20000.0, 10.0)
    positions = constellation_positions(leo_constellation, times)
    h = 500e3
    limit = math.sqrt((R_EARTH_M + h) ** 2 - R_EARTH_M ** 2)
    for s in range(positions.shape[1]):
        geom = link_geometry(positions[:, s], gs, times)
        assert np.all(geom.distance_m[geom.visible] >= h - 1e-3)
        assert np.all(geom.distance_m[geom.visible] <= limit)
        assert np.all(geom.zenith_angle_rad[geom.visible] <= math.radians(60.0))


def test_empty_constellation_has_no_positions():
    assert constellation_positions(Constellation(), np.arange(5.0)).shape == (5, 0, 3)


def test_trajectories_are_deterministic(leo_constellation):
    times = np.arange(0.0, 1000.0, 7.0)
    assert np.array_equal(constellation_positions(leo_constellation, times),
                          constellation_positions(leo_constellation, times))


def test_synodic_period_requires_faster_than_earth_orbit():
    assert synodic_period(500e3) > orbital_period(500e3)
    with pytest.raises(ValueError):
        synodic_period(40000e3)
