import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from domain.entities import ChannelParams, LinkDirection
from domain.link_budget import ebit_rate, eta_atmosphere, eta_freespace, link_rates, loss_db


def test_freespace_golden_value():
    assert eta_freespace(500e3, 0.08, 0.6, 810e-9) == pytest.approx(0.017177, rel=1e-3)


def test_freespace_decreases_with_distance_and_grows_with_aperture():
    distances = np.linspace(300e3, 3000e3, 50)
    eta = eta_freespace(distances, 0.1, 0.6, 810e-9)
    assert np.all(np.diff(eta) < 0)
    assert np.all((eta > 0) & (eta <= 1))
    assert eta_freespace(1e6, 0.1, 1.0, 810e-9) > eta_freespace(1e6, 0.1, 0.6, 810e-9)


def test_divergence_only_lowers_capture():
    plain = eta_freespace(1e6, 0.1, 0.6, 810e-9)
    spread = eta_freespace(1e6, 0.1, 0.6, 810e-9, divergence_rad=2e-6)
    assert spread < plain


def test_atmosphere_secant_law_and_mask():
    assert eta_atmosphere(0.0, 0.5) == pytest.approx(0.5)
    assert eta_atmosphere(math.radians(60.0), 0.5) == pytest.approx(0.25)
    assert eta_atmosphere(math.radians(60.1), 0.5) == 0.0
    assert eta_atmosphere(math.radians(70.0), 0.8, max_zenith_rad=math.radians(82.0)) == pytest.approx(
        0.8 ** (1.0 / math.cos(math.radians(70.0)))
    )
    zeniths = np.radians(np.linspace(0.0, 60.0, 30))
    assert np.all(np.diff(eta_atmosphere(zeniths, 0.5)) < 0)


def test_invisible_geometry_gives_zero_rate(channel):
    assert ebit_rate(600e3, 0.1, False, channel, LinkDirection.DOWN) == 0.0
    assert ebit_rate(600e3, math.radians(75.0), True, channel, LinkDirection.DOWN) == 0.0


def test_rate_formula_is_product_of_transmittances(channel):
    L, zeta = 800e3, math.radians(30.0)
    expected = (
        channel.source_rate_pairs_per_s
        * eta_freespace(L, channel.sat_aperture_diameter_m, channel.ground_aperture_diameter_m,
                        channel.wavelength_m, fill_factor=channel.fill_factor)
        * eta_atmosphere(zeta, channel.zenith_transmittance)
        * channel.detector_eff_sat
        * channel.detector_eff_ground
    )
    assert ebit_rate(L, zeta, True, channel, LinkDirection.DOWN) == pytest.approx(expected, rel=1e-12)


@given(
    distance=st.floats(min_value=300e3, max_value=5000e3),
    zenith_deg=st.floats(min_value=0.0, max_value=59.0),
)
def test_uplink_never_beats_downlink_with_small_satellite_aperture(distance, zenith_deg):
    params = ChannelParams()
    zeta = math.radians(zenith_deg)
    up = ebit_rate(distance, zeta, True, params, LinkDirection.UP)
    down = ebit_rate(distance, zeta, True, params, LinkDirection.DOWN)
    assert up <= down


def test_equal_apertures_make_directions_symmetric():
    params = ChannelParams(sat_aperture_diameter_m=0.3, ground_aperture_diameter_m=0.3)
    rates = link_rates(np.array([500e3, 900e3]), np.array([0.0, 0.4]), np.array([True, True]), params)
    np.testing.assert_allclose(rates.uplink_ebits_per_s, rates.downlink_ebits_per_s, rtol=1e-12)
    np.testing.assert_allclose(rates.uplink_loss_db, rates.downlink_loss_db, rtol=1e-12)


def test_pointing_jitter_and_uplink_divergence():
    base = ChannelParams()
    jittery = ChannelParams(pointing_jitter_rad=1e-6)
    wide = ChannelParams(uplink_divergence_rad=5e-6)
    L = 800e3
    assert ebit_rate(L, 0.0, True, jittery, LinkDirection.DOWN) < ebit_rate(L, 0.0, True, base, LinkDirection.DOWN)
    assert ebit_rate(L, 0.0, True, wide, LinkDirection.UP) < ebit_rate(L, 0.0, True, base, LinkDirection.UP)
    # divergence of the ground transmitter does not touch the downlink
    assert ebit_rate(L, 0.0, True, wide, LinkDirection.DOWN) == ebit_rate(L, 0.0, True, base, LinkDirection.DOWN)


def test_loss_db():
    assert loss_db(1e5, 1e7) == pytest.approx(20.0)
    assert loss_db(0.0, 1e7) == math.inf
    np.testing.assert_allclose(loss_db(np.array([1e7, 1e6]), 1e7), [0.0, 10.0])
    with pytest.raises(ValueError):
        loss_db(2e7, 1e7)
    with pytest.raises(ValueError):
        loss_db(-1.0, 1e7)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"source_rate_pairs_per_s": 0.0},
        {"fill_factor": 1.5},
        {"zenith_transmittance": 0.0},
        {"max_zenith_deg": 95.0},
        {"detector_eff_sat": 1.2},
    ],
)
def test_channel_rejects_out_of_range_parameters(kwargs):
    with pytest.raises(ValueError):
        ChannelParams(**kwargs)
