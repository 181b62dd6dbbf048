import math

import numpy as np
import pytest

from domain.entities import ChannelParams, Scenario, ShadowSettings
from domain.errors import ConfigError, EmptyShadowError
from domain.orbits import central_from_zenith, orbital_period
from usecase.compute_shadow import (
    ComputeShadowInput,
    ComputeShadowInteractor,
    shadow,
    shadow_profile,
    weaker_link_rate,
)


def test_leo_shadow_is_set_by_the_cutoff_rate(calibrated_channel):
    sh = shadow(calibrated_channel, 500e3, cutoff=200.0)
    assert not sh.mask_limited
    assert 30.0 <= sh.instantaneous_angular_diameter_deg <= 40.0
    radius = math.radians(sh.instantaneous_angular_diameter_deg) / 2.0
    assert weaker_link_rate(calibrated_channel, 500e3, radius) == pytest.approx(200.0, rel=1e-6)
    mask_edge = 2.0 * math.degrees(float(central_from_zenith(500e3, calibrated_channel.max_zenith_rad)))
    assert sh.instantaneous_angular_diameter_deg < mask_edge


def test_500_cutoff_shadow_stays_inside_the_mask(calibrated_channel):
    low = shadow(calibrated_channel, 500e3, cutoff=200.0)
    high = shadow(calibrated_channel, 500e3, cutoff=500.0)
    assert not high.mask_limited
    assert high.instantaneous_angular_diameter_deg < low.instantaneous_angular_diameter_deg


@pytest.mark.parametrize("tau_s", [0.0, 100.0, 450.0, 600.0])
def test_holdover_elongates_along_track(calibrated_channel, tau_s):
    sh = shadow(calibrated_channel, 500e3, cutoff=200.0, tau_s=tau_s)
    period = orbital_period(500e3)
    assert sh.orbital_period_s == pytest.approx(period)
    assert sh.elongated_angular_length_deg == pytest.approx(
        sh.instantaneous_angular_diameter_deg + 360.0 * tau_s / period
    )


def test_interior_cutoff_is_found_by_root_search():
    params = ChannelParams()
    top = weaker_link_rate(params, 500e3, 0.0)
    edge = weaker_link_rate(params, 500e3, float(central_from_zenith(500e3, params.max_zenith_rad)) * 0.999)
    cutoff = 0.5 * (top + edge)
    sh = shadow(params, 500e3, cutoff=cutoff)
    assert not sh.mask_limited
    radius = math.radians(sh.instantaneous_angular_diameter_deg / 2.0)
    assert weaker_link_rate(params, 500e3, radius) == pytest.approx(cutoff, rel=1e-6)


def test_higher_cutoff_shrinks_the_shadow():
    params = ChannelParams()
    top = weaker_link_rate(params, 500e3, 0.0)
    sizes = [shadow(params, 500e3, cutoff=top * f).instantaneous_angular_diameter_deg for f in (0.2, 0.5, 0.9)]
    assert sizes[0] > sizes[1] > sizes[2] > 0.0


def test_cutoff_above_zenith_rate_has_no_shadow(calibrated_channel):
    top = weaker_link_rate(calibrated_channel, 500e3, 0.0)
    with pytest.raises(EmptyShadowError):
        shadow(calibrated_channel, 500e3, cutoff=top)
    with pytest.raises(ValueError):
        shadow(calibrated_channel, 500e3, cutoff=200.0, tau_s=-1.0)


def test_profile_decreases_to_the_mask(calibrated_channel):
    profile = shadow_profile(calibrated_channel, 500e3, n_points=50)
    assert profile.shape == (50, 2)
    assert profile[0, 0] == 0.0
    assert np.all(np.diff(profile[:, 1]) < 0)
    assert profile[-1, 1] > 0.0


def test_interactor_needs_a_shadow_block(calibrated_channel):
    with pytest.raises(ConfigError):
        ComputeShadowInteractor().execute(ComputeShadowInput(Scenario(name="bare")))
    scenario = Scenario(
        name="shadow",
        channel=calibrated_channel,
        shadow=ShadowSettings(altitude_m=500e3, cutoff=200.0, taus_s=(0.0, 600.0)),
    )
    out = ComputeShadowInteractor().execute(ComputeShadowInput(scenario))
    assert [s.tau_s for s in out.shadows] == [0.0, 600.0]
    assert out.shadows[1].elongated_angular_length_deg > out.shadows[0].elongated_angular_length_deg
