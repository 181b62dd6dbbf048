import math

import numpy as np
import pytest
from scipy import stats

from domain.entities import ClockModel, DetectorModel, TimestampSeries
from domain.timestamps import (
    apply_skew_compensation,
    coincidence_count,
    generate_pair_events,
    transmit_and_detect,
)

NOISELESS = DetectorModel(efficiency=1.0, dark_rate_hz=0.0, jitter_fwhm_s=0.0, resolution_s=1e-12)


def test_pair_source_is_poisson(rng):
    rate, T = 1e6, 0.1
    events = generate_pair_events(rate, T, rng)
    mean = rate * T
    assert abs(events.size - mean) < 5 * math.sqrt(mean)
    assert np.all(np.diff(events) >= 0)
    assert events.min() >= 0.0 and events.max() < T


def test_pair_source_gaps_are_exponential(rng):
    rate = 1e5
    events = generate_pair_events(rate, 1.0, rng)
    gaps = np.diff(events)
    result = stats.kstest(gaps * rate, "expon")
    assert result.pvalue > 0.001


def test_pair_source_edge_cases(rng):
    with pytest.raises(ValueError):
        generate_pair_events(0.0, 1.0, rng)
    assert generate_pair_events(1e6, 0.0, rng).size == 0


def test_noiseless_channel_keeps_every_photon(rng):
    events = np.sort(rng.uniform(0.0, 1e-3, size=500))
    clock = ClockModel(offset_s=5e-9)
    series = transmit_and_detect(events, 0.0, NOISELESS, clock, 1e-6, rng, acquisition_s=2e-3, label="B2")
    assert len(series) == 500
    expected = np.rint((events + 1e-6 + 5e-9) / 1e-12).astype(np.int64)
    np.testing.assert_array_equal(series.ticks, expected)
    np.testing.assert_array_equal(series.pair_ids, np.arange(500))
    assert series.detector == "B2"
    assert series.ticks.dtype == np.int64


def test_loss_thins_to_expected_fraction(rng):
    events = generate_pair_events(1e6, 0.2, rng)
    detector = DetectorModel(efficiency=0.5, dark_rate_hz=0.0)
    series = transmit_and_detect(events, 10.0, detector, ClockModel(), 0.0, rng, acquisition_s=0.2)
    p = 0.1 * 0.5
    expected = events.size * p
    assert abs(len(series) - expected) < 5 * math.sqrt(expected * (1 - p))


def test_dark_counts_are_unlabelled(rng):
    detector = DetectorModel(efficiency=1.0, dark_rate_hz=1e4, resolution_s=1e-9)
    series = transmit_and_detect(np.empty(0), 0.0, detector, ClockModel(), 0.0, rng, acquisition_s=1.0)
    assert abs(len(series) - 1e4) < 5 * 100
    assert np.all(series.pair_ids == -1)
    assert np.all(np.diff(series.ticks) >= 0)


def test_jitter_stays_within_truncation(rng):
    events = np.sort(rng.uniform(1e-3, 2e-3, size=20000))
    detector = DetectorModel(efficiency=1.0, dark_rate_hz=0.0, jitter_fwhm_s=100e-12, resolution_s=1e-12)
    series = transmit_and_detect(events, 0.0, detector, ClockModel(), 0.0, rng, acquisition_s=3e-3)
    order = np.argsort(series.pair_ids)
    residual = series.seconds[order] - events
    sigma = detector.jitter_sigma_s
    assert np.abs(residual).max() <= 5 * sigma + 1e-12
    assert residual.std() == pytest.approx(sigma, rel=0.05)


def test_clicks_outside_acquisition_are_dropped(rng):
    events = np.array([0.1, 0.5, 0.9])
    series = transmit_and_detect(events, 0.0, NOISELESS, ClockModel(), 0.3, rng, acquisition_s=1.0)
    np.testing.assert_array_equal(series.pair_ids, [0, 1])


def test_clock_model_round_trip():
    clock = ClockModel(offset_s=1e-6, skew=1e-8, epoch_s=0.5)
    t = np.array([0.0, 0.5, 1.0])
    np.testing.assert_allclose(clock.true_time(clock.read(t)), t, atol=1e-15)
    assert clock.read(0.5) == pytest.approx(0.5 + 1e-6)
    with pytest.raises(ValueError):
        ClockModel(skew=1.0)


def test_skew_compensation_restores_rate(rng):
    events = np.sort(rng.uniform(0.0, 0.05, size=1000))
    skew = 5e-8
    skewed = transmit_and_detect(events, 0.0, NOISELESS, ClockModel(skew=skew), 0.0, rng, acquisition_s=0.06)
    fixed = apply_skew_compensation(skewed, skew)
    truth = np.rint(events / 1e-12).astype(np.int64)
    assert np.abs(skewed.ticks - truth).max() > 1000
    assert np.abs(fixed.ticks - truth).max() <= 1
    assert apply_skew_compensation(skewed, 0.0) is skewed
    with pytest.raises(ValueError):
        apply_skew_compensation(skewed, 1e-6)


def test_coincidences_ignore_dark_counts():
    a = TimestampSeries("A1", np.arange(5), 1e-12, 1.0, pair_ids=np.array([0, 1, -1, 3, 4]))
    b = TimestampSeries("B2", np.arange(4), 1e-12, 1.0, pair_ids=np.array([-1, 1, 3, 7]))
    assert coincidence_count(a, b) == 2


@pytest.mark.parametrize("kwargs", [{"efficiency": 0.0}, {"dark_rate_hz": -1.0}, {"resolution_s": 0.0}])
def test_detector_validation(kwargs):
    with pytest.raises(ValueError):
        DetectorModel(**kwargs)


def test_fwhm_to_sigma():
    assert DetectorModel(jitter_fwhm_s=100e-12).jitter_sigma_s == pytest.approx(42.466e-12, rel=1e-4)
