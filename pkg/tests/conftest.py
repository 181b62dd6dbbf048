"""
Shared fixtures for the simulator test-suite
"""
from pathlib import Path

import numpy as np
import pytest

from domain.entities import (
    ChannelParams,
    ConnectionTrace,
    GroundStation,
    LinkDirection,
    new_tilted_polar_constellation,
)
from infrastructure.config import Settings

ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = ROOT / "scenarios"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def channel():
    return ChannelParams()


@pytest.fixture
def calibrated_channel():
    """Channel used by the shipped network scenarios"""
    return ChannelParams(max_zenith_deg=82.5, zenith_transmittance=0.68)


@pytest.fixture
def us_stations():
    return {
        "NYC": GroundStation("NYC", 40.7128, -74.0060),
        "LA": GroundStation("LA", 34.0522, -118.2437),
        "SEA": GroundStation("SEA", 47.6062, -122.3321),
        "ATL": GroundStation("ATL", 33.7490, -84.3880),
    }


@pytest.fixture
def leo_constellation():
    return new_tilted_polar_constellation(500e3, (50.0, -50.0), 5)


@pytest.fixture
def scenario_dir():
    return SCENARIO_DIR


@pytest.fixture
def quiet_settings(tmp_path):
    return Settings(LOG_LEVEL="WARNING", QCS_THREADS=1, SCENARIO_DIR=str(SCENARIO_DIR), OUTPUT_DIR=str(tmp_path))


def make_trace(rates, gs="GS", step_s=1.0, direction=LinkDirection.UP):
    """ConnectionTrace from a (samples, satellites) rate array"""
    rates = np.asarray(rates, dtype=float)
    if rates.ndim == 1:
        rates = rates[:, None]
    return ConnectionTrace(
        gs=gs,
        direction=direction,
        step_s=step_s,
        times=np.arange(rates.shape[0]) * step_s,
        rates=rates,
        sat_ids=tuple(range(rates.shape[1])),
    )
