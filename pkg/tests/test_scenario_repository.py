import math

import numpy as np
import pandas as pd
import pytest

from domain.entities import LinkDirection, LossAverage, SkewCompensation, TimestampSeries
from domain.errors import ConfigError
from infrastructure.repositories.scenario_repository import (
    ScenarioRepository,
    find_key_line,
    scenario_with_overrides,
)
from infrastructure.repositories.table_repository import TableRepository
from infrastructure.repositories.timestamp_repository import TimestampRepository
from tests.conftest import SCENARIO_DIR

MINIMAL = """\
seed = 3

[geometry]
stations = [
    { name = "A", latitude = 10.0, longitude = 20.0 },
    { name = "B", latitude = -10.0, longitude = 40.0 },
]

[[geometry.orbits]]
altitude_m = 800e3
inclination_deg = 30.0
n_satellites = 4

[network]
cutoff = [100.0, 300.0]
tau_s = 60.0
span_s = 3600.0
step_s = 10.0
loss_average = "rate"
"""


@pytest.fixture
def repo():
    return ScenarioRepository(SCENARIO_DIR)


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_scenarios_load(repo, path):
    scenario = repo.load(path)
    assert scenario.name == path.stem
    assert scenario.stations or scenario.static or scenario.sweep or scenario.shadow


def test_parse_minimal_scenario(repo):
    scenario = repo.parse(MINIMAL, name="mini")
    assert scenario.seed == 3
    assert [gs.name for gs in scenario.stations] == ["A", "B"]
    assert scenario.constellation.n_satellites == 4
    assert scenario.network.cutoffs == (100.0, 300.0)
    assert scenario.network.taus_s == (60.0,)
    assert scenario.network.direction is LinkDirection.UP
    assert scenario.network.loss_average is LossAverage.RATE
    assert scenario.station_pairs() == [("A", "B")]
    assert scenario.static == ()


def test_load_by_bare_name(repo):
    assert repo.load("shadow").shadow is not None
    with pytest.raises(ConfigError):
        repo.load("no_such_scenario")


def test_unknown_key_reports_its_line(repo):
    text = MINIMAL + "cutof = 5.0\n"
    with pytest.raises(ConfigError) as info:
        repo.parse(text, source="bad.toml")
    assert info.value.line == text.splitlines().index("cutof = 5.0") + 1
    assert "network.cutof" in str(info.value)
    assert str(info.value).startswith("bad.toml:")


def test_toml_syntax_error_reports_its_line(repo):
    with pytest.raises(ConfigError) as info:
        repo.parse("seed = 1\n[network\ncutoff = 1\n")
    assert info.value.line == 2


def test_invalid_values_become_config_errors(repo):
    bad_lat = MINIMAL.replace("latitude = 10.0", "latitude = 95.0")
    with pytest.raises(ConfigError):
        repo.parse(bad_lat)
    with pytest.raises(ConfigError):
        repo.parse(MINIMAL.replace('loss_average = "rate"', 'loss_average = "median"'))
    with pytest.raises(ConfigError):
        repo.parse(MINIMAL + 'pairs = [["A", "Z"]]\n')
    with pytest.raises(ConfigError):
        repo.parse("seed = -1\n")
    with pytest.raises(ConfigError):
        repo.parse(MINIMAL.replace('name = "B"', 'name = "A"'))


def test_static_block_expands_into_rows(repo):
    rows = repo.load("static_loss_no_jitter").static
    assert [row.link_loss_db for row in rows] == [34.0, 36.0, 38.0, 40.0, 42.0, 44.0, 46.0]
    assert all(row.seed == 2024 for row in rows)
    assert all(row.correlation_period_s == 5e-3 and row.whole_tick_offset for row in rows)
    assert all(row.search_half_width_s == 40e-6 and row.skew == 0.0 for row in rows)

    acquisitions = repo.load("static_acquisition").static
    assert [row.acquisition_s for row in acquisitions] == [0.1, 0.15, 0.2, 0.25, 0.5]

    skew = repo.load("skew_compensation")
    assert [row.compensation for row in skew.static] == [
        SkewCompensation.NONE, SkewCompensation.KNOWN, SkewCompensation.SEARCH,
    ]
    assert skew.output.dump_timestamps


def test_overrides(repo):
    scenario = repo.load("static_loss_no_jitter")
    changed = scenario_with_overrides(scenario, seed=99, out="elsewhere")
    assert changed.seed == 99
    assert all(row.seed == 99 for row in changed.static)
    assert changed.output.directory == "elsewhere"
    assert scenario.seed == 2024
    assert scenario_with_overrides(scenario) == scenario
    with pytest.raises(ConfigError):
        scenario_with_overrides(scenario, seed=-5)


def test_find_key_line():
    text = "a = 1\n[network]\n# note\ncutoff = 2\n[output]\ncutoff = 3\n"
    assert find_key_line(text, ("network", "cutoff")) == 4
    assert find_key_line(text, ("output", "cutoff")) == 6
    assert find_key_line(text, ("missing",)) is None


def test_table_round_trip_keeps_infinities(tmp_path):
    tables = TableRepository(tmp_path, formats=("csv", "json"))
    frame = pd.DataFrame({"pair": ["A/B", "A/C"], "loss_db": [31.5, math.inf], "gap_h": [0.0, 48.0]})
    paths = tables.save("fom/fom", frame)
    assert [p.suffix for p in paths] == [".csv", ".json"]
    back = tables.load("fom/fom")
    pd.testing.assert_frame_equal(back, frame)
    with pytest.raises(ValueError):
        TableRepository(tmp_path, formats=("xlsx",))


def test_timestamp_dump_round_trip(tmp_path):
    series = {
        label: TimestampSeries(label, np.array(ticks, dtype=np.int64), 50e-12, 0.25)
        for label, ticks in {"A1": [1, 5, 9], "A2": [], "B1": [2], "B2": [3, 2**40]}.items()
    }
    repo = TimestampRepository(tmp_path)
    path = repo.save("run/first", series)
    assert path.suffix == ".bin"
    back = TimestampRepository.load(path)
    assert set(back) == {"A1", "B1", "B2"}
    np.testing.assert_array_equal(back["B2"].ticks, [3, 2**40])
    assert back["A1"].resolution_s == 50e-12
    assert back["A1"].acquisition_s == 0.25
    with pytest.raises(ValueError):
        repo.save("neg", {"A1": TimestampSeries("A1", np.array([-1]), 50e-12, 0.25)})
