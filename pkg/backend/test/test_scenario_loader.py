# backend/test/test_scenario_loader.py

import shutil

import pytest
from app.exceptions import ScenarioConfigError, TimeSeriesFormatError
from app.models.grid import make_time_grid
from app.services.scenario_loader import dump_scenario, load_scenario
from app.services.timeseries import load_timeseries_csv


def write_series(path, rows):
    path.write_text("time,value\n" + "".join(f"{t},{v}\n" for t, v in rows))
    return path


def day_rows(step=15, value=lambda k: 100 + k):
    return [(f"{m // 60:02d}:{m % 60:02d}", value(k)) for k, m in enumerate(range(0, 1440, step))]


def test_full_day_file_is_sliced_to_window(tmp_path):
    path = write_series(tmp_path / "forecast.csv", day_rows())
    values = load_timeseries_csv(path, make_time_grid("16:00", 5, 15))
    assert len(values) == 20
    assert values[0] == 100 + 64
    assert values[-1] == 100 + 83


def test_missing_step_is_named(tmp_path):
    rows = [r for r in day_rows() if r[0] != "17:15"]
    path = write_series(tmp_path / "forecast.csv", rows)
    with pytest.raises(TimeSeriesFormatError, match="missing timestamp 17:15"):
        load_timeseries_csv(path, make_time_grid("16:00", 5, 15))


def test_finer_resolution_is_an_alignment_error(tmp_path):
    path = write_series(tmp_path / "forecast.csv", day_rows(step=5))
    with pytest.raises(TimeSeriesFormatError, match="not aligned") as info:
        load_timeseries_csv(path, make_time_grid("16:00", 5, 15))
    assert any(p.startswith("line ") for p in info.value.problems)


def test_duplicates_and_bad_values_report_line_numbers(tmp_path):
    rows = day_rows()
    rows.insert(70, ("17:15", 5))
    rows[66] = ("16:30", "abc")
    path = write_series(tmp_path / "forecast.csv", rows)
    with pytest.raises(TimeSeriesFormatError) as info:
        load_timeseries_csv(path, make_time_grid("16:00", 5, 15))
    problems = "\n".join(info.value.problems)
    assert "line 68: non-numeric value 'abc'" in problems
    assert "duplicate timestamp 17:15" in problems


def test_bad_header_and_missing_file(tmp_path):
    path = tmp_path / "prices.csv"
    path.write_text("clock,price\n16:00,1\n")
    with pytest.raises(TimeSeriesFormatError, match="header"):
        load_timeseries_csv(path, make_time_grid("16:00", 0.25, 15))
    with pytest.raises(TimeSeriesFormatError, match="does not exist"):
        load_timeseries_csv(tmp_path / "nope.csv", make_time_grid("16:00", 0.25, 15))


def test_sample_case2_loads(scenario_dir, case2_scenario):
    scenario = load_scenario(scenario_dir / "case2" / "scenario.cfg")
    assert scenario.name == "case2"
    assert scenario.grid.steps == 20
    assert scenario.edr.incentive_price == pytest.approx((0.2,) * 20)
    assert scenario.forecast.forecast == pytest.approx(case2_scenario.forecast.forecast)
    assert scenario.prices.grid_price == pytest.approx(case2_scenario.prices.grid_price)
    assert scenario.bes == case2_scenario.bes


def test_sample_case1_matches_fixture(scenario_dir, case1_scenario):
    scenario = load_scenario(scenario_dir / "case1" / "scenario.cfg")
    assert scenario.forecast.forecast == pytest.approx(case1_scenario.forecast.forecast)
    assert scenario.prices.grid_price == pytest.approx(case1_scenario.prices.grid_price)
    assert scenario.edr.notification_time == case1_scenario.edr.notification_time


def copy_case(scenario_dir, tmp_path, replace=None):
    target = tmp_path / "case"
    shutil.copytree(scenario_dir / "case2", target)
    config = target / "scenario.cfg"
    text = config.read_text()
    for old, new in (replace or {}).items():
        assert old in text
        text = text.replace(old, new)
    config.write_text(text)
    return config


def test_swapped_efficiencies_name_the_bes(scenario_dir, tmp_path):
    config = copy_case(scenario_dir, tmp_path, {
        "bes.discharge_eff = 1.15": "bes.discharge_eff = 0.85",
        "bes.charge_eff = 0.85": "bes.charge_eff = 1.15",
    })
    with pytest.raises(ScenarioConfigError) as info:
        load_scenario(config)
    assert info.value.field == "bes"
    assert "discharge_eff" in str(info.value)


def test_initial_soc_above_max_is_reported(scenario_dir, tmp_path):
    config = copy_case(scenario_dir, tmp_path, {"bes.initial_soc = 0.85": "bes.initial_soc = 0.9"})
    with pytest.raises(ScenarioConfigError, match="initial_soc"):
        load_scenario(config)


def test_event_start_must_follow_decision_window(scenario_dir, tmp_path):
    config = copy_case(scenario_dir, tmp_path, {"edr.event_start = 16:00": "edr.event_start = 16:30",
                                                "edr.event_end = 21:00": "edr.event_end = 21:30"})
    with pytest.raises(ScenarioConfigError, match="notification_time"):
        load_scenario(config)


def test_non_numeric_scalar_names_the_key(scenario_dir, tmp_path):
    config = copy_case(scenario_dir, tmp_path,
                       {"station.ev_price_multiplier = 3": "station.ev_price_multiplier = three"})
    with pytest.raises(ScenarioConfigError) as info:
        load_scenario(config)
    assert info.value.field == "station.ev_price_multiplier"


def test_incentive_needs_exactly_one_source(scenario_dir, tmp_path):
    config = copy_case(scenario_dir, tmp_path, {
        "edr.incentive_price_mwh = 200": "edr.incentive_price_mwh = 200\n"
                                         "edr.incentive_price_csv = grid_price.csv",
    })
    with pytest.raises(ScenarioConfigError, match="exactly one"):
        load_scenario(config)


def test_missing_config_file(tmp_path):
    with pytest.raises(ScenarioConfigError, match="does not exist"):
        load_scenario(tmp_path / "absent.cfg")


def test_dump_and_reload(case2_scenario, tmp_path):
    config = dump_scenario(case2_scenario, tmp_path / "dump")
    loaded = load_scenario(config)
    assert loaded.name == case2_scenario.name
    assert loaded.grid == case2_scenario.grid
    assert loaded.bes == case2_scenario.bes
    assert loaded.station == case2_scenario.station
    assert loaded.forecast == case2_scenario.forecast
    assert loaded.edr.notification_time == case2_scenario.edr.notification_time
    assert loaded.edr.min_reduction == case2_scenario.edr.min_reduction
    assert loaded.edr.incentive_price == pytest.approx(case2_scenario.edr.incentive_price)
    assert loaded.prices.grid_price == pytest.approx(case2_scenario.prices.grid_price)


def test_dump_writes_series_files_for_varying_signals(scenario_factory, tmp_path):
    scenario = scenario_factory([300, 280, 260, 240], 0.1, [0.2, 0.25, 0.3, 0.2],
                                [150, 120, 100, 90])
    config = dump_scenario(scenario, tmp_path)
    assert (tmp_path / "incentive_price.csv").exists()
    assert (tmp_path / "min_reduction.csv").exists()
    loaded = load_scenario(config)
    assert loaded.edr.min_reduction == scenario.edr.min_reduction
    assert loaded.edr.incentive_price == pytest.approx(scenario.edr.incentive_price)
