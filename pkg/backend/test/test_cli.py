# backend/test/test_cli.py

import pandas as pd
import pytest
from app.cli import EXIT_ERROR, EXIT_INFEASIBLE, EXIT_NONPARTICIPATE, EXIT_PARTICIPATE, cli, main
from app.services.decision_engine import DecisionEngine
from app.services.reports import money
from app.services.scenario_loader import dump_scenario
from click.testing import CliRunner


@pytest.fixture
def runner():
    return CliRunner()


def case_config(scenario_dir, name):
    return str(scenario_dir / name / "scenario.cfg")


def test_case2_participates(runner, scenario_dir, tmp_path):
    out = tmp_path / "case2"
    result = runner.invoke(cli, ["decide", "--scenario", case_config(scenario_dir, "case2"),
                                 "--out", str(out)])
    assert result.exit_code == EXIT_PARTICIPATE, result.output
    report = (out / "report.txt").read_text()
    assert "Participation" in report
    assert (out / "summary.csv").exists()
    assert (out / "schedule.csv").exists()
    assert (out / "metadata.json").exists()


def test_case1_report_shows_pinned_edr_income(runner, scenario_dir, tmp_path):
    out = tmp_path / "case1"
    result = runner.invoke(cli, ["decide", "--scenario", case_config(scenario_dir, "case1"),
                                 "--out", str(out), "--format", "text"])
    assert result.exit_code == EXIT_NONPARTICIPATE, result.output
    report = (out / "report.txt").read_text()
    assert "Nonparticipation" in report
    assert "$56.25" in report
    assert not (out / "summary.csv").exists()


def test_reports_are_byte_identical(runner, scenario_dir, tmp_path):
    for run in ("a", "b"):
        runner.invoke(cli, ["decide", "--scenario", case_config(scenario_dir, "case2"),
                            "--out", str(tmp_path / run)])
    for name in ("report.txt", "summary.csv", "schedule.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_summary_rows_follow_breakdown_table(runner, scenario_dir, tmp_path):
    runner.invoke(cli, ["decide", "--scenario", case_config(scenario_dir, "case2"),
                        "--out", str(tmp_path), "--format", "csv"])
    summary = pd.read_csv(tmp_path / "summary.csv")
    assert list(summary["index"])[0] == "Station profit"
    assert list(summary["index"])[-1] == "Decision of EDR participation"
    assert summary["with_edr"].iloc[-1] == "Participation"


def test_emitted_schedule_validates(runner, scenario_dir, tmp_path):
    config = case_config(scenario_dir, "case2")
    runner.invoke(cli, ["decide", "--scenario", config, "--out", str(tmp_path)])
    schedule = pd.read_csv(tmp_path / "schedule.csv")
    assert list(schedule.columns) == [
        "time", "grid_load_kw", "ev_served_kw", "bes_discharge_kw", "bes_charge_kw",
        "mode_dis", "mode_ch", "soc", "reduction_kw",
    ]
    result = runner.invoke(cli, ["validate", "--scenario", config,
                                 "--schedule", str(tmp_path / "schedule.csv")])
    assert result.exit_code == 0, result.output
    assert "schedule is feasible" in result.output


def test_validate_reports_tampered_schedule(runner, scenario_dir, tmp_path):
    config = case_config(scenario_dir, "case2")
    runner.invoke(cli, ["decide", "--scenario", config, "--out", str(tmp_path)])
    schedule = pd.read_csv(tmp_path / "schedule.csv", dtype={"time": str})
    schedule.loc[0, "ev_served_kw"] = 5000.0
    schedule.to_csv(tmp_path / "tampered.csv", index=False)
    result = runner.invoke(cli, ["validate", "--scenario", config,
                                 "--schedule", str(tmp_path / "tampered.csv")])
    assert result.exit_code == 1
    assert "demand bound at step 0" in result.output


def test_infeasible_requirement_exit_code(runner, scenario_factory, tmp_path):
    scenario = scenario_factory([100, 300, 300, 300], 0.1, 0.2, 150)
    config = dump_scenario(scenario, tmp_path / "infeasible")
    result = runner.invoke(cli, ["decide", "--scenario", str(config), "--out",
                                 str(tmp_path / "out")])
    assert result.exit_code == EXIT_INFEASIBLE, result.output
    assert "infeasible" in (tmp_path / "out" / "report.txt").read_text()


def test_bad_scenario_is_an_error(runner, tmp_path):
    result = runner.invoke(cli, ["decide", "--scenario", str(tmp_path / "missing.cfg"),
                                 "--out", str(tmp_path)])
    assert result.exit_code == EXIT_ERROR


def test_oracle_flag_adds_gap_section(runner, scenario_factory, tmp_path):
    scenario = scenario_factory([300, 280, 260, 240], [0.15, 0.12, 0.09, 0.08], 0.2, 100.0)
    config = dump_scenario(scenario.with_capacity(40), tmp_path / "small")
    result = runner.invoke(cli, ["decide", "--scenario", str(config), "--out",
                                 str(tmp_path / "out"), "--oracle", "--power-resolution", "1"])
    assert result.exit_code in (EXIT_PARTICIPATE, EXIT_NONPARTICIPATE), result.output
    assert "Oracle check" in (tmp_path / "out" / "report.txt").read_text()


def test_sweep_writes_table_in_input_order(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["sweep", "--scenario", case_config(scenario_dir, "case2"),
                                 "--capacities", "560,0,400,800", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    table = pd.read_csv(tmp_path / "sweep.csv")
    assert list(table["capacity_kwh"]) == [560, 0, 400, 800]
    assert list(table["percent_of_reference"]) == [140, 0, 100, 200]
    assert list(table["saturated"]) == [True, False, False, False]
    assert "BES capacity is saturated" in (tmp_path / "sweep.txt").read_text()


def test_sweep_rejects_garbage_capacities(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["sweep", "--scenario", case_config(scenario_dir, "case2"),
                                 "--capacities", "abc", "--out", str(tmp_path)])
    assert result.exit_code != 0


def test_compare_lists_scenarios_in_order(runner, scenario_dir, tmp_path):
    result = runner.invoke(cli, ["compare",
                                 "--scenario", case_config(scenario_dir, "case1"),
                                 "--scenario", case_config(scenario_dir, "case2"),
                                 "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    table = pd.read_csv(tmp_path / "comparison.csv")
    assert list(table["scenario"]) == ["case1", "case2"]
    assert list(table["participate"]) == [False, True]


def test_main_maps_usage_errors_to_error_exit(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["decide", "--out", str(tmp_path)])
    assert info.value.code == EXIT_ERROR


def test_money_formatting():
    assert money(56.25) == "$56.25"
    assert money(1234.5) == "$1,234.50"
    assert money(-3) == "-$3.00"
    assert money(None) == "n/a"


def test_main_maps_unexpected_failures_to_error_exit(monkeypatch, scenario_dir, tmp_path):
    def broken(self, scenario):
        raise RuntimeError("solver crashed")

    monkeypatch.setattr(DecisionEngine, "decide", broken)
    with pytest.raises(SystemExit) as info:
        main(["decide", "--scenario", case_config(scenario_dir, "case2"), "--out", str(tmp_path)])
    assert info.value.code == EXIT_ERROR
