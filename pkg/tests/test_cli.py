"""CLI subcommands, exit codes, and output files."""

import json

import pytest

import memforage as mf
from memforage.cli import (
    EXIT_INCOMPLETE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VALIDATION,
    main,
)


def run_cli(*argv):
    return main(list(argv))


class TestUsageErrors:
    def test_no_arguments(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli()
        assert exc.value.code == EXIT_USAGE

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("harvest")
        assert exc.value.code == EXIT_USAGE

    def test_run_requires_strategy(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("run", "--preset", "rich")
        assert exc.value.code == EXIT_USAGE

    def test_scenario_sources_mutually_exclusive(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(
                "run", "--preset", "rich", "--scenario", "x.json",
                "--strategy", "all-sites",
            )
        assert exc.value.code == EXIT_USAGE

    def test_bad_scenario_file_is_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        code = run_cli("run", "--scenario", str(bad), "--strategy", "all-sites")
        assert code == EXIT_USAGE
        assert "error" in capsys.readouterr().err


class TestPresetsCommand:
    def test_lists_environments(self, capsys):
        assert run_cli("presets") == EXIT_OK
        out = capsys.readouterr().out
        assert "rich" in out and "poor" in out
        assert "site1=1" in out


class TestRunCommand:
    def test_completed_run_writes_outputs(self, tmp_path, capsys):
        out_csv = tmp_path / "trace.csv"
        out_json = tmp_path / "summary.json"
        code = run_cli(
            "run", "--preset", "rich", "--strategy", "all-sites",
            "--dt", "0.01", "--out", str(out_csv), "--summary", str(out_json),
        )
        assert code == EXIT_OK
        stdout = capsys.readouterr().out
        assert "depleted at t=" in stdout
        assert "site depletion times" in stdout
        assert "milestones" in stdout
        assert out_csv.read_text().splitlines()[-1].split(",")[3] == "1.000000000"
        doc = json.loads(out_json.read_text())
        assert doc["summary"]["completed"] is True
        assert doc["environment"]["name"] == "rich"

    def test_leafcutter_prints_phase_times(self, capsys):
        code = run_cli(
            "run", "--preset", "rich", "--strategy", "leafcutter", "--dt", "0.01"
        )
        assert code == EXIT_OK
        out = capsys.readouterr().out
        # best site depletes near t=20, total near 81.8 (coarse dt here)
        assert "site3: 19.9" in out
        assert "depleted at t=81.7" in out
        # two phases: ~20 alone on the best site, ~61.8 for the remainder
        assert "phase durations: 19.9" in out
        assert "+ 61.7" in out

    def test_incomplete_run_exit_code(self, capsys):
        code = run_cli(
            "run", "--preset", "rich", "--strategy", "all-sites",
            "--dt", "0.01", "--max-steps", "10",
        )
        assert code == EXIT_INCOMPLETE
        assert "INCOMPLETE" in capsys.readouterr().out

    def test_seq_mode_flag(self, capsys):
        code = run_cli(
            "run", "--preset", "rich", "--strategy", "sequential",
            "--seq-mode", "shared-series", "--dt", "0.01",
        )
        assert code == EXIT_OK
        assert "sequential[shared-series]" in capsys.readouterr().out


class TestCompareCommand:
    def test_report_shows_divergence(self, capsys, tmp_path):
        out_json = tmp_path / "cmp.json"
        code = run_cli(
            "compare", "--preset", "rich", "--dt", "0.01", "--summary", str(out_json)
        )
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "expected-ordering checks:" in out
        assert "DISAGREE" in out
        assert "AGREE" in out
        doc = json.loads(out_json.read_text())
        assert len(doc["summaries"]) == 4
        verdicts = {r["claim"]: r["verdict"] for r in doc["relations"]}
        assert (
            verdicts["sequential[parallel-residual] slower than all-sites to full depletion"]
            == "DISAGREE"
        )


class TestValidateCommand:
    def test_default_invocation_all_pass(self, capsys):
        code = run_cli("validate")
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("PASS") == 13  # 8 cases + 4 scaling rows + verdict
        assert "FAIL" not in out
        assert "validation: PASS" in out

    def test_coarse_dt_fails_with_table(self, capsys):
        code = run_cli("validate", "--dt", "1.0")
        assert code == EXIT_VALIDATION
        out = capsys.readouterr().out
        assert "FAIL" in out
        assert "validation: FAIL" in out


class TestPlotCommand:
    def test_single_strategy_voltage_chart(self, tmp_path, capsys):
        svg = tmp_path / "volts.svg"
        code = run_cli(
            "plot", "--preset", "rich", "--strategy", "all-sites",
            "--dt", "0.01", "--svg", str(svg),
        )
        assert code == EXIT_OK
        text = svg.read_text()
        assert text.startswith("<?xml")
        assert "svg" in text

    def test_multi_strategy_cumulative_chart(self, tmp_path):
        svg = tmp_path / "cmp.svg"
        code = run_cli("plot", "--preset", "poor", "--dt", "0.01", "--svg", str(svg))
        assert code == EXIT_OK
        assert svg.exists()

    def test_incomplete_run_rejected(self, tmp_path, capsys):
        svg = tmp_path / "nope.svg"
        code = run_cli(
            "plot", "--preset", "rich", "--strategy", "all-sites",
            "--dt", "0.01", "--max-steps", "10", "--svg", str(svg),
        )
        assert code == EXIT_INCOMPLETE
        assert not svg.exists()
