"""Command-line surface: exit codes, CSV schema, JSON records, reproducibility."""

from __future__ import annotations

import csv
import json
import math

import pytest

from bellopt.cli import CSV_HEADER, load_json, main


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


class TestExitCodes:
    def test_lhv_bound_prints_one(self, capsys):
        assert main(["lhv-bound", "--c", "5"]) == 0
        assert capsys.readouterr().out.strip() == "1.000000"

    def test_negative_weight_is_usage_error(self):
        assert main(["maximize", "--c", "-1", "--starts", "5"]) == 2

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(["maximize", "--c", "3", "--no-such-flag"]) == 2

    def test_unknown_command_is_usage_error(self, capsys):
        assert main(["discombobulate"]) == 2

    def test_numerical_failure_exit(self, tmp_path, capsys):
        # no violation exists at weight 1/2, so the minimization has no result
        code = main(["efficiency", "--c", "0.5", "--starts", "60",
                     "--max-iters", "300", "--seed", "3"])
        assert code == 3


class TestMaximizeCommand:
    def test_writes_reproducible_record(self, tmp_path, capsys):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        args = ["maximize", "--c", "3", "--phi-plus", "--class", "general",
                "--starts", "120", "--max-iters", "600", "--seed", "7"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        a, b = load_json(str(out1)), load_json(str(out2))
        assert a["payload"] == b["payload"]  # bit-identical payloads
        assert a["seed"] == 7
        assert a["payload"]["best_value"] >= 1.0 - 1e-3
        assert a["payload"]["scenario"]["alice2"]["m0"][0][1]["im"] is not None

    def test_round_trip_identity(self, tmp_path):
        out = tmp_path / "run.json"
        assert main(["maximize", "--c", "2", "--ratio", "0.8", "--class", "r10",
                     "--starts", "40", "--max-iters", "300", "--seed", "5",
                     "--out", str(out)]) == 0
        first = load_json(str(out))
        with open(out, encoding="utf-8") as handle:
            assert json.load(handle) == first


class TestSweepCommands:
    def test_csv_schema_and_order(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(["sweep-ratio", "--from", "0.5", "--to", "1.0", "--step", "0.25",
                     "--c", "3", "--class", "r10", "--starts", "40",
                     "--max-iters", "300", "--seed", "9", "--out", str(out)]) == 0
        rows = read_csv(str(out))
        assert rows[0] == CSV_HEADER
        assert len(rows) == 4  # header + three grid points
        ratios = [float(r[1]) for r in rows[1:]]
        assert ratios == pytest.approx([0.5, 0.75, 1.0])
        assert all(r[2] == "r10" for r in rows[1:])
        # nine significant digits on floats
        value = rows[1][3]
        assert len(value.replace(".", "").replace("-", "").lstrip("0")) <= 9

    def test_sweep_c_grid(self, tmp_path):
        out = tmp_path / "sweep_c.csv"
        assert main(["sweep-c", "--from", "1", "--to", "2", "--step", "0.5",
                     "--ratio", "1.0", "--class", "r00", "--starts", "30",
                     "--max-iters", "300", "--seed", "3", "--out", str(out)]) == 0
        rows = read_csv(str(out))
        assert [float(r[0]) for r in rows[1:]] == pytest.approx([1.0, 1.5, 2.0])

    def test_unused_columns_left_empty(self, tmp_path):
        out = tmp_path / "sweep.csv"
        main(["sweep-ratio", "--from", "1.0", "--to", "1.0", "--step", "1.0",
              "--c", "3", "--class", "r00", "--starts", "20",
              "--max-iters", "200", "--seed", "1", "--out", str(out)])
        rows = read_csv(str(out))
        row = dict(zip(CSV_HEADER, rows[1]))
        assert row["eta_crit"] == ""
        assert row["p09"] == ""   # rank-free classes carry only eight angles
        assert row["p16"] == ""
        assert row["p01"] != ""


class TestSeedResolution:
    def test_environment_seed(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("BELLOPT_SEED", "123")
        out = tmp_path / "run.json"
        assert main(["maximize", "--c", "1", "--class", "r00", "--starts", "20",
                     "--max-iters", "200", "--out", str(out)]) == 0
        assert load_json(str(out))["seed"] == 123

    def test_config_file_defaults_and_flag_override(self, tmp_path):
        cfg = tmp_path / "bellopt.cfg"
        cfg.write_text("starts = 25\nseed = 55\n")
        out = tmp_path / "run.json"
        assert main(["maximize", "--c", "1", "--class", "r00", "--max-iters", "200",
                     "--config", str(cfg), "--out", str(out)]) == 0
        record = load_json(str(out))
        assert record["seed"] == 55
        # explicit flag wins over the file
        assert main(["maximize", "--c", "1", "--class", "r00", "--max-iters", "200",
                     "--config", str(cfg), "--seed", "77", "--out", str(out)]) == 0
        assert load_json(str(out))["seed"] == 77


class TestEfficiencyCommand:
    def test_record_surfaces_both_formulations(self, tmp_path):
        out = tmp_path / "eff.json"
        assert main(["efficiency", "--c", "100", "--ratio", "1.0", "--starts", "200",
                     "--max-iters", "1000", "--seed", "5", "--out", str(out)]) == 0
        payload = load_json(str(out))["payload"]
        assert payload["eta_crit"] == pytest.approx(0.8348, abs=5e-3)
        assert payload["eta_crit_root"] is not None
        assert payload["ratio_root_gap"] is not None


class TestVerifyCommand:
    def test_oracle_suite_passes(self, capsys):
        code = main(["verify", "--seed", "1", "--samples", "4000",
                     "--starts", "120", "--max-iters", "700"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.count("PASS") == 5
        assert "FAIL" not in out


class TestFigureCommand:
    def test_figure_one_series(self, tmp_path):
        out = tmp_path / "fig1.csv"
        assert main(["figure", "--id", "1", "--from", "3", "--to", "4", "--step", "1",
                     "--starts", "60", "--max-iters", "400", "--seed", "11",
                     "--out", str(out)]) == 0
        rows = read_csv(str(out))
        assert rows[0] == CSV_HEADER
        classes = {r[2] for r in rows[1:]}
        assert classes == {"general", "i10-formula", "vb-lower-bound"}
        # values pass through the nine-significant-digit CSV format
        by_class = {r[2]: float(r[3]) for r in rows[1:] if float(r[0]) == 3.0}
        assert by_class["i10-formula"] == pytest.approx(1.0, abs=1e-8)
        assert by_class["vb-lower-bound"] == pytest.approx(
            3 * (math.sqrt(2) - 1) / 2 + 0.3788, abs=1e-8)

    def test_figure_thirteen_reference_rows(self, tmp_path):
        out = tmp_path / "fig13.csv"
        assert main(["figure", "--id", "13", "--from", "50", "--to", "100",
                     "--step", "50", "--starts", "150", "--max-iters", "800",
                     "--seed", "4", "--out", str(out)]) == 0
        rows = read_csv(str(out))
        refs = [float(r[3]) for r in rows[1:] if r[2] == "ich-reference"]
        assert refs == pytest.approx([2 * (math.sqrt(2) - 1)] * 2)
        etas = [float(r[4]) for r in rows[1:] if r[2] == "general"]
        assert all(e > 0.8 for e in etas)
