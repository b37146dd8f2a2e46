import json

import numpy as np
import pytest

from midist.cli import main


@pytest.fixture
def table_file(tmp_path):
    path = tmp_path / "table.json"
    path.write_text(json.dumps({"r": 2, "s": 2, "counts": [[40, 10], [20, 80]]}))
    return str(path)


@pytest.fixture
def csv_file(tmp_path):
    rng = np.random.default_rng(0)
    lines = ["a,b,cls"]
    for _ in range(60):
        cls = rng.integers(2)
        a = cls if rng.random() > 0.1 else 1 - cls
        lines.append(f"{a},{rng.integers(2)},{cls}")
    path = tmp_path / "data.csv"
    path.write_text("\n".join(str(x) for x in lines) + "\n")
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestMi:
    def test_complete_table(self, capsys, table_file):
        code, out, _ = run_cli(capsys, "mi", "--table", table_file, "--prior", "uniform")
        assert code == 0
        payload = json.loads(out)
        assert payload["mode"] == "complete"
        assert payload["mean"] == pytest.approx(0.16623444859500763)
        assert payload["variance"] == pytest.approx(0.0017437020467238832)

    def test_dist_report(self, capsys, table_file):
        code, out, _ = run_cli(
            capsys, "mi", "--table", table_file, "--prior", "uniform", "--dist", "beta"
        )
        payload = json.loads(out)
        dist = payload["dist"]
        assert code == 0 and dist["family"] == "beta"
        assert 0.0 <= dist["prob_exceeds_epsilon"] <= 1.0
        assert dist["quantile_05"] < payload["mean"] < dist["quantile_95"]

    def test_missing_margin_routes_automatically(self, capsys, tmp_path):
        path = tmp_path / "missing.json"
        path.write_text(
            json.dumps(
                {"r": 2, "s": 2, "counts": [[8, 2], [4, 16]], "missing_class": [3, 5]}
            )
        )
        code, out, _ = run_cli(capsys, "mi", "--table", str(path), "--prior", "uniform")
        assert code == 0
        assert json.loads(out)["mode"] == "missing_class"

    def test_input_error_exit_code(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "mi", "--table", str(path))
        assert code == 1 and "error" in err

    def test_numerical_error_exit_code(self, capsys, tmp_path):
        path = tmp_path / "zero.json"
        path.write_text(json.dumps({"r": 2, "s": 2, "counts": [[1, 0], [0, 1]]}))
        code, _, err = run_cli(capsys, "mi", "--table", str(path), "--prior", "haldane")
        assert code == 2 and "zero-cell" in err

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "mi", "--table", "/nonexistent.json")
        assert code == 1

    def test_bad_flag_exits_one(self, capsys, table_file):
        code, _, _ = run_cli(capsys, "mi", "--table", table_file, "--prior", "flat")
        assert code == 1


class TestMc:
    def test_summary_and_fit(self, capsys, table_file):
        code, out, _ = run_cli(
            capsys,
            "mc", "--table", table_file, "--prior", "uniform",
            "--samples", "20000", "--seed", "7", "--fit", "beta",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["sample_count"] == 20000
        assert payload["mean"] == pytest.approx(0.166, abs=0.01)
        assert 0.0 <= payload["ks_distance"] <= 0.05

    def test_deterministic_across_invocations(self, capsys, table_file):
        args = ["mc", "--table", table_file, "--prior", "uniform", "--samples", "5000", "--seed", "3"]
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2

    def test_dump_little_endian_doubles(self, capsys, table_file, tmp_path):
        dump = tmp_path / "draws.bin"
        code, _, _ = run_cli(
            capsys,
            "mc", "--table", table_file, "--prior", "uniform",
            "--samples", "1000", "--seed", "3", "--dump", str(dump),
        )
        assert code == 0
        raw = np.frombuffer(dump.read_bytes(), dtype="<f8")
        assert raw.size == 1000
        assert np.all(np.diff(raw) >= 0)  # stored sorted


class TestSelect:
    def test_decisions_then_kept_set(self, capsys, csv_file):
        code, out, _ = run_cli(capsys, "select", "--data", csv_file, "--filter", "ff")
        assert code == 0
        lines = out.strip().splitlines()
        decisions = [json.loads(line) for line in lines[:-1]]
        kept = json.loads(lines[-1])
        assert len(decisions) == 2
        assert {d["attribute"] for d in decisions} == {"a", "b"}
        assert kept["filter"] == "ff"
        assert "a" in kept["kept"] and "b" not in kept["kept"]

    def test_zero_epsilon_rejected_for_ff(self, capsys, csv_file):
        code, _, err = run_cli(
            capsys, "select", "--data", csv_file, "--filter", "ff", "--epsilon", "0"
        )
        assert code == 1 and "epsilon" in err

    def test_custom_prior_weight(self, capsys, csv_file):
        code, out, _ = run_cli(
            capsys,
            "select", "--data", csv_file, "--filter", "f",
            "--prior", "custom", "--prior-weight", "0.5",
        )
        assert code == 0
        assert json.loads(out.strip().splitlines()[-1])["kept"]

    def test_custom_prior_requires_weight(self, capsys, csv_file):
        code, _, err = run_cli(
            capsys, "select", "--data", csv_file, "--filter", "f", "--prior", "custom"
        )
        assert code == 1 and "prior-weight" in err


class TestRun:
    def test_csv_report(self, capsys, csv_file, tmp_path):
        out_path = tmp_path / "report.csv"
        code, out, _ = run_cli(
            capsys,
            "run", "--data", csv_file, "--seed", "5", "--out", str(out_path),
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["instances"] == 60
        assert set(summary["final_accuracy"]) == {"f", "ff", "bf"}
        assert len(out_path.read_text().strip().splitlines()) == 61

    def test_keep_missing_mode(self, capsys, tmp_path):
        rng = np.random.default_rng(2)
        lines = ["a,b,cls"]
        for i in range(40):
            cls = rng.integers(2)
            a = "?" if i % 9 == 0 else str(cls)
            lines.append(f"{a},{rng.integers(2)},{cls}")
        src = tmp_path / "gaps.csv"
        src.write_text("\n".join(lines) + "\n")
        out_path = tmp_path / "report.csv"
        code, out, _ = run_cli(
            capsys,
            "run", "--data", str(src), "--seed", "2", "--missing", "keep",
            "--out", str(out_path),
        )
        assert code == 0
        assert json.loads(out)["instances"] == 40  # feature gaps retained

    def test_json_report_round_trips_through_ttest(self, capsys, csv_file, tmp_path):
        out_path = tmp_path / "report.json"
        code, _, _ = run_cli(
            capsys,
            "run", "--data", csv_file, "--filters", "ff,f", "--seed", "5",
            "--out", str(out_path), "--format", "json",
        )
        assert code == 0
        code, out, _ = run_cli(capsys, "ttest", "--report", str(out_path), "--pair", "ff,f")
        assert code == 0
        payload = json.loads(out)
        assert payload["pair"] == "ff,f" and payload["k"] == 60
        assert isinstance(payload["significant"], bool)

    def test_ttest_unknown_filter(self, capsys, csv_file, tmp_path):
        out_path = tmp_path / "report.json"
        run_cli(capsys, "run", "--data", csv_file, "--filters", "f", "--seed", "1",
                "--out", str(out_path), "--format", "json")
        code, _, err = run_cli(capsys, "ttest", "--report", str(out_path), "--pair", "ff,f")
        assert code == 1 and "ff" in err


class TestDiscretize:
    def test_numeric_columns_binned(self, capsys, tmp_path):
        src = tmp_path / "numeric.csv"
        rows = ["x,y,cls"] + [f"{i},{'m' if i % 2 else 'n'},{i % 2}" for i in range(1, 101)]
        src.write_text("\n".join(rows) + "\n")
        out_path = tmp_path / "binned.csv"
        code, _, _ = run_cli(
            capsys, "discretize", "--data", str(src), "--bins", "4", "--out", str(out_path)
        )
        assert code == 0
        lines = out_path.read_text().strip().splitlines()
        assert lines[0] == "x,y,cls"
        cells = [line.split(",") for line in lines[1:]]
        assert {c[0] for c in cells} == {"bin_0", "bin_1", "bin_2", "bin_3"}
        assert {c[1] for c in cells} == {"m", "n"}  # categorical untouched
        assert {c[2] for c in cells} == {"0", "1"}  # class column untouched


def test_no_command_prints_usage(capsys):
    code, _, err = run_cli(capsys)
    assert code == 1 and "usage" in err
