import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from spherequal.cli import loglog_slope, main, sweep_grid, UsageError
from spherequal.report import load_schema

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("SPHEREQUAL_UPDATE_GOLDEN") == "1"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def check_golden(name, text):
    path = GOLDEN / name
    if UPDATE:
        path.write_text(text, encoding="utf-8", newline="\n")
    assert path.read_text(encoding="utf-8") == text


@pytest.fixture
def antipodal_file(tmp_path):
    path = tmp_path / "anti.csv"
    path.write_text("# d=2\n0,0,1\n0,0,-1\n")
    return path


class TestGen:
    def test_fibonacci_file(self, tmp_path, capsys):
        out = tmp_path / "p.csv"
        code, _, _ = run(["gen", "--kind", "fibonacci", "--d", "2", "--n", "100", "--out", str(out)],
                         capsys)
        assert code == 0
        assert len(out.read_text().splitlines()) == 101

    def test_constraint_is_usage_error(self, capsys):
        code, _, err = run(["gen", "--kind", "fibonacci", "--d", "3"], capsys)
        assert code == 2
        assert "fibonacci requires d=2" in err

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert run(["gen", "--kind", "random", "--d", "2", "--n", "10", "--seed", "7",
                        "--out", str(p)], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_golden(self, capsys):
        code, out, _ = run(["gen", "--kind", "fibonacci", "--n", "8"], capsys)
        assert code == 0
        check_golden("gen_fibonacci_8.csv", out)

    def test_bad_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["gen", "--kind", "nope"])
        assert info.value.code == 2

    def test_unwritable_output(self, tmp_path, capsys):
        code, _, _ = run(["gen", "--kind", "antipodal", "--out", str(tmp_path / "no" / "x.csv")],
                         capsys)
        assert code == 1


class TestAnalyze:
    def test_antipodal_json(self, antipodal_file, capsys):
        code, out, _ = run(["analyze", str(antipodal_file)], capsys)
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, load_schema("analyze"))
        assert doc["schema_version"] == 1
        assert doc["sum_of_distances"] == 1.0
        assert doc["wce"] == pytest.approx((1 / 12) ** 0.5, abs=1e-14)
        assert "timing" not in doc

    def test_single_point(self, tmp_path, capsys):
        p = tmp_path / "one.csv"
        p.write_text("# d=2\n1,0,0\n")
        doc = json.loads(run(["analyze", str(p)], capsys)[1])
        assert doc["energy_gap"] == pytest.approx(4 / 3, abs=1e-10)

    def test_full_json_validates(self, capsys):
        code, out, _ = run(["analyze", "--kind", "random", "--n", "12", "--weight", "one",
                            "--weight", "poly:2,1", "--mc-samples", "4000", "--nodes", "32",
                            "--timing"], capsys)
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, load_schema("analyze"))
        assert len(doc["mc_checks"]) == 3 and "timing" in doc

    @pytest.mark.parametrize("fmt", ["text", "csv"])
    def test_golden(self, fmt, antipodal_file, capsys):
        code, out, _ = run(["analyze", str(antipodal_file), "--format", fmt, "--weight", "one",
                            "--nodes", "32"], capsys)
        assert code == 0
        check_golden(f"analyze_antipodal.{fmt}", out)

    def test_parse_error(self, tmp_path, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("# d=2\n1,0,0\n1,0\n")
        code, _, err = run(["analyze", str(p)], capsys)
        assert code == 1
        assert "line 3" in err

    def test_missing_file(self, tmp_path, capsys):
        assert run(["analyze", str(tmp_path / "nothing.csv")], capsys)[0] == 1

    def test_source_flags(self, antipodal_file, capsys):
        assert run(["analyze"], capsys)[0] == 2
        assert run(["analyze", str(antipodal_file), "--kind", "antipodal"], capsys)[0] == 2
        assert run(["analyze", "--kind", "random"], capsys)[0] == 2
        assert run(["analyze", "--kind", "antipodal", "--weight", "poly:x"], capsys)[0] == 2

    def test_out_file(self, tmp_path, antipodal_file, capsys):
        out = tmp_path / "r.json"
        code, stdout, _ = run(["analyze", str(antipodal_file), "--out", str(out)], capsys)
        assert code == 0 and stdout == ""
        assert json.loads(out.read_text())["n"] == 2

    def test_renormalize_flag(self, tmp_path, capsys):
        p = tmp_path / "r.csv"
        p.write_text("# d=2\n1.0000005,0,0\n")
        assert run(["analyze", str(p)], capsys)[0] == 1
        assert run(["analyze", str(p), "--renormalize"], capsys)[0] == 0


class TestVerify:
    def test_passes_and_flags_appendix(self, capsys):
        code, out, _ = run(["verify", "--kind", "random", "--n", "30", "--mc-samples", "20000",
                            "--seed", "1", "--weight", "one", "--nodes", "32"], capsys)
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, load_schema("verify"))
        assert all(abs(c["z_score"]) <= 3 for c in doc["checks"])
        app = doc["appendix"]
        assert app["mismatch"] and app["severity"] == "info"
        assert app["kernel_mean"] == pytest.approx(2 / 3, abs=1e-10)
        assert app["appendix_variant"] == pytest.approx(0.5, abs=1e-10)

    def test_strict_appendix(self, capsys):
        code, out, _ = run(["verify", "--kind", "antipodal", "--mc-samples", "2000",
                            "--strict-appendix"], capsys)
        assert code == 3
        assert json.loads(out)["appendix"]["severity"] == "error"

    def test_too_few_samples(self, capsys):
        assert run(["verify", "--kind", "antipodal", "--mc-samples", "999"], capsys)[0] == 2

    def test_failure_exit_code(self, capsys, monkeypatch):
        import spherequal.cli as cli
        from spherequal.quality import Residual
        monkeypatch.setattr(cli, "invariance_residual", lambda *a, **k: Residual(1.0, 0.01))
        assert run(["verify", "--kind", "antipodal", "--mc-samples", "2000"], capsys)[0] == 3

    def test_corrupt_input(self, tmp_path, capsys):
        p = tmp_path / "c.csv"
        p.write_text("# d=2\n0.5,zz,1\n")
        assert run(["verify", str(p)], capsys)[0] == 1

    def test_golden_text(self, antipodal_file, capsys):
        code, out, _ = run(["verify", str(antipodal_file), "--mc-samples", "5000", "--seed", "3",
                            "--format", "text"], capsys)
        assert code == 0
        check_golden("verify_antipodal.txt", out)


class TestWeighted:
    def test_json(self, capsys):
        code, out, _ = run(["weighted", "--kind", "random", "--n", "8", "--weight", "one",
                            "--weight", "poly:1,0,1", "--nodes", "32", "--mc-samples", "5000"],
                           capsys)
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, load_schema("weighted"))
        one = doc["weights"][0]
        assert one["weighted_wce"] == pytest.approx(doc["wce"], abs=1e-7)
        assert one["route_check"]["agree"]

    def test_requires_weight(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["weighted", "--kind", "antipodal"])
        assert info.value.code == 2

    def test_d1_is_usage_error(self, capsys):
        assert run(["weighted", "--kind", "antipodal", "--d", "1", "--weight", "one"], capsys)[0] == 2

    def test_golden_csv(self, capsys):
        code, out, _ = run(["weighted", "--kind", "cross_polytope", "--weight", "poly:1,0,1",
                            "--nodes", "32", "--mc-samples", "0", "--format", "csv"], capsys)
        assert code == 0
        check_golden("weighted_cross_polytope.csv", out)


class TestSweep:
    def test_grid(self):
        assert sweep_grid(16, 100, 2) == [16, 32, 64]
        assert sweep_grid(5, 5, 1) == [5]
        with pytest.raises(UsageError):
            sweep_grid(10, 5, 2)
        with pytest.raises(UsageError):
            sweep_grid(10, 50, 1)

    def test_slope(self):
        assert loglog_slope([1, 2, 4], [1.0, 0.5, 0.25]) == pytest.approx(-1.0)
        assert loglog_slope([8], [0.1]) is None
        assert loglog_slope([1, 2], [0.0, 1.0]) is None

    def test_single_row(self, capsys):
        code, out, _ = run(["sweep", "--kind", "fibonacci", "--n-min", "32", "--n-max", "32"], capsys)
        doc = json.loads(out)
        jsonschema.validate(doc, load_schema("sweep"))
        assert code == 0 and len(doc["rows"]) == 1
        assert doc["slope"] is None and doc["slope_available"] is False

    def test_fibonacci_slope(self, capsys):
        doc = json.loads(run(["sweep", "--kind", "fibonacci", "--n-max", "1024"], capsys)[1])
        assert -0.85 <= doc["slope"] <= -0.65

    def test_fixed_size_kind_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["sweep", "--kind", "simplex"])

    def test_golden_text(self, capsys):
        code, out, _ = run(["sweep", "--kind", "fibonacci", "--n-min", "4", "--n-max", "64",
                            "--format", "text"], capsys)
        assert code == 0
        check_golden("sweep_fibonacci.txt", out)


class TestDeterminism:
    ARGS = [
        ["analyze", "--kind", "random", "--n", "40", "--weight", "poly:1,0,1", "--nodes", "32",
         "--mc-samples", "30000", "--seed", "5"],
        ["verify", "--kind", "random", "--n", "25", "--mc-samples", "30000", "--seed", "2",
         "--weight", "poly:2,1", "--nodes", "32"],
        ["weighted", "--kind", "random", "--n", "9", "--weight", "one", "--nodes", "32",
         "--mc-samples", "30000"],
        ["sweep", "--kind", "random", "--n-max", "512", "--seed", "4"],
    ]

    @pytest.mark.parametrize("argv", ARGS, ids=[a[0] for a in ARGS])
    def test_runs_and_workers(self, argv, capsys):
        outs = set()
        for workers in ("1", "1", "3", "8"):
            code, out, _ = run(argv + ["--workers", workers], capsys)
            assert code == 0
            outs.add(out)
        assert len(outs) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "spherequal", "gen", "--kind", "antipodal"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# d=2\n")
