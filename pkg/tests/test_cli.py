import csv
import io
import json

import pytest

from wnla.cli import CSV_HEADER, PRESETS, SweepSpec, UsageError, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestRun:
    def test_fixed_point_text(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--n", "3", "--eta", "0.5", "--t", "0.5")
        assert code == 0
        assert "gain      = 1\n" in out
        assert "p_success = 0.125\n" in out

    def test_json(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--n", "3", "--eta", "0.2", "--t", "0.3", "--format", "json")
        data = json.loads(out)
        assert code == 0
        assert data["gain"] == pytest.approx(1.842105, abs=1e-6)
        assert len(data["patterns"]) == 8

    def test_bad_n(self, capsys):
        code, out, err = run_cli(capsys, "run", "--n", "1", "--eta", "0.5", "--t", "0.5")
        assert code == 2
        assert out == ""
        assert "error" in err

    def test_argparse_errors_exit_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--n", "three", "--eta", "0.5", "--t", "0.5"])
        assert exc.value.code == 2


class TestVerify:
    def test_small_grid_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--n-max", "3", "--eta-points", "2", "--t-points", "3")
        assert code == 0
        assert "max |sim-formula| < 1e-12" in out

    def test_injected_fault_fails(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--n-max", "3", "--eta-points", "2", "--t-points", "2", "--inject-fault", "bs-sign"
        )
        assert code == 1
        assert "FAIL" in out
        assert "worst at (n, eta, t) = (" in out

    def test_n_max_includes_top(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--n-max", "4", "--eta-points", "2", "--t-points", "2")
        assert code == 0
        assert "grid points: 12" in out


class TestSweep:
    def test_header_and_rows(self, tmp_path, capsys):
        path = tmp_path / "p.csv"
        code, _, _ = run_cli(
            capsys, "sweep", "--quantity", "success_prob", "--n", "3", "4", "--eta", "0.2", "--steps", "5",
            "--out", str(path),
        )
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 2 * 5
        assert lines[3] == "0.5,0.125,success_prob,3,0.2"

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            run_cli(capsys, "preset", "fig6", "--out", str(p))
        assert a.read_bytes() == b.read_bytes()

    def test_include_limits(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--quantity", "gain", "--eta", "0.25", "--steps", "3", "--include-limits")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0
        assert rows[0]["quantity"] == "gain:limit" and float(rows[0]["value"]) == 4.0
        assert rows[-1]["t"] == "1" and rows[-1]["quantity"] == "gain:limit"

    def test_cross_check_rows(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--quantity", "success_prob", "--eta", "0.3", "--steps", "3", "--cross-check")
        rows = list(csv.DictReader(io.StringIO(out)))
        formula = [r for r in rows if r["quantity"] == "success_prob"]
        sim = [r for r in rows if r["quantity"] == "success_prob:sim"]
        assert len(formula) == len(sim) == 3
        for f, s in zip(formula, sim):
            assert float(f["value"]) == pytest.approx(float(s["value"]), rel=1e-10)

    def test_unwritable_path(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "preset", "fig4", "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 2
        assert "cannot write" in err

    def test_twelve_significant_digits(self, capsys):
        _, out, _ = run_cli(capsys, "sweep", "--quantity", "gain", "--eta", "0.3", "--steps", "2", "--start", "0.1", "--stop", "0.2")
        value = out.splitlines()[1].split(",")[1]
        assert value == format(0.9 / (0.3 * 0.9 + 0.7 * 0.1), ".12g")

    @pytest.mark.parametrize("kwargs", [dict(start=0.5, stop=0.4), dict(steps=1), dict(ns=(1,))])
    def test_invalid_sweep_spec(self, kwargs):
        base = dict(quantity="gain", ns=(3,), etas=(0.2,))
        base.update(kwargs)
        with pytest.raises(UsageError):
            SweepSpec(**base)


class TestPresets:
    def test_preset_parameters(self):
        assert PRESETS["fig4"] == ("success_prob", (3, 4, 5, 6), (0.2,))
        assert PRESETS["fig5"] == ("success_prob", (3, 4, 5, 6), (0.8,))
        assert PRESETS["fig6"] == ("success_prob", (3,), (0.2, 0.4, 0.6, 0.8))
        assert PRESETS["fig3"][0] == "gain"

    def test_fig3_crosses_at_one(self, capsys):
        _, out, _ = run_cli(capsys, "preset", "fig3")
        rows = [r for r in csv.DictReader(io.StringIO(out)) if r["t"] == "0.5"]
        assert len(rows) == 4
        assert all(float(r["value"]) == 1.0 for r in rows)


class TestSample:
    ARGS = ("sample", "--n", "3", "--eta", "0.5", "--t", "0.5", "--shots", "20000", "--seed", "3")

    def test_report(self, capsys):
        code, out, _ = run_cli(capsys, *self.ARGS)
        assert code == 0
        assert "P_hat" in out and "z =" in out

    def test_repeatable(self, capsys):
        _, a, _ = run_cli(capsys, *self.ARGS)
        _, b, _ = run_cli(capsys, *self.ARGS)
        assert a.encode() == b.encode()

    def test_zero_shots(self, capsys):
        code, _, err = run_cli(capsys, "sample", "--n", "3", "--eta", "0.5", "--t", "0.5", "--shots", "0")
        assert code == 2
        assert "shots" in err

    def test_json(self, capsys):
        code, out, _ = run_cli(capsys, *self.ARGS, "--format", "json")
        data = json.loads(out)
        assert data["shots"] == 20000
        assert data["p_exact"] == 0.125
