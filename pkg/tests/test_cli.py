import csv
import io
import json
import os

import pytest

from fockbounds.cli import main
from fockbounds.report import COLUMNS
from fockbounds.report import format_cell
from fockbounds.report import write_rows
from fockbounds.runner import Runner
from fockbounds.runner import run_point
from fockbounds.util.config import build_run_config
from fockbounds.util.exceptions import RegimeError

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "configurations")


def _csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestReport(object):
    def test_cells(self):
        assert format_cell(None) == ""
        assert format_cell(True) == "true"
        assert format_cell(3) == "3"
        assert format_cell(0.1) == "0.10000000000000001"

    def test_fixed_columns(self):
        stream = io.StringIO()
        write_rows([{"a": 0.8, "B_est": 2.0, "extra": 1}], "bounds", "csv", stream)
        header = stream.getvalue().splitlines()[0]
        assert header.split(",") == list(COLUMNS["bounds"])
        assert "extra" not in header

    def test_json_shape(self):
        stream = io.StringIO()
        write_rows([{"a": 1.0, "drift": float("nan")}], "sigma-check", "json",
                   stream, {"version": "x"})
        document = json.loads(stream.getvalue())
        assert document["metadata"] == {"version": "x"}
        assert document["rows"][0]["a"] == 1.0
        assert document["rows"][0]["drift"] is None


class TestRunner(object):
    def test_error_row(self):
        cfg = build_run_config("extremal", {"A": [0.9], "WORKERS": 1})
        row, code = run_point(cfg, 0.9)
        assert code == 1
        assert row["error"].startswith("RegimeError")

    def test_debug_reraises(self):
        cfg = build_run_config("extremal", {"A": [0.9], "WORKERS": 1},
                               debug=True)
        with pytest.raises(RegimeError):
            run_point(cfg, 0.9)

    def test_rows_in_input_order(self):
        cfg = build_run_config("sigma-check", {"A": [1.0, 0.8], "WORKERS": 2,
                                               "QUICK": True})
        rows, code = Runner(cfg).run()
        assert code == 0
        assert [row["a"] for row in rows] == [1.0, 0.8]

    def test_parallel_matches_serial(self):
        flags = {"A": [1.0, 0.8, 1.2], "QUICK": True}
        serial, _ = Runner(build_run_config("sigma-check",
                                            dict(flags, WORKERS=1))).run()
        parallel, _ = Runner(build_run_config("sigma-check",
                                              dict(flags, WORKERS=3))).run()
        assert len(serial) == len(parallel) == 3
        for left, right in zip(serial, parallel):
            assert set(left) == set(right)
            for key, value in left.items():
                if isinstance(value, float):
                    assert right[key] == pytest.approx(value, rel=1e-12,
                                                       abs=1e-12)
                else:
                    assert right[key] == value

class TestMain(object):
    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["bounds", "--alpha", "0.8"])
        assert info.value.code == 3

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as info:
            main(["plot"])
        assert info.value.code == 3

    def test_regime_rejection(self, capsys):
        code = main(["extremal", "--a", "0.9", "--workers", "1"])
        assert code == 1
        rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == 1
        assert "RegimeError" in rows[0]["error"]
        assert "0.98" in rows[0]["error"]

    def test_bad_config_module(self):
        code = main(["bounds", "--config", os.path.join(CONFIG_DIR, "bad_conf.py")])
        assert code == 3

    def test_out_of_range_spacing(self):
        assert main(["bounds", "--a", "1.3"]) == 3

    def test_sweep_rejects_explicit_spacing(self):
        assert main(["sweep", "--a", "0.7"]) == 3

    def test_bounds_row(self, capsys):
        code = main(["bounds", "--a", "0.8", "--n", "20", "--workers", "1"])
        assert code == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == 1
        assert 1.0 < float(rows[0]["B_est"]) < 100.0
        assert rows[0]["error"] == ""
        assert rows[0]["instability"] in ("true", "false")

    def test_sigma_check_json(self, tmp_path):
        out = tmp_path / "sigma.json"
        code = main(["sigma-check", "--a", "1.0", "--quick", "--format", "json",
                     "--out", str(out)])
        assert code == 0
        document = json.loads(out.read_text())
        assert document["metadata"]["config"]["subcommand"] == "sigma-check"
        assert document["metadata"]["wall_time"] >= 0
        assert document["rows"][0]["drift"] < 1e-4

    def test_serial_output_is_reproducible(self, capsys):
        argv = ["sigma-check", "--a", "1.0", "--quick", "--workers", "1"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first

    def test_quick_selftest(self, capsys):
        assert main(["selftest", "--quick"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert [row["suite"] for row in rows] == ["phase_space", "bargmann",
                                                  "frame_bounds", "extremal",
                                                  "sigma"]
        assert all(row["status"] == "pass" for row in rows)

    def test_selftest_catches_wrong_prefactor(self, capsys):
        assert main(["selftest", "--quick", "--c0", "0.5"]) == 1
        rows = dict((row["suite"], row["status"])
                    for row in _csv_rows(capsys.readouterr().out))
        assert rows["bargmann"] == "fail"
        assert rows["sigma"] == "pass"
