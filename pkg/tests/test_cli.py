import json

from cubeosc import CheckResult, read_pgm
from cubeosc.checks import SUITES
from cubeosc.cli import (EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, EXIT_RESOURCE,
                         main)


def test_eval_square_exit_ok(capsys):
    code = main(["eval", "--shape", "square01", "--kind", "i",
                 "--eps", "0.05", "--orientations", "4", "--offsets", "2"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "doubled" in out
    assert "cap" in out


def test_eval_exact_1d_comparison(capsys):
    code = main(["eval", "--shape", "interval1d", "--kind", "i",
                 "--eps", "0.02", "--exact-1d"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "exact" in out


def test_eval_unknown_preset_exit_input(capsys):
    assert main(["eval", "--shape", "banana", "--eps", "0.05"]) == EXIT_INPUT
    assert "error" in capsys.readouterr().err


def test_eval_bad_kind_exit_input(capsys):
    code = main(["eval", "--shape", "square01", "--kind", "zeta",
                 "--eps", "0.05"])
    assert code == EXIT_INPUT


def test_eval_m_without_value_exit_input(capsys):
    code = main(["eval", "--shape", "square01", "--kind", "m",
                 "--eps", "0.05"])
    assert code == EXIT_INPUT


def test_sweep_outputs_are_rerun_identical(tmp_path, capsys):
    args = ["sweep", "--shape", "square01", "--kind", "i",
            "--eps-ladder", "0.08:0.04:3", "--orientations", "4",
            "--offsets", "2"]
    a_csv, a_json = tmp_path / "a.csv", tmp_path / "a.json"
    b_csv, b_json = tmp_path / "b.csv", tmp_path / "b.json"
    assert main(args + ["--out-csv", str(a_csv),
                        "--out-json", str(a_json)]) == EXIT_OK
    assert main(args + ["--out-csv", str(b_csv),
                        "--out-json", str(b_json)]) == EXIT_OK
    assert a_csv.read_bytes() == b_csv.read_bytes()
    assert a_json.read_bytes() == b_json.read_bytes()
    rows = a_csv.read_text().strip().splitlines()
    assert len(rows) == 5           # version line + header + 3 ladder points
    assert rows[0].startswith("# cubeosc-csv")
    assert "runtime_ms" in rows[1]
    data = json.loads(a_json.read_text())
    assert len(data["rows"]) == 3


def test_sweep_timings_gate(tmp_path):
    args = ["sweep", "--shape", "square01", "--kind", "i",
            "--eps-ladder", "0.08:0.08:1", "--orientations", "4",
            "--offsets", "2"]
    plain, timed = tmp_path / "p.csv", tmp_path / "t.csv"
    assert main(args + ["--out-csv", str(plain)]) == EXIT_OK
    assert main(args + ["--timings", "--out-csv", str(timed)]) == EXIT_OK
    col = plain.read_text().splitlines()[2].split(",")[-1]
    assert col == "0"               # runtime hidden unless requested
    timed_col = timed.read_text().splitlines()[2].split(",")[-1]
    assert timed_col != "0"


def test_sweep_bad_ladder_exit_input():
    assert main(["sweep", "--shape", "square01",
                 "--eps-ladder", "0.1:0.01"]) == EXIT_INPUT
    assert main(["sweep", "--shape", "square01",
                 "--eps-ladder", "0.1:0.01:0"]) == EXIT_INPUT


def test_eval_svg_written_and_deterministic(tmp_path):
    args = ["eval", "--shape", "twosquares", "--kind", "k", "--eps", "0.05",
            "--orientations", "4", "--offsets", "2"]
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(args + ["--out-svg", str(a)]) == EXIT_OK
    assert main(args + ["--out-svg", str(b)]) == EXIT_OK
    body = a.read_text()
    assert "<svg" in body
    assert a.read_bytes() == b.read_bytes()


def test_eval_shape_json_file(tmp_path, capsys):
    spec = {"type": "disk", "center": [0.5, 0.5], "radius": 0.2}
    p = tmp_path / "shape.json"
    p.write_text(json.dumps(spec))
    code = main(["eval", "--shape", str(p), "--kind", "i", "--eps", "0.05",
                 "--orientations", "4", "--offsets", "2",
                 "--boundary-samples", "100"])
    assert code == EXIT_OK


def test_rasterize_roundtrip(tmp_path):
    out = tmp_path / "disk.pgm"
    code = main(["rasterize", "--shape", "disk05", "--cell", "0.015625",
                 "--out", str(out)])
    assert code == EXIT_OK
    r = read_pgm(out)
    assert r.dims == (64, 64)
    assert abs(r.volume() - 3.14159 / 4) < 0.05


def test_rasterize_cell_budget_exit_resource(tmp_path):
    code = main(["rasterize", "--shape", "disk05", "--cell", "1e-6",
                 "--out", str(tmp_path / "x.pgm")])
    assert code == EXIT_RESOURCE


def test_check_known_suites(capsys):
    assert main(["check", "gauss", "dyadic"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "gauss" in out
    assert "PASS" in out


def test_check_unknown_suite_exit_input():
    assert main(["check", "wibble"]) == EXIT_INPUT


def test_check_failing_suite_exit_invariant(capsys):
    def broken():
        return CheckResult(suite="broken", ok=False,
                           lines=("broken: FAIL synthetic",), stats={})
    SUITES["broken"] = broken
    try:
        assert main(["check", "broken"]) == EXIT_INVARIANT
    finally:
        del SUITES["broken"]


def test_oracle_compare_exit_ok(capsys):
    assert main(["oracle-compare", "--pools", "5", "--seed", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "greedy" in out
    assert "optimal" in out


def test_gauss_table_golden_head(tmp_path, capsys):
    out = tmp_path / "tab.csv"
    assert main(["gauss-table", "--points", "5",
                 "--out-csv", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# cubeosc-gauss v1")
    assert lines[1].split(",")[0] == "t"
    assert len(lines) == 2 + 5


def test_region_flag_restricts_family(capsys):
    code = main(["eval", "--shape", "halfplane", "--kind", "i",
                 "--eps", "0.1", "--region", "box:0.25,0.25,0.75,0.75",
                 "--orientations", "4", "--offsets", "2"])
    assert code == EXIT_OK


def test_packer_exhaustive_small_pool(capsys):
    code = main(["eval", "--shape", "interval1d", "--kind", "i",
                 "--eps", "0.2", "--packer", "exhaustive"])
    assert code == EXIT_OK
