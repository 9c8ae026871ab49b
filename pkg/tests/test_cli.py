import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from cartanext import jsonio
from cartanext.cli import run

LAG = ["--family", "lagrangean-orthogonal", "--set", "p=2", "--set", "q=1"] + [
    f"--set=b{i}={v}" for i, v in zip(range(1, 5), (1, 0, 1, 1))
]


def _report(tmp_path, argv):
    out = tmp_path / "report.json"
    code = run(list(argv) + ["--json", "--out", str(out)])
    return code, jsonio.loads(out.read_bytes())


def test_catalog_lists_every_family(tmp_path):
    code, rep = _report(tmp_path, ["catalog"])
    assert code == 0
    assert len(rep["families"]) == 14
    assert rep["schema"] == 1


def test_build_then_check_reads_the_state_file(tmp_path):
    state = tmp_path / "state.json"
    code, rep = _report(tmp_path, ["build", *LAG, "--state", str(state)])
    assert code == 0 and rep["status"] == "ok"
    assert jsonio.loads(state.read_bytes())["family"] == "lagrangean-orthogonal"
    code, rep = _report(tmp_path, ["check", "--state", str(state)])
    assert code == 0
    assert rep["flags"] == {"flat": False, "torsion_free": True, "regular": True, "normal": True}
    assert rep["canonical"]["value"] == 1
    assert rep["infaut"]["equals_alpha_k"]
    assert list(rep)[:5] == ["schema", "command", "family", "sample", "status"]


def test_pgl_check_is_flat(tmp_path):
    code, rep = _report(tmp_path, ["check", "--family", "lagrangean-pgl", "--set", "n=2", "--set", "b1=1", "--set", "b2=1"])
    assert code == 0 and rep["flags"]["flat"]


def test_text_output(capsys):
    assert run(["reduce", *LAG]) == 0
    out = capsys.readouterr().out
    assert "t=|gamma/delta| = 1" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["build", "--family", "nope"],
        ["build", "--family", "lagrangean-orthogonal", "--set", "b1=0.5"],
        ["build", "--family", "lagrangean-orthogonal", "--set", "b1=0", "--set", "b2=0"],
        ["infaut", "--family", "dim3-sl3", "--depth", "0"],
        ["sweep", "--family", "dim3-sl3", "--param", "t", "--values", "1,x"],
        ["frobnicate"],
    ],
)
def test_bad_arguments_exit_2(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == 2


def test_missing_state_file_exits_2(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["check"]) == 2


def test_compare_flag_fails_on_mismatch(tmp_path):
    code, rep = _report(tmp_path, ["check", "--family", "cr-psu", "--compare-paper"])
    assert code == 1
    assert rep["closed_forms"]["mismatches"] >= 1
    code, _ = _report(tmp_path, ["check", "--family", "cr-psu"])
    assert code == 0


def test_mathematical_failure_exits_1_with_axiom(tmp_path, monkeypatch):
    from cartanext import report
    from cartanext.extension import ExtensionError

    def broken(spec, sample):
        raise ExtensionError("equivariance_symmetry", "forced failure")

    monkeypatch.setattr(report, "instantiate", broken)
    code, rep = _report(tmp_path, ["check", "--family", "dim3-sl3"])
    assert code == 1
    assert rep["status"] == "failed"
    assert rep["failure"]["axiom"] == "equivariance_symmetry"


def test_sweep_rows(tmp_path):
    code, rep = _report(tmp_path, ["sweep", "--family", "dim3-sl3", "--param", "t", "--values", "0,1,2,1/2"])
    assert code == 0
    assert [r["value"] for r in rep["rows"]] == [F(0), F(1), F(2), F(1, 2)]
    assert [r["flags"]["flat"] for r in rep["rows"]] == [True, False, False, False]


def test_no_floats_in_reports(tmp_path):
    out = tmp_path / "r.json"
    run(["check", "--family", "dim3-sl3", "--json", "--out", str(out)])

    def walk(x):
        assert not isinstance(x, float)
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)

    walk(json.loads(out.read_text()))


def test_module_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "cartanext", "check", "--family", "dim3-su21", "--json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True, env={"PYTHONHASHSEED": "7", "PATH": ""}).stdout
    assert first == second
