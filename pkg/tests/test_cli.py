import json
import subprocess
import sys
from importlib import resources

import pytest

from qcrystal.cli import main


def run(capsysbinary, *argv):
    rc = main(list(argv))
    out, err = capsysbinary.readouterr()
    return rc, out.decode(), err.decode()


def test_crystal_dot_sl2_chain(capsysbinary):
    rc, out, _ = run(capsysbinary, "crystal", "--lambda", "2", "--depth", "2", "--format", "dot")
    assert rc == 0
    assert out.count("->") == 2 and out.count("label=\"(") == 3


def test_crystal_json_byte_stable(capsysbinary):
    args = ("crystal", "--datum", "gkm2", "--lambda", "1", "1", "--depth", "3")
    rc1, a, _ = run(capsysbinary, *args)
    rc2, b, _ = run(capsysbinary, *args)
    assert rc1 == rc2 == 0 and a == b
    json.loads(a)


def test_imaginary_phi_rendered_inf(capsysbinary):
    rc, out, _ = run(capsysbinary, "crystal", "--datum", "imag2", "--lambda", "3", "--depth", "6")
    doc = json.loads(out)
    assert rc == 0 and len(doc["nodes"]) == 7
    assert all(n["phi"] == ["inf"] for n in doc["nodes"])


def test_binf(capsysbinary):
    rc, out, _ = run(capsysbinary, "binf", "--depth", "3")
    assert rc == 0 and len(json.loads(out)["nodes"]) == 4


def test_tensor_both(capsysbinary):
    rc, out, _ = run(capsysbinary, "tensor", "--lambda", "1", "--mu", "1", "--depth", "3")
    assert rc == 0 and out.splitlines()[0] == "isomorphic: true"


def test_tensor_single_mode(capsysbinary):
    rc, out, _ = run(capsysbinary, "tensor", "--lambda", "1", "--mu", "1", "--depth", "3", "--mode", "comb", "--format", "dot")
    assert rc == 0 and out.startswith("digraph")


def test_global_imaginary(capsysbinary):
    rc, out, _ = run(capsysbinary, "global", "--datum", "imag2", "--lambda", "1", "--depth", "3")
    doc = json.loads(out)
    assert rc == 0 and doc["schema"] == "global/1"
    assert doc["elements"]["2#0"] == [["f1^2", "1"]]


def test_global_binf(capsysbinary):
    rc, out, _ = run(capsysbinary, "global", "--binf", "--depth", "2")
    assert rc == 0 and json.loads(out)["elements"]["2#0"] == [["f1^(2)", "1"]]


def test_dims_csv(capsysbinary):
    rc, out, _ = run(capsysbinary, "dims", "--datum", "gkm2", "--lambda", "1", "1", "--depth", "2")
    lines = out.splitlines()
    assert rc == 0 and lines[0] == "a1,a2,dim,crystal"
    assert "1,1,2,2" in lines


def test_verify_configs(capsysbinary):
    base = resources.files("qcrystal") / "data"
    rc, out, _ = run(capsysbinary, "verify", "--config", str(base / "default.toml"))
    assert rc == 0 and out.rstrip().endswith("suite: PASS")
    rc, out, _ = run(capsysbinary, "verify", "--config", str(base / "corrupted.toml"), "--format", "json")
    assert rc == 2 and json.loads(out)["passed"] is False


def test_output_file(tmp_path, capsysbinary):
    path = tmp_path / "g.dot"
    rc, out, _ = run(capsysbinary, "crystal", "--lambda", "1", "--depth", "1", "--format", "dot", "-o", str(path))
    assert rc == 0 and out == "" and path.read_text().startswith("digraph")


@pytest.mark.parametrize("cmd", [["crystal", "--lambda", "2", "--depth", "2"], ["dims", "--lambda", "2", "--depth", "2"]])
def test_figure_png_stable(tmp_path, capsysbinary, cmd):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert run(capsysbinary, *cmd, "--figure", str(a))[0] == 0
    assert run(capsysbinary, *cmd, "--figure", str(b))[0] == 0
    assert a.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert a.read_bytes() == b.read_bytes()


def test_invalid_datum_file(tmp_path, capsysbinary):
    bad = tmp_path / "bad.toml"
    bad.write_text("matrix = [[2, -1], [0, 2]]\nsymmetrizers = [1, 1]\n")
    rc, _, err = run(capsysbinary, "crystal", "--datum", str(bad), "--lambda", "1", "1", "--depth", "2")
    payload = json.loads(err)
    assert rc == 1 and payload["error"] == "datum"
    assert [0, 1, "a_ij = 0 iff a_ji = 0"] in payload["violations"]


@pytest.mark.parametrize(
    "argv",
    [
        ["crystal", "--lambda", "-1", "--depth", "2"],
        ["crystal", "--lambda", "1", "1", "--depth", "2"],
        ["crystal", "--lambda", "x", "--depth", "2"],
        ["crystal", "--lambda", "1", "--depth", "-1"],
        ["crystal", "--datum", "nosuch", "--lambda", "1"],
        ["verify", "--config", "/nonexistent.toml"],
        ["frobnicate"],
    ],
)
def test_validation_errors_exit_1(capsysbinary, argv):
    rc, _, err = run(capsysbinary, *argv)
    assert rc == 1 and json.loads(err)["error"] in ("usage", "datum")


def test_degree_budget_exit_2(tmp_path, capsysbinary, monkeypatch):
    from qcrystal import cli, globalbasis

    def boom(*a, **k):
        raise globalbasis.DegreeBudgetExceeded("no lift")

    monkeypatch.setattr(cli, "global_basis", boom)
    rc, _, err = run(capsysbinary, "global", "--lambda", "1", "--depth", "1", "--degree-budget", "0")
    assert rc == 2 and json.loads(err)["error"] == "degree_budget"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qcrystal", "crystal", "--lambda", "1", "--depth", "1", "--format", "dot"], capture_output=True)
    assert proc.returncode == 0 and proc.stdout.startswith(b"digraph")
