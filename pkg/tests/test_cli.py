import io
import json
import subprocess
import sys

import pytest

from onlinecolor.cli import run
from onlinecolor.graphcore import format_graph, parse_graph
from onlinecolor.reduction import build_g1, build_g2
from onlinecolor.qdnf import parse_qdnf


def call(argv, stdin=""):
    out = io.StringIO()
    code = run(argv, out=out, inp=io.StringIO(stdin))
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    (tmp_path / "p4.graph").write_text("p 4\ne 0 1\ne 1 2\ne 2 3\n")
    (tmp_path / "p4vp.graph").write_text("p 5\ne 0 1\ne 1 2\ne 2 3\nc 4 0\n")
    (tmp_path / "bad.graph").write_text("p 3\ne 0 1\ne 1 9\n")
    (tmp_path / "f.qdnf").write_text("A x1 : (x1&x1&x1)\n")
    (tmp_path / "t.qdnf").write_text("E x1 : (x1&x1&x1)\n")
    (tmp_path / "e3.qdnf").write_text("E x1 E x2 E x3 : (x1 & x2 & x3)\n")
    (tmp_path / "bad.qdnf").write_text("A x1 :\n (x1 & y)\n")
    return tmp_path


def test_solve_and_chromatic(files):
    code, out = call(["solve", str(files / "p4.graph")])
    assert code == 0
    assert out.splitlines()[0] == "chi_online = 3"
    assert json.loads(out.splitlines()[1][len("stats ") :])["nodes"] > 0
    code, out = call(["solve", str(files / "p4.graph"), "--k", "2", "--transcript"])
    assert code == 0 and out.startswith("k = 2: drawer wins")
    assert "round 1 drawer" in out
    code, out = call(["chromatic", str(files / "p4.graph")])
    assert (code, out) == (0, "chi = 2\n")


def test_eval(files):
    assert call(["eval", str(files / "f.qdnf")]) == (0, "false\n")
    assert call(["eval", str(files / "t.qdnf")]) == (0, "true\n")


def test_usage_and_parse_errors(files, capsys):
    assert call(["solve", str(files / "bad.graph")])[0] == 2
    assert "bad.graph:line 3" in capsys.readouterr().err
    assert call(["eval", str(files / "bad.qdnf")])[0] == 2
    assert "bad.qdnf:2:" in capsys.readouterr().err
    assert call(["eval", str(files / "missing.qdnf")])[0] == 2
    assert call(["frobnicate"])[0] == 2
    assert call(["solve", str(files / "p4.graph"), "--unknown"])[0] == 2
    assert call([])[0] == 2


def test_budget_overflow_exit_code(files):
    code, out = call(["--node-budget", "2", "solve", str(files / "p4.graph")])
    assert code == 3
    assert "stats" in out


def test_reduce_writes_graph_and_sidecar(files):
    code, out = call(["reduce", str(files / "e3.qdnf"), "--stage", "g1"])
    assert code == 0
    g = files / "e3.g1.graph"
    side = json.loads((files / "e3.g1.roles.json").read_text())
    red = build_g1(parse_qdnf((files / "e3.qdnf").read_text()))
    assert side["k"] == 11 and len(side["vertex_roles"]) == red.n
    text = g.read_text()
    assert parse_graph(text) == red.graph
    assert format_graph(parse_graph(text)) == text
    code, _ = call(["reduce", str(files / "t.qdnf"), "--stage", "g2", "-o", str(files / "out")])
    assert code == 0
    assert parse_graph((files / "out.graph").read_text()) == build_g2(parse_qdnf("E x1 : (x1&x1&x1)")).graph


def test_reduce_g3_refuses_huge_graph(files):
    code, out = call(["reduce", str(files / "t.qdnf"), "--stage", "g3"])
    assert code == 3
    assert "not written" in out
    side = json.loads((files / "t.g3.roles.json").read_text())
    assert len(side["stats"]["iterations"]) == 4


def test_verify_exit_codes(files):
    host = str(files / "p4.graph")
    code, out = call(["verify", "--host", host, "--budget", "3", "--painter", "firstfit"])
    assert code == 0 and json.loads(out)["max_colors"] == 3
    code, out = call(["verify", "--host", host, "--budget", "2", "--painter", "firstfit"])
    assert code == 1 and json.loads(out)["violation"]
    code, out = call(["verify", "--host", host, "--budget", "2", "--drawer", "drawer-p4"])
    assert code == 0 and json.loads(out)["forced"]
    code, out = call(["verify", "--formula", str(files / "f.qdnf"), "--budget", "4", "--drawer", "drawer-g1"])
    assert code == 0 and json.loads(out)["forced"]
    code, out = call(
        ["verify", "--formula", str(files / "t.qdnf"), "--budget", "5", "--painter", "painter-g1", "--samples", "20"]
    )
    assert code == 0 and json.loads(out)["games"] == 20
    code, out = call(["--node-budget", "1", "verify", "--host", host, "--budget", "3", "--painter", "firstfit"])
    assert code == 3


def test_verify_after_removal(files):
    code, out = call(
        [
            "verify", "--host", str(files / "p4vp.graph"), "--remove", "4", "--budget", "67",
            "--painter", "painter-gprime", "--inner-budget", "3", "--samples", "2",
        ]
    )
    assert code == 0 and json.loads(out)["max_colors"] <= 67
    code, _ = call(["verify", "--host", str(files / "p4vp.graph"), "--remove", "0", "--budget", "3", "--painter", "firstfit"])
    assert code == 2


def test_same_seed_same_output(files):
    argv = ["--seed", "7", "verify", "--host", str(files / "p4.graph"), "--budget", "2", "--painter", "firstfit", "--samples", "30"]
    assert call(argv) == call(argv)


def test_play_as_painter(files):
    code, out = call(
        ["play", "--host", str(files / "p4.graph"), "--budget", "3", "--as", "painter", "--opponent", "drawer-p4"],
        stdin="0\n0\n0\n0\n",
    )
    assert code == 0
    assert "[0] color 0 (new)" in out
    assert out.rstrip().endswith("painter wins")


def test_play_as_drawer(files):
    code, out = call(
        ["play", "--host", str(files / "p4.graph"), "--budget", "2", "--as", "drawer", "--opponent", "firstfit"],
        stdin="0\n0\n1\n1\n",
    )
    assert code == 0
    assert "legal neighbourhoods" in out
    assert out.rstrip().endswith("drawer wins")


def test_play_bad_input_and_eof(files):
    code, out = call(
        ["play", "--host", str(files / "p4.graph"), "--budget", "3", "--as", "painter", "--opponent", "drawer-p4"],
        stdin="9\nx\n",
    )
    assert code == 2
    assert "enter a number" in out


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "onlinecolor", "eval", str(files / "f.qdnf")], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "false\n"
