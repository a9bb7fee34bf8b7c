import json
import subprocess
import sys

import pytest

from certs import DISC, HALF, PAYOFF, ROOT2, UNION2
from semigame.cli import main


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {"half": HALF, "union2": UNION2, "circle2d": DISC, "payoff": PAYOFF, "root2": ROOT2}.items():
        p = tmp_path / f"{name}.sa"
        p.write_text(text)
        paths[name] = str(p)
    bad = tmp_path / "bad.sa"
    bad.write_text(HALF.replace("witness: 0", "witness: 1"))
    paths["bad"] = str(bad)
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compile_half(files, capsys):
    out_path = str(files["dir"] / "half.game.json")
    code, out, _ = run(capsys, "compile", files["half"], "--out", out_path)
    assert code == 0
    assert json.loads(out)["players"]["exact"] == 5
    assert len(json.load(open(out_path))["players"]) == 5


def test_compile_circle(files, capsys):
    code, out, _ = run(capsys, "compile", files["circle2d"])
    assert code == 0 and json.loads(out)["players"]["exact"] == 12


def test_compile_bad_witness(files, capsys):
    code, _, err = run(capsys, "compile", files["bad"])
    assert code == 2 and "error" in err


def test_compile_missing_file_and_bad_flags(files, capsys):
    assert run(capsys, "compile", str(files["dir"] / "nope.sa"))[0] == 2
    assert run(capsys, "compile", files["half"], "--mode", "sideways")[0] == 2


def test_check_inside_and_outside(files, capsys):
    code, out, _ = run(capsys, "check", files["half"], "--point", "1/4")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "IN" and data["canonical"]["verdict"] == "PASS"
    code, out, _ = run(capsys, "check", files["half"], "--point", "3/4")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "OUT"
    trace = data["refutation"]
    assert len(trace["steps"]) + 1 == 4 and "contradiction" in trace


def test_check_arity_mismatch(files, capsys):
    assert run(capsys, "check", files["circle2d"], "--point", "1/4")[0] == 2


def test_check_payoff_mode_in_original_coordinates(files, capsys):
    code, out, _ = run(capsys, "check", files["payoff"], "--point=-1/2")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "IN" and data["payoffs"] == ["-1/2"]
    code, out, _ = run(capsys, "check", files["payoff"], "--point", "1")
    assert code == 0 and json.loads(out)["verdict"] == "OUT"


def test_check_against_saved_game(files, capsys):
    game_path = str(files["dir"] / "h.json")
    run(capsys, "compile", files["half"], "--out", game_path)
    assert run(capsys, "check", files["half"], "--point", "1/8", "--game", game_path)[0] == 0
    assert run(capsys, "check", files["union2"], "--point", "1/8", "--game", game_path)[0] == 2


def test_project_union(files, capsys):
    code, out, _ = run(capsys, "project", files["union2"], "--grid", "8")
    data = json.loads(out)
    assert code == 0 and data["disagreements"] == [] and data["n_members"] == 6


def test_project_integer(files, capsys):
    code, out, _ = run(capsys, "project", files["root2"], "--grid", "4")
    assert code == 0 and json.loads(out)["n_members"] == 0


def test_bounds_half(files, capsys):
    code, out, _ = run(capsys, "bounds", files["half"])
    data = json.loads(out)
    assert code == 0
    assert data["bounds"]["eq_components"] == str(2 * 5**35)
    assert data["players"]["exact"] == 5


def test_gen_lb_then_project(files, capsys):
    path = str(files["dir"] / "lb.sa")
    assert run(capsys, "gen-lb", "1", "2", "--alphas", "1/4,3/4", "--out", path)[0] == 0
    code, out, _ = run(capsys, "project", path, "--grid", "4")
    assert code == 0 and json.loads(out)["n_members"] == 2
    assert run(capsys, "gen-lb", "1", "2", "--alphas", "1/4")[0] == 2


def test_export_formats(files, capsys):
    game_path = str(files["dir"] / "h.json")
    run(capsys, "compile", files["half"], "--out", game_path)
    code, out, _ = run(capsys, "export", game_path, "--format", "nfg")
    assert code == 0 and out.startswith("NFG 1 R")
    code, out, _ = run(capsys, "export", game_path, "--format", "tensor")
    assert code == 0 and len(json.loads(out)["payoffs"][0]) == 32
    code, out, _ = run(capsys, "export", game_path, "--format", "json")
    assert code == 0 and out == open(game_path).read()


def test_stdout_is_byte_stable(files, capsys):
    first = run(capsys, "project", files["half"], "--grid", "8")[1]
    second = run(capsys, "project", files["half"], "--grid", "8")[1]
    assert first == second


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "semigame", "check", files["half"], "--point", "3/4"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "OUT"
