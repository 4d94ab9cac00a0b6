import json

import pytest

from wittkit.cli import ConfigError, main, run

EIS = {"kind": "eisenstein", "p": 2, "e": 2, "K": 12}


def test_ghost_example():
    b = run({"command": "witt.ghost", "p": 2, "vector": [2, -1, -4], "depth": 2})
    assert b["ok"] and b["result"]["ghost"] == ["2", "2", "2"]
    assert b["schema"] == "wittkit.result/1"


def test_exp_single_trivial():
    b = run({"command": "exp.single", "u": 0})
    assert b["ok"] and b["result"]["series"] == "1"


def test_tower_init_law():
    b = run({"command": "tower.init", "lambda": "pi", "ring": EIS})
    assert b["ok"] and b["assertions"]
    assert b["result"]["tower"]["law"] == ["pi*X1*Y1 + X1 + Y1"]


def test_unknown_command():
    with pytest.raises(ConfigError):
        run({"command": "nope"})


@pytest.mark.parametrize("cfg", [
    {"command": "witt.add", "p": 3, "x": [1, 2], "y": [2, 1]},
    {"command": "witt.tmap", "p": 2, "a": [1, 1], "x": [3, 1], "depth": 2},
    {"command": "exp.truncated", "p": 2, "L": 2, "M": 2, "N": 2},
    {"command": "kummer.p-expansion", "p": 2, "depth": 4},
    {"command": "kummer.d-vector", "p": 2},
    {"command": "kummer.dim1", "p": 3},
    {"command": "tprime", "p": 2, "R": 3},
])
def test_commands_pass(cfg):
    b = run(cfg)
    assert b["ok"], b["assertions"]


def _main(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_exit_codes(tmp_path, capsys):
    code, _ = _main(["witt.ghost", "--set", "p=2", "--set", "vector=[2,-1,-4]", "--verbosity", "0"], capsys)
    assert code == 0
    code, _ = _main(["witt.ghost", "--verbosity", "0"], capsys)
    assert code == 2
    bad = tmp_path / "c.json"
    bad.write_text("[1, 2]")
    code, _ = _main(["--config", str(bad), "--verbosity", "0"], capsys)
    assert code == 2


def test_failing_assertion_exit_one(capsys):
    code, _ = _main(["tower.extend", "--set", 'ring={"kind":"eisenstein","p":2,"e":2,"K":12}',
                     "--set", 'lambdas=["pi","pi"]', "--set", 'frames=[[[1]]]', "--verbosity", "0"], capsys)
    assert code == 1


def test_determinism_and_out(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "tower.verify", "ring": EIS, "lambdas": ["pi", "pi"], "box": [0, "pi"],
                               "depth": 2, "samples": 5}))
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.json"
        code, _ = _main(["--config", str(cfg), "--seed", "7", "--out", str(path), "--verbosity", "0"], capsys)
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["seed"] == 7
