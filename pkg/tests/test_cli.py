import json
import subprocess
import sys

import pytest

from twistcalc.cli import COMMANDS

from cli_cases import CASES, CONFIGS, OUTPUTS, invoke, render


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code):
    got = render(*invoke(argv))
    assert got == (OUTPUTS / f"{name}.txt").read_text(encoding="utf-8")
    assert got.startswith(f"exit: {code}\n")


@pytest.mark.parametrize("name,argv,code", [c for c in CASES if "--json" in c[1]], ids=lambda v: v if isinstance(v, str) else "")
def test_json_is_deterministic(name, argv, code):
    first, second = invoke(argv), invoke(argv)
    assert first == second
    json.loads(first[1])


def test_every_command_has_a_golden_case():
    covered = {argv[0] for _, argv, code in CASES if code == 0}
    assert covered == set(COMMANDS)


def test_exit_codes_cover_contract():
    assert {code for _, _, code in CASES} == {0, 1, 2}


def test_known_values():
    code, out, _ = invoke(["taylor", "--config", "q1.toml", "--f", "x1^2", "--n", "2", "--json"])
    terms = json.loads(out)["jet"]["terms"]
    assert code == 0 and [t["coeff"] for t in terms] == ["x1^2", "7*x1", "1"]
    code, out, _ = invoke(["normalform", "--expr", "d1 x1"])
    assert out == "1 + 6*x1*dp[1]\n"


def test_error_payload_is_json():
    code, out, err = invoke(["apply", "--config", "q1.toml", "--expr", "d1 +* x1", "--f", "x1"])
    assert code == 1 and out == ""
    payload = json.loads(err)["error"]
    assert payload["code"] == "E_PARSE" and "column 5" in payload["message"]


def test_missing_config_file():
    code, _, err = invoke(["check", "--config", "nope.toml"])
    assert code == 1 and json.loads(err)["error"]["code"] == "E_USAGE"


def test_out_file(tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = invoke(["pi", "--config", "q1.toml", "--f", "x1", "--k", "2", "--json", "--out", str(target)])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["result"] == "36*x1"


@pytest.mark.parametrize("argv,code", [
    (["normalform", "--expr", "d1 x1"], 0),
    (["apply", "--config", str(CONFIGS / "rootofunity.toml"), "--expr", "dp[2]", "--f", "x1^3"], 2),
    (["taylor", "--f", "x1 +"], 1),
])
def test_module_entry_point(argv, code):
    proc = subprocess.run([sys.executable, "-m", "twistcalc", *argv], capture_output=True, text=True)
    assert proc.returncode == code
