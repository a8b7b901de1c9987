from pathlib import Path

import pytest

from twistcalc.config import AlgebraConfig, ConnectionConfig, parse_norm
from twistcalc.errors import UsageError

CONFIGS = Path(__file__).parent / "golden" / "configs"


@pytest.mark.parametrize("path", sorted(CONFIGS.iterdir()), ids=lambda p: p.name)
def test_byte_identical_round_trip(path):
    text = path.read_text(encoding="utf-8")
    cfg = AlgebraConfig.loads(text)
    out = cfg.dumps_json() if path.suffix == ".json" else cfg.dumps_toml()
    assert out == text


def test_toml_and_json_agree():
    cfg = AlgebraConfig.load(str(CONFIGS / "mixed.toml"))
    assert AlgebraConfig.loads(cfg.dumps_json()) == cfg
    assert AlgebraConfig.loads(cfg.dumps_toml()) == cfg


def test_canonicalization():
    cfg = AlgebraConfig(d=3, twists=("q:12/2", "shift: 2/4", "q:1.5"), norm="padic:5")
    assert cfg.twists == ("q:6", "shift:1/2", "q:3/2")
    assert AlgebraConfig.loads(cfg.dumps_toml()).dumps_toml() == cfg.dumps_toml()


def test_file_round_trip(tmp_path):
    cfg = AlgebraConfig(d=1, twists=("custom:x1^2 + 1",), norm="trivial", D=3, N=2,
                        connection=ConnectionConfig(1, ((("x1",),),)))
    for fmt in ("toml", "json"):
        target = tmp_path / f"c.{fmt}"
        cfg.dump(str(target), fmt)
        assert AlgebraConfig.load(str(target)) == cfg


def test_spec_and_module():
    cfg = AlgebraConfig.load(str(CONFIGS / "mixed.toml"))
    spec = cfg.spec()
    assert spec.d == 2 and spec.kind(2) == "shift"
    assert cfg.module(spec).rank == 1


@pytest.mark.parametrize("text", [
    "d = 0\ntwists = []\n",
    "d = 1\ntwists = [\"q:1\"]\n",
    "d = 1\ntwists = [\"q:abc\"]\n",
    "d = 2\ntwists = [\"q:2\"]\n",
    "d = 1\ntwists = [\"q:2\"]\nD = 0\n",
    "d = 1\ntwists = [\"q:2\"]\nnorm = \"padic:4\"\n",
    "d = 1\ntwists = [\"q:2\"]\ncolour = 3\n",
    "d = 1\ntwists = [\"q:2\"]\n[connection]\nrank = 2\nmatrices = [[[\"0\"]]]\n",
    "d = = 1",
    "[1, 2]",
])
def test_rejected(text):
    with pytest.raises(UsageError):
        AlgebraConfig.loads(text)


def test_norms():
    assert parse_norm("trivial").describe() == "trivial"
    assert parse_norm("padic:7").describe() == "padic:7"
