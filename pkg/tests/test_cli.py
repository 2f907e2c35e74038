import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from tmodule_lab.cli import COMMANDS, main, run
from tmodule_lab.config import ConfigError, load_config, parse_config
from tmodule_lab.presets import PRESETS, carlitz, carlitz_tensor, diagonal, random_module

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data, indent=2))
    return str(path)


def test_presets_shapes():
    assert carlitz(3).tau_degree == 1 and carlitz(3).in_dim == 1
    F = carlitz_tensor(2, 3)
    assert F.in_dim == 3 and F.tau_degree == 1
    D = diagonal(2, 4)
    assert D.in_dim == 2 and D.tau_degree == 2
    F1, P1, lam1 = random_module(3, 2, 2, 9)
    F2, P2, lam2 = random_module(3, 2, 2, 9)
    assert F1 == F2 and P1 == P2 and lam1 == lam2
    assert F1.tau_degree == 2 and lam1.out_dim == 1
    assert set(PRESETS) >= {"carlitz", "carlitz-tensor", "diagonal", "random"}
    with pytest.raises(ValueError):
        diagonal(2, 3)


def test_sample_configs_load():
    for path in sorted(CONFIGS.glob("*.json")):
        cfg = load_config(path)
        assert cfg.F.is_square()


def test_config_param_scoping():
    cfg = load_config(CONFIGS / "carlitz3.json")
    cfg.command = "aux-build"
    assert cfg.param("N", 1) == 2
    cfg.command = "kappa"
    assert cfg.param("N", [1, 2]) == [1, 2]
    assert cfg.param("N_max", 3) == 8


def test_bad_literal_reports_line_and_column():
    text = '{\n  "module": {"preset": "carlitz", "p": 3},\n  "point": ["T+*1"]\n}'
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 3
    assert info.value.column == text.splitlines()[2].index('"T+*1"') + 1 + 3


def test_invalid_json_reports_position():
    with pytest.raises(ConfigError) as info:
        parse_config('{\n  "module": {"preset": "carlitz", "p": 3},\n  "point": [1,]\n}')
    assert info.value.line == 3


def test_non_additive_map_rejected():
    text = json.dumps({"field": {"p": 2}, "module": {"d": 2, "maps": ["x1*x2", "x2"]}}, indent=1)
    with pytest.raises(ConfigError, match="not additive"):
        parse_config(text)
    text = json.dumps({"field": {"p": 3}, "module": {"d": 1, "maps": ["x1^2"]}})
    with pytest.raises(ConfigError, match="not additive"):
        parse_config(text)


def test_maps_and_matrices_agree():
    a = parse_config(json.dumps({"field": {"p": 2}, "module": {"d": 2, "maps": ["T*x1 + x2^2", "T*x2"]}}))
    b = parse_config(json.dumps({"field": {"p": 2}, "module": {"d": 2, "A": [
        [["T", "0"], ["0", "T"]], ["0", "1", "0", "0"]]}}))
    assert a.F == b.F


@pytest.mark.parametrize("bad", [
    {"module": {"preset": "nope"}},
    {"module": {"preset": "carlitz"}},
    {"module": {"d": 1, "A": [[["T"]]]}},
    {"module": {"preset": "carlitz", "p": 2}, "point": ["1", "1"]},
    {"module": {"preset": "carlitz", "p": 2}, "places": ["T^2+1"]},
    {"module": {"preset": "carlitz", "p": 2}, "paramset": {"rate": "1", "d1": "1", "d2": "1",
                                                          "d3": "1", "d4": "1", "d_plus": "3"}},
    [],
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        parse_config(json.dumps(bad))


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert main(["delta", "--config", str(CONFIGS / "carlitz3.json"), "--out", out]) == 0
    wrong = write(tmp_path, {"module": {"preset": "carlitz", "p": 3}, "expect": {"exact_rate": "1/2"}})
    assert main(["delta", "--config", wrong, "--out", out]) == 1
    assert main(["orbit", "--config", str(CONFIGS / "stability.json"), "--out", out]) == 2
    broken = write(tmp_path, "{", "broken.json")
    assert main(["delta", "--config", broken, "--out", out]) == 2
    err = capsys.readouterr().err
    assert "line 1" in err


def test_artifacts_and_verdicts(tmp_path):
    out = str(tmp_path)
    cfg = load_config(CONFIGS / "carlitz3.json")
    run("delta", cfg, out)
    run("truncbound", load_config(CONFIGS / "carlitz3.json"), out)
    names = sorted(os.listdir(out))
    assert names == ["delta.csv", "delta.json", "truncbound.csv", "truncbound.json", "verdicts.json"]
    verdicts = json.loads((tmp_path / "verdicts.json").read_text())
    assert [v["experiment"] for v in verdicts] == sorted(v["experiment"] for v in verdicts)
    for v in verdicts:
        assert set(v) == {"experiment", "anchor", "status", "detail", "artifacts"}
        assert v["status"] in ("pass", "fail", "data")


CHEAP = ["delta", "orbit", "height", "truncbound", "siegel-demo", "reduce", "gamma",
         "preperiodic", "product-formula", "aux-build", "kappa", "alpha"]


@pytest.mark.parametrize("command", CHEAP)
def test_runs_are_byte_identical(tmp_path, command):
    cfg_path = str(CONFIGS / "carlitz3.json")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([command, "--config", cfg_path, "--out", str(a), "--seed", "7"]) == 0
    assert main([command, "--config", cfg_path, "--out", str(b), "--seed", "7"]) == 0
    for name in os.listdir(a):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_every_command_is_registered():
    assert set(CHEAP) | {"delta-lambda", "stability"} == set(COMMANDS)


def test_console_script(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "tmodule_lab.cli", "stability", "--config",
         str(CONFIGS / "stability.json"), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "[PASS]" in proc.stdout
