import json
import re
import subprocess
import sys

import pytest

from kappa_fuzzy import cli

SMALL = {
    "group-check": {"D": [2, 3], "samples": 500},
    "geometry-check": {"D": [2, 3], "metrics": 10, "embedding_points": 100, "bracket_points": 3,
                       "modes": {"D": [2], "orders": [[0.3, 0.0]], "resolution": 128}},
    "fuzzy-spectrum": {"N": [6, 8], "lattice": [11, 15], "n_modes": 3,
                       "gates": {"overlap_non_decreasing": False, "residual_decreasing": False}},
}


def _run(tmp_path, command, cfg, *extra, name="out"):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / name
    code = cli.main([command, "--config", str(path), "--out", str(out), *extra])
    return code, out


@pytest.mark.parametrize("command", cli.COMMANDS)
def test_commands_succeed(tmp_path, command):
    code, out = _run(tmp_path, command, SMALL[command])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["command"] == command and report["passed"] is True
    assert set(report) == {"command", "version", "seed", "config", "config_hash", "timestamp",
                           "passed", "results"}


def _strip_timestamp(text):
    return re.sub(r'"timestamp": "[^"]*"', '"timestamp": ""', text)


@pytest.mark.parametrize("command", cli.COMMANDS)
def test_reports_are_deterministic(tmp_path, command):
    _, a = _run(tmp_path, command, SMALL[command], "--seed", "7", name="a")
    _, b = _run(tmp_path, command, SMALL[command], "--seed", "7", name="b")
    ta, tb = (a / "report.json").read_text(), (b / "report.json").read_text()
    assert _strip_timestamp(ta) == _strip_timestamp(tb)
    for f in a.iterdir():
        if f.name != "report.json" and f.is_file():
            assert f.read_bytes() == (b / f.name).read_bytes()


def test_seed_changes_samples(tmp_path):
    _, a = _run(tmp_path, "group-check", SMALL["group-check"], "--seed", "1", name="a")
    _, b = _run(tmp_path, "group-check", SMALL["group-check"], "--seed", "2", name="b")
    ra = json.loads((a / "report.json").read_text())
    rb = json.loads((b / "report.json").read_text())
    assert ra["seed"] == 1 and rb["seed"] == 2
    assert ra["results"] != rb["results"]


def test_fuzzy_outputs(tmp_path):
    code, out = _run(tmp_path, "fuzzy-spectrum", SMALL["fuzzy-spectrum"], "--emit-plots-csv")
    assert code == 0
    for N in (6, 8):
        assert (out / f"eigenvalues_N{N}.csv").read_text().startswith("index,re,im\n")
        head = (out / f"modes_N{N}.csv").read_text().splitlines()[0]
        assert head.startswith("index,eig_re,eig_im,overlap")
        plots = sorted((out / f"plots_N{N}").iterdir())
        assert len(plots) == 3
        assert plots[0].read_text().startswith("t,y1,re,im,residual_re,residual_im\n")


def test_geometry_emits_mode_tables(tmp_path):
    code, out = _run(tmp_path, "geometry-check", SMALL["geometry-check"], "--emit-plots-csv")
    assert code == 0
    assert len(list(out.glob("mode_D2_*.csv"))) == 1


def test_failing_gate_exits_one(tmp_path):
    cfg = dict(SMALL["group-check"], law_tolerance=1e-30)
    code, out = _run(tmp_path, "group-check", cfg)
    assert code == 1
    assert json.loads((out / "report.json").read_text())["passed"] is False


def test_overlap_target_gate(tmp_path):
    cfg = json.loads(json.dumps(SMALL["fuzzy-spectrum"]))
    cfg["gates"]["overlap_target"] = 1.0
    cfg["N"] = [6]
    code, out = _run(tmp_path, "fuzzy-spectrum", cfg)
    gates = json.loads((out / "report.json").read_text())["results"]["gates"]
    assert "overlap_target" in gates
    assert code == (0 if gates["overlap_target"]["passed"] else 1)


@pytest.mark.parametrize("command,cfg", [
    ("group-check", {"samples": 10, "bogus": 1}),
    ("geometry-check", {"modes": {"resolution": 64, "extra": True}}),
    ("fuzzy-spectrum", {"window": {"t": [-1, 1], "z": [0, 1]}}),
    ("fuzzy-spectrum", {"tolerances": {"bessel_series": 1e-3}}),
    ("group-check", {"samples": "many"}),
    ("fuzzy-spectrum", {"N": [80]}),
    ("fuzzy-spectrum", {"lambda": [0.5]}),
    ("fuzzy-spectrum", {"D": 3, "lambda": [1.0]}),
    ("fuzzy-spectrum", {"window": {"t": [1, -1]}}),
    ("geometry-check", {"theta": [0.7853981633974483]}),
    ("geometry-check", {"theta": [-2.0]}),
])
def test_config_errors_exit_two(tmp_path, capsys, command, cfg):
    code, _ = _run(tmp_path, command, cfg)
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_unreadable_config_exits_two(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert cli.main(["group-check", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["group-check", "--config", str(tmp_path / "missing.json")]) == 2


def test_memory_guard_message(tmp_path, capsys):
    _run(tmp_path, "fuzzy-spectrum", {"N": [80]})
    assert "memory guard" in capsys.readouterr().err


def test_usage_errors_exit_two(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(["no-such-command", "--config", "x.json"])
    assert info.value.code == 2


def test_defaults_validate_against_schema():
    import jsonschema

    schema = cli.load_schema()
    for command in cli.COMMANDS:
        sub = dict(schema, **{"$ref": f"#/$defs/{command}"})
        cfg = {k: v for k, v in cli.DEFAULTS[command].items() if v is not None}
        jsonschema.validate(cfg, sub)


def test_documented_schema_matches_package_copy():
    from pathlib import Path

    doc = Path(__file__).resolve().parents[1] / "docs" / "config.md"
    text = doc.read_text()
    block = re.search(r"```json\n(.*?)\n```", text, re.S).group(1)
    assert json.loads(block) == cli.load_schema()


def test_shipped_example_configs_validate():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "configs"
    files = sorted(root.glob("*.json"))
    assert files
    for f in files:
        raw = json.loads(f.read_text())
        cli.validate_config(raw["command"], raw)


def test_console_script_entry_point(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(SMALL["group-check"]))
    proc = subprocess.run([sys.executable, "-m", "kappa_fuzzy.cli", "group-check", "--config", str(path),
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "group-check: PASS" in proc.stdout
