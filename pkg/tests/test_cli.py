from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from relinfo import cli

from conftest import SCENARIOS


def run(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    if env is not None:
        old = dict(cli.os.environ)
        cli.os.environ.clear()
        cli.os.environ.update(env)
    try:
        code = cli.main(list(argv), out, err)
    finally:
        if env is not None:
            cli.os.environ.clear()
            cli.os.environ.update(old)
    return code, out.getvalue(), err.getvalue()


def test_run_merge_writes_json(tmp_path):
    code, out, _ = run("run", str(SCENARIOS / "merge.sdl"), "--out", str(tmp_path))
    assert code == 0
    assert "PASS" in out
    doc = json.loads((tmp_path / "merge.json").read_text())
    assert doc["schema_version"] == 1
    assert doc["command"] == "run"
    assert doc["report"]["passed"] is True
    assert not (tmp_path / "merge_assertions.csv").exists()


def test_run_without_out_prints_report():
    code, out, err = run("run", str(SCENARIOS / "epr.sdl"))
    assert code == 0
    assert json.loads(out)["report"]["n_failed"] == 0
    assert err.startswith("PASS")


def test_run_missing_file(tmp_path):
    missing = tmp_path / "missing.sdl"
    code, _, err = run("run", str(missing))
    assert code == 2
    assert err == f"{missing}:1:1: error: file not found\n"


def test_run_bad_file(tmp_path):
    bad = tmp_path / "bad.sdl"
    bad.write_text("system S 2\nstate s = |0> @\n")
    code, _, err = run("run", str(bad))
    assert code == 1
    assert err.startswith(f"{bad}:2:15: error: ")


def test_run_failing_assertion(tmp_path):
    f = tmp_path / "wrong.sdl"
    f.write_text("system S 2\nstate s = |0>\nobs Z S pauli Z\nstep state s\nassert I(Z) = 0\n")
    code, out, _ = run("run", str(f), "--out", str(tmp_path))
    assert code == 1
    assert "FAIL" in out and "failed: [s] I(Z) = 0" in out


def test_csv_format(tmp_path):
    code, _, _ = run("run", str(SCENARIOS / "ghz.sdl"), "--out", str(tmp_path), "--format", "csv")
    assert code == 0
    assert not (tmp_path / "ghz.json").exists()
    header = (tmp_path / "ghz_assertions.csv").read_text().splitlines()[0]
    assert header == "description,passed,measured,expected,tolerance,source"


def test_builtin_appb_writes_curve(tmp_path):
    import numpy as np

    code, _, _ = run("builtin", "appb", "--samples", "1000", "--out", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "appb_curve.csv").read_text().splitlines()
    assert rows[0] == "t,omega_t,I_mutual_bits,I_relative_bits,I_target_bits"
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    assert data.shape == (1000, 5)
    h_a = 0.8112781244591328
    assert np.max(np.abs(data[:, 2] - np.sin(data[:, 0]) ** 2 * h_a)) <= 1e-9
    assert (tmp_path / "appb.json").exists()


def test_builtin_ewfs_reports_chsh(tmp_path):
    code, _, _ = run("builtin", "ewfs", "--out", str(tmp_path))
    assert code == 0
    stats = json.loads((tmp_path / "ewfs.json").read_text())["report"]["extras"]["statistics"]
    assert stats["chsh_value"] == pytest.approx(2.828427, abs=1e-6)


def test_builtin_wigner_passes():
    code, _, err = run("builtin", "wigner")
    assert code == 0 and err.startswith("PASS wigner")


def test_unknown_builtin_lists_names():
    code, _, err = run("builtin", "nope")
    assert code == 2
    for name in ("merge", "epr", "ghz", "wigner", "ewfs", "appb"):
        assert name in err


@pytest.mark.parametrize(
    "argv",
    [
        ["builtin", "appb", "--samples", "1"],
        ["run", "x.sdl", "--tol", "0"],
        ["run", "x.sdl", "--tol", "abc"],
        ["props", "--seed", "-1"],
        ["props", "--seed", str(2**64)],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(argv):
    code, _, _ = run(*argv)
    assert code == 2


def test_props_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("props", "--seed", "42", "--trials", "50", "--out", str(a))[0] == 0
    assert run("props", "--seed", "42", "--trials", "50", "--out", str(b))[0] == 0
    assert (a / "props.json").read_bytes() == (b / "props.json").read_bytes()
    report = json.loads((a / "props.json").read_text())["report"]
    assert report["seed"] == 42 and report["passed"]


def test_props_seed_from_environment(tmp_path):
    code, out, _ = run("props", "--trials", "20", "--out", str(tmp_path), env={"RELINFO_SEED": "0x10"})
    assert code == 0
    assert out.startswith("seed 16,")
    code, _, err = run("props", "--trials", "20", env={"RELINFO_SEED": "banana"})
    assert code == 2 and "RELINFO_SEED" in err
    assert cli.resolve_seed(None, {}) == cli.properties.DEFAULT_SEED
    assert cli.resolve_seed(7, {"RELINFO_SEED": "9"}) == 7


def test_props_replay(tmp_path):
    from relinfo import properties as props

    prop = props.PROPERTIES[props.PROPERTY_INDEX["key_relation_quantum"]]
    fixtures = [props.fixture_to_json(props.trial_fixture(prop, 3, k)) for k in range(3)]
    path = tmp_path / "fx.json"
    path.write_text(json.dumps(fixtures))
    code, out, _ = run("props", "--replay", str(path))
    assert code == 0
    assert out.count("PASS key_relation_quantum") == 3


def test_props_replay_failing_fixture(tmp_path):
    from test_properties import _correlated_mixture
    from relinfo import properties as props

    path = tmp_path / "fail.json"
    path.write_text(props.dumps_fixture(_correlated_mixture()))
    code, out, _ = run("props", "--replay", str(path))
    assert code == 1 and out.startswith("FAIL pure_half_bound")


def test_props_replay_bad_files(tmp_path):
    assert run("props", "--replay", str(tmp_path / "none.json"))[0] == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run("props", "--replay", str(junk))[0] == 2
    junk.write_text('{"property": "key_relation_quantum"}')
    assert run("props", "--replay", str(junk))[0] == 2


def test_no_temporary_files_left(tmp_path):
    run("run", str(SCENARIOS / "merge.sdl"), "--out", str(tmp_path), "--format", "both")
    assert sorted(p.name for p in tmp_path.iterdir()) == ["merge.json", "merge_assertions.csv"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "relinfo.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("relinfo ")
