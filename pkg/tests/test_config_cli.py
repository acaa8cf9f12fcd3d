import json
import math

import numpy as np
import pytest

from rqtraj.cli import main
from rqtraj.config import parse_config
from rqtraj.errors import SchemaError
from rqtraj.runner import emit

SQRT2 = math.sqrt(2.0)


def test_minimal_config_defaults():
    cfg = parse_config('{"task": "nodes", "energy": 1.5}')
    assert cfg.params.mass == 1.0 and cfg.params.light_speed == 1.0 and cfg.params.hbar == 1.0
    assert cfg.params.mode == "relativistic"
    assert cfg.constants.a == 1.0 and cfg.constants.b == 0.0
    assert cfg.potential.segments == ((-math.inf, math.inf, 0.0),)


def test_zero_a_rejected():
    with pytest.raises(SchemaError) as err:
        parse_config('{"task": "nodes", "energy": 1.5, "constants": {"a": 0.0}}')
    assert any("constants.a" == path for path, _ in err.value.violations)


def test_unknown_task_lists_valid_ones():
    with pytest.raises(SchemaError) as err:
        parse_config('{"task": "wibble", "energy": 1.5}')
    (path, msg), = [v for v in err.value.violations if v[0] == "task"]
    for name in ("trajectory", "nodes", "tunnel", "residuals", "sweep"):
        assert name in msg


def test_all_violations_collected():
    bad = json.dumps(
        {
            "task": "trajectory",
            "particle": {"mass": -1.0},
            "constants": {"a": 0.0},
            "trajectory": {"samples": 1},
            "extra": 1,
        }
    )
    with pytest.raises(SchemaError) as err:
        parse_config(bad)
    paths = {p for p, _ in err.value.violations}
    assert {"particle", "constants.a", "trajectory.samples", "extra", "energy"} <= paths


def test_invalid_json_reported():
    with pytest.raises(SchemaError):
        parse_config("{nope")


def test_task_cross_requirements():
    with pytest.raises(SchemaError) as err:
        parse_config('{"task": "tunnel", "energy": 1.4}')
    assert any(p == "potential.type" for p, _ in err.value.violations)
    with pytest.raises(SchemaError) as err:
        parse_config('{"task": "nodes", "energy": 1.4, "potential": {"type": "barrier", "height": 1, "width": 1}}')
    assert any(p == "potential.type" for p, _ in err.value.violations)


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


TRAJ_DOC = {
    "task": "trajectory",
    "energy": SQRT2,
    "trajectory": {"t_span": [0.0, 20.0], "samples": 21},
}
NODES_DOC = {"task": "nodes", "energy": SQRT2, "nodes": {"n_min": 0, "n_max": 4}}
# m = 2.5 puts the four widths in the thin/intermediate/intermediate/thick bands.
TUNNEL_DOC = {
    "task": "tunnel",
    "particle": {"mass": 2.5},
    "potential": {"type": "barrier", "height": 2.0, "width": 1.0},
    "energy": 2.6,
    "constants": {"a": -1.0},
    "tunnel": {"widths": [0.01, 0.1, 1.0, 10.0]},
}
RESID_DOC = {"task": "residuals", "residuals": {"draws": 4, "points": 64}}
SWEEP_DOC = {
    "task": "sweep",
    "sweep": {"task": "nodes", "energies": [1.5, 2.0], "a_values": [1.0, 2.0]},
}


def _run(tmp_path, capsys, doc, name, fmt="csv", seed=0):
    cfg_path = _write(tmp_path, f"{name}.json", doc)
    out_path = str(tmp_path / f"{name}.{fmt}")
    code = main([doc["task"], "--config", cfg_path, "--out", out_path,
                 "--format", fmt, "--seed", str(seed)])
    summary = json.loads(capsys.readouterr().out)
    return code, out_path, summary


def test_trajectory_artifact_columns(tmp_path, capsys):
    code, out, summary = _run(tmp_path, capsys, TRAJ_DOC, "traj")
    assert code == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "t,x,v,P,S0,qshje_residual,firqnl_residual,branch_n"
    assert len(lines) == 22
    assert summary["boundary_event"] is None
    # 17 significant digits: parsing the printed value recovers the float
    row = lines[2].split(",")
    assert float(row[0]) == 1.0
    assert float(row[2]) == pytest.approx(1 / SQRT2, rel=1e-15)
    assert format(float(row[2]), ".17g") == row[2]


def test_nodes_artifact_matches_closed_form(tmp_path, capsys):
    code, out, _ = _run(tmp_path, capsys, NODES_DOC, "nodes")
    assert code == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "n,t_n,x_n,dt,dx,v_mean,lambda_dB"
    assert len(lines) == 6
    dx_col = {row.split(",")[4] for row in lines[1:]}
    assert len(dx_col) == 1
    assert float(dx_col.pop()) == pytest.approx(math.pi, rel=1e-12)


def test_tunnel_artifact_regimes(tmp_path, capsys):
    code, out, summary = _run(tmp_path, capsys, TUNNEL_DOC, "tunnel")
    assert code == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "q,xi,T_exact,T_thin,T_thick,regime"
    regimes = [row.split(",")[-1] for row in lines[1:]]
    assert regimes == ["thin", "intermediate", "intermediate", "thick"]
    assert summary["regimes"] == regimes


def test_residuals_artifact(tmp_path, capsys):
    code, out, summary = _run(tmp_path, capsys, RESID_DOC, "resid", seed=3)
    assert code == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "draw,regime,epsilon,a,b,points,max_qshje,max_firqnl"
    assert len(lines) == 1 + 2 * 4  # both regimes
    assert summary["max_qshje"] <= 1e-10
    assert summary["max_firqnl"] <= 1e-8


def test_sweep_artifact(tmp_path, capsys):
    code, out, _ = _run(tmp_path, capsys, SWEEP_DOC, "sweep")
    assert code == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "E,a,b,dt,dx,v_mean,lambda_dB"
    assert len(lines) == 5


@pytest.mark.parametrize("doc,name", [
    (TRAJ_DOC, "traj"), (NODES_DOC, "nodes"), (TUNNEL_DOC, "tunnel"),
    (RESID_DOC, "resid"), (SWEEP_DOC, "sweep"),
])
def test_rerun_byte_identical(tmp_path, capsys, doc, name):
    _, out1, _ = _run(tmp_path, capsys, doc, name + "_1", seed=5)
    _, out2, _ = _run(tmp_path, capsys, doc, name + "_2", seed=5)
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_json_round_trip_full_precision(tmp_path, capsys):
    # The same scenario written as CSV (17 significant digits) and JSON
    # must re-parse to bit-identical floats.
    code_c, out_c, _ = _run(tmp_path, capsys, TRAJ_DOC, "traj_rt", fmt="csv")
    code_j, out_j, _ = _run(tmp_path, capsys, TRAJ_DOC, "traj_rt", fmt="json")
    assert code_c == 0 and code_j == 0
    payload = json.loads(open(out_j).read())
    lines = open(out_c).read().splitlines()
    assert payload["columns"] == lines[0].split(",")
    for rec, line in zip(payload["records"], lines[1:]):
        for col, cell in zip(payload["columns"], line.split(",")):
            if col == "branch_n":
                assert rec[col] == int(cell)
            else:
                assert rec[col] == float(cell)


def test_empty_records_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit([], ("a", "b"), "csv", path)
    assert path.read_text() == "a,b\n"
    emit([], ("a", "b"), "json", tmp_path / "empty.json")
    assert json.loads((tmp_path / "empty.json").read_text()) == {"columns": ["a", "b"], "records": []}


def test_missing_config_exits_1(tmp_path, capsys):
    assert main(["nodes", "--config", str(tmp_path / "nope.json")]) == 1
    assert "cannot read config" in capsys.readouterr().err


def test_schema_errors_exit_1(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.json", {"task": "nodes", "energy": 1.5, "constants": {"a": 0.0}})
    assert main(["nodes", "--config", cfg]) == 1
    assert "constants.a" in capsys.readouterr().err


def test_task_mismatch_exits_1(tmp_path, capsys):
    cfg = _write(tmp_path, "t.json", TRAJ_DOC)
    assert main(["nodes", "--config", cfg]) == 1
    capsys.readouterr()


def test_boundary_event_exits_2(tmp_path, capsys):
    # Tabulated ramp with a turning point inside the sampled window:
    # partial artifact plus a boundary event in the summary, exit code 2.
    grid = list(np.linspace(0.0, 10.0, 101))
    doc = {
        "task": "trajectory",
        "energy": SQRT2,
        "potential": {"type": "tabulated", "x": grid, "v": [0.12 * g for g in grid]},
        "constants": {"a": 1.0, "x0": 0.5},
        "trajectory": {"t_span": [0.0, 50.0], "samples": 40},
    }
    code, out, summary = _run(tmp_path, capsys, doc, "turning")
    assert code == 2
    assert summary["boundary_event"]["kind"] == "turning"
    lines = open(out).read().splitlines()
    assert 1 < len(lines) < 41


def test_numerical_error_exits_2(tmp_path, capsys):
    # eps inside the barrier is not evanescent -> numerical-boundary exit.
    doc = dict(TUNNEL_DOC)
    doc["energy"] = 30.0
    cfg = _write(tmp_path, "bad_tunnel.json", doc)
    assert main(["tunnel", "--config", cfg]) == 2
    assert "numerical boundary" in capsys.readouterr().err
