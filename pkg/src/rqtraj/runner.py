"""Scenario execution and artifact emission.

Outputs are deterministic: the same configuration (and seed, for the
randomized residual sweeps) produces byte-identical files.  Floating
values are printed with 17 significant digits so CSV and JSON round-trip
binary64 exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .basis import constant_basis, numeric_basis
from .config import ScenarioConfig
from .constant_motion import node_table
from .dynamics import (
    KinematicState,
    TrajectoryResult,
    firqnl_residual,
    integrate_trajectory,
    _kinematics_arrays,
)
from .errors import IoError
from .hj import HJState, MicrostateConstants, qshje_residual
from .model import PiecewiseConstant, RectangularBarrier, Tabulated
from .tunneling import barrier_delay, nonrelativistic_delay

TRAJECTORY_COLUMNS = ("t", "x", "v", "P", "S0", "qshje_residual", "firqnl_residual", "branch_n")
NODE_COLUMNS = ("n", "t_n", "x_n", "dt", "dx", "v_mean", "lambda_dB")
TUNNEL_COLUMNS = ("q", "xi", "T_exact", "T_thin", "T_thick", "regime")
RESIDUAL_COLUMNS = ("draw", "regime", "epsilon", "a", "b", "points", "max_qshje", "max_firqnl")


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def emit(records, columns, fmt: str, path) -> None:
    """Write records (dicts keyed by column) as CSV or JSON.

    An empty record list still produces the header (CSV) or an empty
    records array (JSON).
    """
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(format_value(rec[c]) for c in columns) for rec in records]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = {
            "columns": list(columns),
            "records": [{c: _jsonable(rec[c]) for c in columns} for rec in records],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path!r}: {exc}") from exc


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def _segment_epsilon(cfg: ScenarioConfig, x: float):
    v, _, _ = cfg.potential.evaluate(x)
    return cfg.energy - v


def _trajectory_basis(cfg: ScenarioConfig):
    """Pick the solution pair matching the potential around the anchor."""
    pot = cfg.potential
    params = cfg.params
    if isinstance(pot, Tabulated):
        domain = cfg.trajectory.domain or pot.bounds
        return numeric_basis(params, pot, cfg.energy, domain)
    x_probe = cfg.constants.x0
    if x_probe is None:
        if isinstance(pot, PiecewiseConstant) and len(pot.segments) > 1:
            raise ValueError("constants.x0 is required for a multi-segment potential")
        x_probe = 0.5 * (max(pot.bounds[0], -1.0) + min(pot.bounds[1], 1.0))
    eps = _segment_epsilon(cfg, x_probe)
    return constant_basis(params, eps)


def _run_trajectory(cfg: ScenarioConfig):
    basis = _trajectory_basis(cfg)
    result: TrajectoryResult = integrate_trajectory(
        basis, cfg.constants, cfg.params, cfg.potential, cfg.energy,
        cfg.trajectory.t_span, cfg.trajectory.samples,
    )
    records = [
        {
            "t": s.t, "x": s.x, "v": s.v, "P": s.p, "S0": s.s0,
            "qshje_residual": s.qshje_residual, "firqnl_residual": s.firqnl_residual,
            "branch_n": s.branch_n,
        }
        for s in result.samples
    ]
    summary = {
        "samples": len(records),
        "max_qshje_residual": max((abs(r["qshje_residual"]) for r in records), default=None),
        "max_firqnl_residual": max((abs(r["firqnl_residual"]) for r in records), default=None),
        "boundary_event": None
        if result.event is None
        else {
            "kind": result.event.kind, "t": result.event.t, "x": result.event.x,
            "detail": result.event.detail,
        },
    }
    code = 2 if result.event is not None else 0
    return records, TRAJECTORY_COLUMNS, summary, code


def _run_nodes(cfg: ScenarioConfig):
    eps = _segment_epsilon(cfg, 0.0)
    table = node_table(cfg.params, eps, cfg.constants, (cfg.nodes.n_min, cfg.nodes.n_max))
    records = [
        {
            "n": int(n), "t_n": float(t), "x_n": float(x),
            "dt": table.dt, "dx": table.dx,
            "v_mean": table.mean_velocity, "lambda_dB": table.lambda_db,
        }
        for n, t, x in zip(table.n, table.t, table.x)
    ]
    summary = {
        "nodes": len(records), "epsilon": eps, "dt": table.dt, "dx": table.dx,
        "v_mean": table.mean_velocity, "lambda_dB": table.lambda_db,
    }
    return records, NODE_COLUMNS, summary, 0


def _tunnel_record(cfg, width):
    barrier = RectangularBarrier(cfg.potential.height, width)
    if cfg.tunnel.nonrelativistic:
        comp = nonrelativistic_delay(cfg.params, barrier, cfg.energy_nr, cfg.constants)
        rep = comp.relativistic
        extra = {
            "T_exact_nr": comp.t_exact_nr, "T_thin_nr": comp.t_thin_nr,
            "T_thick_nr": comp.t_thick_nr,
        }
    else:
        rep = barrier_delay(cfg.params, barrier, cfg.energy, cfg.constants)
        extra = {}
    rec = {
        "q": rep.q, "xi": rep.thinness, "T_exact": rep.t_exact,
        "T_thin": rep.t_thin, "T_thick": rep.t_thick, "regime": rep.regime,
    }
    return rec, extra


def _run_tunnel(cfg: ScenarioConfig):
    widths = cfg.tunnel.widths or [cfg.potential.width]
    records = []
    nr_rows = []
    for w in widths:
        rec, extra = _tunnel_record(cfg, w)
        records.append(rec)
        if extra:
            nr_rows.append({"q": w, **extra})
    summary = {
        "barriers": len(records),
        "regimes": [r["regime"] for r in records],
        "saturation_delay": records[-1]["T_thick"] if records else None,
    }
    if nr_rows:
        summary["nonrelativistic"] = nr_rows
    return records, TUNNEL_COLUMNS, summary, 0


def _residual_draw(rng, regime: str, params):
    e0 = params.rest_energy
    if regime == "propagating":
        eps = rng.uniform(1.05, 2.5) * e0
    else:
        eps = rng.uniform(0.15, 0.95) * e0
    a = rng.choice((-1.0, 1.0)) * rng.uniform(0.3, 3.0)
    b = rng.uniform(-2.0, 2.0)
    return eps, float(a), float(b)


def residual_maxima(params, spec, energy, basis, consts, xs):
    """Max |stationary-HJ residual| and |conservation residual| over xs."""
    p, dp, d2p, xd, xdd, xddd, _, _, _ = _kinematics_arrays(
        basis, consts, params, spec, energy, xs
    )
    q_res = qshje_residual(params, spec, energy, HJState(np.zeros_like(p), p, dp, d2p), xs)
    f_res = firqnl_residual(params, spec, energy, KinematicState(xs, xd, xdd, xddd))
    return float(np.max(np.abs(q_res))), float(np.max(np.abs(f_res)))


def _run_residuals(cfg: ScenarioConfig, seed: int):
    rng = np.random.default_rng(seed)
    params = cfg.params
    v0 = cfg.potential.segments[0][2]
    regimes = (
        ("propagating", "evanescent")
        if cfg.residuals.regime == "both"
        else (cfg.residuals.regime,)
    )
    records = []
    draw_idx = 0
    for regime in regimes:
        for _ in range(cfg.residuals.draws):
            eps, a, b = _residual_draw(rng, regime, params)
            consts = MicrostateConstants(a, b)
            basis = constant_basis(params, eps)
            if regime == "propagating":
                span = 3.0 * math.pi / basis.rate
            else:
                span = 2.5 / basis.rate
            xs = np.linspace(-span, span, cfg.residuals.points)
            mq, mf = residual_maxima(params, cfg.potential, eps + v0, basis, consts, xs)
            records.append(
                {
                    "draw": draw_idx, "regime": regime, "epsilon": eps, "a": a, "b": b,
                    "points": cfg.residuals.points, "max_qshje": mq, "max_firqnl": mf,
                }
            )
            draw_idx += 1
    summary = {
        "draws": len(records),
        "max_qshje": max(r["max_qshje"] for r in records),
        "max_firqnl": max(r["max_firqnl"] for r in records),
    }
    return records, RESIDUAL_COLUMNS, summary, 0


def _run_sweep(cfg: ScenarioConfig):
    energies = cfg.sweep.energies or ([cfg.energy] if cfg.energy is not None else [])
    if not energies:
        raise ValueError("sweep needs 'energies' (or a top-level 'energy')")
    a_values = cfg.sweep.a_values or [cfg.constants.a]
    b_values = cfg.sweep.b_values or [cfg.constants.b]
    records = []
    if cfg.sweep.task == "nodes":
        columns = ("E", "a", "b") + NODE_COLUMNS[3:]
        for energy in energies:
            for a in a_values:
                for b in b_values:
                    v0 = cfg.potential.segments[0][2]
                    consts = MicrostateConstants(a, b, t0=cfg.constants.t0)
                    table = node_table(cfg.params, energy - v0, consts, (0, 1))
                    records.append(
                        {
                            "E": energy, "a": a, "b": b, "dt": table.dt, "dx": table.dx,
                            "v_mean": table.mean_velocity, "lambda_dB": table.lambda_db,
                        }
                    )
    else:
        columns = ("E", "a", "b") + TUNNEL_COLUMNS
        widths = cfg.sweep.widths or [cfg.potential.width]
        for energy in energies:
            for a in a_values:
                for b in b_values:
                    for w in widths:
                        barrier = RectangularBarrier(cfg.potential.height, w)
                        consts = MicrostateConstants(a, b, t0=cfg.constants.t0)
                        rep = barrier_delay(cfg.params, barrier, energy, consts)
                        records.append(
                            {
                                "E": energy, "a": a, "b": b, "q": rep.q, "xi": rep.thinness,
                                "T_exact": rep.t_exact, "T_thin": rep.t_thin,
                                "T_thick": rep.t_thick, "regime": rep.regime,
                            }
                        )
    summary = {"rows": len(records), "task": cfg.sweep.task}
    return records, columns, summary, 0


def run_scenario(cfg: ScenarioConfig, out_path, fmt: str = "csv", seed: int = 0):
    """Execute one scenario and write its artifact.

    Returns (summary dict, exit code); the summary carries residual maxima,
    counts, regime labels and any boundary events.
    """
    if cfg.task == "trajectory":
        records, columns, summary, code = _run_trajectory(cfg)
    elif cfg.task == "nodes":
        records, columns, summary, code = _run_nodes(cfg)
    elif cfg.task == "tunnel":
        records, columns, summary, code = _run_tunnel(cfg)
    elif cfg.task == "residuals":
        records, columns, summary, code = _run_residuals(cfg, seed)
    elif cfg.task == "sweep":
        records, columns, summary, code = _run_sweep(cfg)
    else:  # pragma: no cover - config validation prevents this
        raise ValueError(f"unknown task {cfg.task!r}")
    emit(records, columns, fmt, out_path)
    summary = {"task": cfg.task, "output": str(out_path), "format": fmt, **summary}
    return summary, code
