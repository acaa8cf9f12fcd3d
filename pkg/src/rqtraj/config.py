"""Scenario configuration: a JSON document validated into typed objects.

``parse_config`` collects every violation (as ``path: message`` pairs)
before failing, so one run reports all problems at once.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import SchemaError
from .hj import MicrostateConstants
from .model import (
    NON_RELATIVISTIC,
    RELATIVISTIC,
    PhysicalParams,
    PiecewiseConstant,
    Potential,
    RectangularBarrier,
    Tabulated,
    uniform_potential,
)

TASKS = ("trajectory", "nodes", "tunnel", "residuals", "sweep")
POTENTIAL_TYPES = ("uniform", "piecewise", "barrier", "tabulated")
REGIMES = ("propagating", "evanescent", "both")


@dataclass
class TrajectoryTask:
    t_span: tuple[float, float] = (0.0, 10.0)
    samples: int = 201
    domain: tuple[float, float] | None = None  # numeric-basis domain override


@dataclass
class NodesTask:
    n_min: int = 0
    n_max: int = 9


@dataclass
class TunnelTask:
    widths: list[float] = field(default_factory=list)  # empty -> barrier width
    nonrelativistic: bool = False


@dataclass
class ResidualsTask:
    draws: int = 50
    points: int = 1000
    regime: str = "both"


@dataclass
class SweepTask:
    task: str = "nodes"  # "nodes" | "tunnel"
    energies: list[float] = field(default_factory=list)
    a_values: list[float] = field(default_factory=list)
    b_values: list[float] = field(default_factory=list)
    widths: list[float] = field(default_factory=list)


@dataclass
class ScenarioConfig:
    params: PhysicalParams
    potential: Potential
    constants: MicrostateConstants
    task: str
    energy: float | None = None
    energy_nr: float | None = None
    trajectory: TrajectoryTask = field(default_factory=TrajectoryTask)
    nodes: NodesTask = field(default_factory=NodesTask)
    tunnel: TunnelTask = field(default_factory=TunnelTask)
    residuals: ResidualsTask = field(default_factory=ResidualsTask)
    sweep: SweepTask = field(default_factory=SweepTask)


class _Check:
    """Accumulates (path, message) violations while pulling typed values."""

    def __init__(self):
        self.violations: list[tuple[str, str]] = []

    def fail(self, path, msg):
        self.violations.append((path, msg))

    def number(self, obj, key, path, default=None, required=False):
        if key not in obj:
            if required:
                self.fail(f"{path}.{key}", "required value is missing")
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(f"{path}.{key}", f"expected a finite number, got {v!r}")
            return default
        return float(v)

    def integer(self, obj, key, path, default=None):
        if key not in obj:
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(f"{path}.{key}", f"expected an integer, got {v!r}")
            return default
        return v

    def table(self, obj, key, path):
        v = obj.get(key, {})
        if not isinstance(v, dict):
            self.fail(f"{path}.{key}" if path else key, f"expected an object, got {v!r}")
            return {}
        return v

    def number_list(self, obj, key, path, default=None):
        if key not in obj:
            return default
        v = obj[key]
        if not isinstance(v, list) or any(
            isinstance(e, bool) or not isinstance(e, (int, float)) for e in v
        ):
            self.fail(f"{path}.{key}", f"expected a list of numbers, got {v!r}")
            return default
        return [float(e) for e in v]

    def unknown_keys(self, obj, known, path):
        for key in obj:
            if key not in known:
                self.fail(f"{path}.{key}" if path else key, "unknown key")


def _parse_potential(chk: _Check, doc: dict) -> Potential | None:
    pot = doc.get("potential", {"type": "uniform"})
    if not isinstance(pot, dict):
        chk.fail("potential", f"expected an object, got {pot!r}")
        return None
    kind = pot.get("type", "uniform")
    if kind not in POTENTIAL_TYPES:
        chk.fail("potential.type", f"must be one of {', '.join(POTENTIAL_TYPES)}; got {kind!r}")
        return None
    try:
        if kind == "uniform":
            chk.unknown_keys(pot, {"type", "value"}, "potential")
            return uniform_potential(chk.number(pot, "value", "potential", 0.0) or 0.0)
        if kind == "barrier":
            chk.unknown_keys(pot, {"type", "height", "width"}, "potential")
            height = chk.number(pot, "height", "potential", required=True)
            width = chk.number(pot, "width", "potential", required=True)
            if height is None or width is None:
                return None
            return RectangularBarrier(height, width)
        if kind == "piecewise":
            chk.unknown_keys(pot, {"type", "segments"}, "potential")
            segs = pot.get("segments")
            if not isinstance(segs, list) or not all(
                isinstance(s, list) and len(s) == 3 for s in segs
            ):
                chk.fail("potential.segments", "expected a list of [x_left, x_right, value] triples")
                return None
            clean = [
                tuple(-math.inf if e == "-inf" else math.inf if e == "inf" else float(e) for e in s)
                for s in segs
            ]
            return PiecewiseConstant(clean)
        chk.unknown_keys(pot, {"type", "x", "v"}, "potential")
        xs = chk.number_list(pot, "x", "potential")
        vs = chk.number_list(pot, "v", "potential")
        if xs is None or vs is None:
            chk.fail("potential", "tabulated potential needs 'x' and 'v' arrays")
            return None
        return Tabulated(xs, vs)
    except (ValueError, TypeError) as exc:
        chk.fail("potential", str(exc))
        return None


def parse_config(text: str, default_task: str | None = None) -> ScenarioConfig:
    """Validate a JSON scenario document; raises SchemaError listing every
    violation found.  ``default_task`` (e.g. the CLI subcommand) fills in a
    missing "task" key and must agree with an explicit one."""
    chk = _Check()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError([("$", f"not valid JSON: {exc}")]) from exc
    if not isinstance(doc, dict):
        raise SchemaError([("$", "top level must be an object")])

    chk.unknown_keys(
        doc,
        {"mode", "particle", "potential", "energy", "energy_nr", "constants", "task",
         "trajectory", "nodes", "tunnel", "residuals", "sweep"},
        "",
    )

    mode = doc.get("mode", RELATIVISTIC)
    if mode not in (RELATIVISTIC, NON_RELATIVISTIC):
        chk.fail("mode", f"must be {RELATIVISTIC!r} or {NON_RELATIVISTIC!r}; got {mode!r}")
        mode = RELATIVISTIC

    part = chk.table(doc, "particle", "")
    chk.unknown_keys(part, {"mass", "c", "hbar"}, "particle")
    mass = chk.number(part, "mass", "particle", 1.0)
    light = chk.number(part, "c", "particle", 1.0)
    hbar = chk.number(part, "hbar", "particle", 1.0)
    params = None
    try:
        params = PhysicalParams(mass, light, hbar, mode)
    except (ValueError, TypeError) as exc:
        chk.fail("particle", str(exc))

    potential = _parse_potential(chk, doc)

    cons = chk.table(doc, "constants", "")
    chk.unknown_keys(cons, {"a", "b", "t0", "x0"}, "constants")
    a = chk.number(cons, "a", "constants", 1.0)
    b = chk.number(cons, "b", "constants", 0.0)
    t0 = chk.number(cons, "t0", "constants", 0.0)
    x0 = cons.get("x0", None)
    if x0 is not None:
        x0 = chk.number(cons, "x0", "constants")
    constants = None
    if a == 0.0:
        chk.fail("constants.a", "a must be nonzero (a = 0 collapses the momentum)")
    elif a is not None:
        constants = MicrostateConstants(a, b or 0.0, 0.0, t0 or 0.0, x0)

    task = doc.get("task", default_task)
    if task is None:
        chk.fail("task", f"required; must be one of {', '.join(TASKS)}")
    elif task not in TASKS:
        chk.fail("task", f"must be one of {', '.join(TASKS)}; got {task!r}")
        task = None
    if default_task is not None and task is not None and task != default_task:
        chk.fail("task", f"config says {task!r} but the command line asked for {default_task!r}")

    energy = chk.number(doc, "energy", "$") if "energy" in doc else None
    energy_nr = chk.number(doc, "energy_nr", "$") if "energy_nr" in doc else None

    traj = TrajectoryTask()
    sec = chk.table(doc, "trajectory", "")
    chk.unknown_keys(sec, {"t_span", "samples", "domain"}, "trajectory")
    span = chk.number_list(sec, "t_span", "trajectory", list(traj.t_span))
    if span is not None and len(span) != 2:
        chk.fail("trajectory.t_span", "expected [t_start, t_end]")
    else:
        traj.t_span = (span[0], span[1])
    samples = chk.integer(sec, "samples", "trajectory", traj.samples)
    if samples is not None and samples < 2:
        chk.fail("trajectory.samples", f"sample count must be >= 2, got {samples}")
    else:
        traj.samples = samples
    dom = chk.number_list(sec, "domain", "trajectory")
    if dom is not None:
        if len(dom) != 2 or not dom[0] < dom[1]:
            chk.fail("trajectory.domain", "expected [lo, hi] with lo < hi")
        else:
            traj.domain = (dom[0], dom[1])

    nodes = NodesTask()
    sec = chk.table(doc, "nodes", "")
    chk.unknown_keys(sec, {"n_min", "n_max"}, "nodes")
    nodes.n_min = chk.integer(sec, "n_min", "nodes", nodes.n_min)
    nodes.n_max = chk.integer(sec, "n_max", "nodes", nodes.n_max)
    if nodes.n_min is not None and nodes.n_max is not None and nodes.n_max < nodes.n_min:
        chk.fail("nodes.n_max", "n_max must be >= n_min")

    tunnel = TunnelTask()
    sec = chk.table(doc, "tunnel", "")
    chk.unknown_keys(sec, {"widths", "nonrelativistic"}, "tunnel")
    widths = chk.number_list(sec, "widths", "tunnel", [])
    if widths and any(w <= 0 for w in widths):
        chk.fail("tunnel.widths", "barrier widths must be positive")
    else:
        tunnel.widths = widths or []
    nr_flag = sec.get("nonrelativistic", False)
    if not isinstance(nr_flag, bool):
        chk.fail("tunnel.nonrelativistic", f"expected true/false, got {nr_flag!r}")
    else:
        tunnel.nonrelativistic = nr_flag

    residuals = ResidualsTask()
    sec = chk.table(doc, "residuals", "")
    chk.unknown_keys(sec, {"draws", "points", "regime"}, "residuals")
    draws = chk.integer(sec, "draws", "residuals", residuals.draws)
    if draws is not None and draws < 1:
        chk.fail("residuals.draws", "draw count must be >= 1")
    else:
        residuals.draws = draws
    points = chk.integer(sec, "points", "residuals", residuals.points)
    if points is not None and points < 2:
        chk.fail("residuals.points", "sample count must be >= 2")
    else:
        residuals.points = points
    regime = sec.get("regime", residuals.regime)
    if regime not in REGIMES:
        chk.fail("residuals.regime", f"must be one of {', '.join(REGIMES)}; got {regime!r}")
    else:
        residuals.regime = regime

    sweep = SweepTask()
    sec = chk.table(doc, "sweep", "")
    chk.unknown_keys(sec, {"task", "energies", "a_values", "b_values", "widths"}, "sweep")
    inner = sec.get("task", sweep.task)
    if inner not in ("nodes", "tunnel"):
        chk.fail("sweep.task", f"must be 'nodes' or 'tunnel'; got {inner!r}")
    else:
        sweep.task = inner
    sweep.energies = chk.number_list(sec, "energies", "sweep", []) or []
    sweep.a_values = chk.number_list(sec, "a_values", "sweep", []) or []
    sweep.b_values = chk.number_list(sec, "b_values", "sweep", []) or []
    sweep.widths = chk.number_list(sec, "widths", "sweep", []) or []
    if 0.0 in sweep.a_values:
        chk.fail("sweep.a_values", "a must be nonzero (a = 0 collapses the momentum)")

    # Cross-field requirements.
    if task == "tunnel" and tunnel.nonrelativistic:
        if energy_nr is None:
            chk.fail("energy_nr", "tunnel comparison needs 'energy_nr'")
    elif task in ("trajectory", "nodes", "tunnel") and energy is None:
        chk.fail("energy", f"task {task!r} needs 'energy'")
    elif task == "sweep" and energy is None and not sweep.energies:
        chk.fail("sweep.energies", "sweep needs 'energies' (or a top-level 'energy')")
    if task in ("tunnel",) or (task == "sweep" and sweep.task == "tunnel"):
        if potential is not None and not isinstance(potential, RectangularBarrier):
            chk.fail("potential.type", "tunnel tasks need a 'barrier' potential")
    if task in ("nodes", "residuals") or (task == "sweep" and sweep.task == "nodes"):
        if potential is not None and not (
            isinstance(potential, PiecewiseConstant) and len(potential.segments) == 1
        ):
            chk.fail("potential.type", f"task {task!r} needs a uniform potential")

    if chk.violations:
        raise SchemaError(chk.violations)
    return ScenarioConfig(
        params=params,
        potential=potential,
        constants=constants,
        task=task,
        energy=energy,
        energy_nr=energy_nr,
        trajectory=traj,
        nodes=nodes,
        tunnel=tunnel,
        residuals=residuals,
        sweep=sweep,
    )
