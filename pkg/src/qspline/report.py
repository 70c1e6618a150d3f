"""Tables, CSV datasets and the JSON report for solved splines."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from qspline.errors import DimensionError
from qspline.solver import SplineReport

FORMAT_VERSION = 1


@dataclass(frozen=True)
class TableRow:
    t: float
    distance: float
    J_cont: float
    J: float  # this subinterval's J_cont plus its penalty term
    J_running: float


@dataclass(frozen=True)
class DistanceTable:
    rows: tuple[TableRow, ...]
    epsilon: float

    def format(self) -> str:
        """Fixed-width text table: distances to 3 significant digits, costs to 2 decimals."""
        lines = [f"{'t':>8}  {'distance':>10}  {'J_cont':>10}  {'J':>10}  {'J_total':>10}"]
        for r in self.rows:
            lines.append(
                f"{r.t:>8.4f}  {r.distance:>10.2e}  {r.J_cont:>10.2f}  {r.J:>10.2f}  {r.J_running:>10.2f}"
            )
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "distance", "J_cont", "J", "J_running"])
        for r in self.rows:
            w.writerow([repr(r.t), repr(r.distance), repr(r.J_cont), repr(r.J), repr(r.J_running)])
        return buf.getvalue()


def build_table(report: SplineReport) -> DistanceTable:
    eps = report.spec.epsilon
    rows = [TableRow(0.0, 0.0, 0.0, 0.0, 0.0)]
    running = 0.0
    for tg, sub, jc in zip(report.spec.targets, report.subintervals, report.J_cont):
        j_sub = jc + sub.endpoint_distance**2 / (2.0 * eps)
        running += j_sub
        rows.append(TableRow(float(tg.t), sub.endpoint_distance, jc, j_sub, running))
    return DistanceTable(tuple(rows), eps)


@dataclass(frozen=True)
class BlochPath:
    """Sampled (t, x2, x3, x4) rows of a qubit trajectory plus the target markers."""

    path: np.ndarray
    targets: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "t", "x2", "x3", "x4"])
        for kind, block in (("path", self.path), ("target", self.targets)):
            for row in block:
                w.writerow([kind] + [repr(float(v)) for v in row])
        return buf.getvalue()


def export_bloch_path(report: SplineReport) -> BlochPath:
    spec = report.spec
    if spec.n != 2:
        raise DimensionError(f"Bloch export needs n = 2, got n = {spec.n}")
    rows = []
    for j, sub in enumerate(report.subintervals):
        traj = sub.trajectory
        start = 0 if j == 0 else 1  # junction sample already emitted
        block = np.column_stack([traj.times[start:], traj.x[start:, 1:4]])
        rows.append(block)
    path = np.vstack(rows)
    marks = [[0.0, *spec.rho0.coords[1:4]]]
    marks += [[tg.t, *tg.rho.coords[1:4]] for tg in spec.targets]
    return BlochPath(path, np.array(marks, dtype=float))


def trajectory_csv(report: SplineReport) -> str:
    """Every stored sample with its subinterval index; junction times appear twice."""
    m = report.spec.basis.dim
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["segment", "t"] + [f"x{i}" for i in range(1, m + 1)]
               + [f"y{i}" for i in range(1, m + 1)] + [f"v{i}" for i in range(1, m + 1)])
    for j, sub in enumerate(report.subintervals, start=1):
        traj = sub.trajectory
        for i in range(len(traj)):
            vals = np.concatenate([traj.x[i], traj.y[i], traj.v[i]])
            w.writerow([j, repr(float(traj.times[i]))] + [repr(float(v)) for v in vals])
    return buf.getvalue()


def report_dict(report: SplineReport, name: str | None = None) -> dict:
    spec = report.spec
    t_prev = 0.0
    subs = []
    for j, (tg, sub) in enumerate(zip(spec.targets, report.subintervals)):
        subs.append({
            "t_start": t_prev,
            "t_end": tg.t,
            "endpoint_distance": sub.endpoint_distance,
            "orbit_floor": sub.orbit_floor,
            "same_orbit": report.same_orbit[j],
            "J_cont": report.J_cont[j],
            "iterations_run": sub.iterations_run,
            "terminal_velocity": sub.terminal_velocity,
            "K_final": [float(v) for v in sub.K_final.coords],
            "K_consistency": sub.K_consistency,
            "K_history": sub.K_history,
            "distance_history": sub.distance_history,
            "newton_steps": sub.newton_steps,
            "rho_continuity": report.rho_continuity[j],
            "H_continuity": report.H_continuity[j],
        })
        t_prev = tg.t
    return {
        "format": FORMAT_VERSION,
        "name": name,
        "n": spec.n,
        "epsilon": spec.epsilon,
        "iterations": spec.iterations,
        "steps": spec.steps,
        "tol_shoot": spec.tol_shoot,
        "J": report.J,
        "J_cont_total": float(sum(report.J_cont)),
        "penalty": report.penalty,
        "orbit_warning": report.orbit_warning,
        "subintervals": subs,
    }


def report_json(report: SplineReport, name: str | None = None) -> str:
    return json.dumps(report_dict(report, name), indent=2) + "\n"
