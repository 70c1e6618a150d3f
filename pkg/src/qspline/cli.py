"""Command-line entry point.

    qspline solve problem.json [--out DIR] [--epsilon E] [--iterations N] [--steps S]
    qspline scenario {qubit,qutrit,qutrit-off-orbit} [same flags]
    qspline validate problem.json

Exit codes: 0 success, 1 I/O failure, 2 usage, input or solver error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from qspline import __version__
from qspline.errors import QSplineError
from qspline.problem_io import parse_problem
from qspline.report import build_table, export_bloch_path, report_json, trajectory_csv
from qspline.scenarios import SCENARIOS, load_scenario
from qspline.solver import ORBIT_WARN, ProblemSpec, SplineReport, solve_spline
from qspline.quantum_state import orbit_distance

EXIT_OK, EXIT_IO, EXIT_ERROR = 0, 1, 2


def _apply_overrides(spec: ProblemSpec, args) -> ProblemSpec:
    changes = {k: getattr(args, k) for k in ("epsilon", "iterations", "steps")}
    changes = {k: v for k, v in changes.items() if v is not None}
    return dataclasses.replace(spec, **changes) if changes else spec


def write_outputs(report: SplineReport, out: Path, name: str | None = None) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "report.json": report_json(report, name),
        "table.csv": build_table(report).to_csv(),
        "trajectory.csv": trajectory_csv(report),
    }
    if report.spec.n == 2:
        files["bloch.csv"] = export_bloch_path(report).to_csv()
    written = []
    for fname, text in files.items():
        path = out / fname
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    return written


def run_scenario(name: str, out: Path | None = None, *, epsilon=None, iterations=None,
                 steps=None) -> SplineReport:
    """Solve a built-in scenario and, if ``out`` is given, write its outputs there."""
    spec = load_scenario(name, epsilon=epsilon, iterations=iterations, steps=steps)
    report = solve_spline(spec)
    if out is not None:
        write_outputs(report, Path(out), name)
    return report


def _default_out(label: str) -> Path:
    return Path(os.environ.get("QSPLINE_OUT", "qspline-out")) / label


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qspline", description="Compute quantum splines.")
    p.add_argument("--version", action="version", version=f"qspline {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log per-subinterval progress")
    sub = p.add_subparsers(dest="command", required=True)

    def solve_flags(sp):
        sp.add_argument("--out", type=Path, help="output directory (default $QSPLINE_OUT/<name>)")
        sp.add_argument("--epsilon", type=float)
        sp.add_argument("--iterations", type=int)
        sp.add_argument("--steps", type=int)

    solve = sub.add_parser("solve", help="solve a JSON problem file")
    solve.add_argument("problem", type=Path)
    solve_flags(solve)
    scen = sub.add_parser("scenario", help="solve a built-in scenario")
    scen.add_argument("name", choices=SCENARIOS)
    solve_flags(scen)
    val = sub.add_parser("validate", help="parse and check a problem file")
    val.add_argument("problem", type=Path)
    return p


def _summary(spec: ProblemSpec) -> str:
    same = all(orbit_distance(spec.rho0, tg.rho) < ORBIT_WARN for tg in spec.targets)
    return f"{len(spec.targets)} targets, n={spec.n}, same-orbit: {'yes' if same else 'no'}"


def cli_main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "scenario":
            label = args.name
            spec = load_scenario(args.name)
        else:
            label = args.problem.stem
            spec = parse_problem(args.problem)
        if args.command == "validate":
            print(_summary(spec))
            return EXIT_OK
        spec = _apply_overrides(spec, args)
        report = solve_spline(spec)
    except OSError as exc:
        print(f"qspline: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QSplineError, ValueError) as exc:
        print(f"qspline: error: {_chain(exc)}", file=sys.stderr)
        return EXIT_ERROR

    out = args.out if args.out is not None else _default_out(label)
    try:
        write_outputs(report, out, label)
    except OSError as exc:
        print(f"qspline: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    print(build_table(report).format())
    if report.orbit_warning:
        print("warning: some targets lie off the initial unitary orbit; "
              "distances are bounded below by the orbit distance")
    print(f"J = {report.J:.6g}; outputs written to {out}")
    return EXIT_OK


def _chain(exc: BaseException) -> str:
    parts = [str(exc)]
    cause = exc.__cause__
    while cause is not None:
        parts.append(f"caused by {type(cause).__name__}: {cause}")
        cause = cause.__cause__
    return "\n  ".join(parts)


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
