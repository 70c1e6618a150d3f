"""JSON problem files.

Schema::

    {"n": int, "epsilon": float, "iterations": int, "steps": int,
     "tol_shoot": float (optional), "tol_K": float (optional),
     "project_targets": bool (optional, default false),
     "name": str (optional), "rho0": matrix, "H0": matrix,
     "targets": [{"t": float, "rho": matrix}, ...]}

A matrix is a list of rows, each row a list of ``[re, im]`` pairs.  With
``project_targets`` every state is replaced by its nearest density matrix
before validation; this exists for published data rounded to a few decimals.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from qspline.errors import SchemaError, ValidationError
from qspline.lie_basis import build_basis, to_coords
from qspline.quantum_state import nearest_density_matrix, validate
from qspline.solver import ProblemSpec, Target

REQUIRED = {"n", "epsilon", "iterations", "steps", "rho0", "H0", "targets"}
OPTIONAL = {"tol_shoot", "tol_K", "project_targets", "name"}


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj, n: int, pointer: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != n:
        raise SchemaError(f"expected {n} rows", pointer)
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"expected {n} entries", f"{pointer}/{i}")
        for j, pair in enumerate(row):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(_is_number(v) for v in pair)):
                raise SchemaError("expected a [re, im] pair of numbers", f"{pointer}/{i}/{j}")
            out[i, j] = complex(pair[0], pair[1])
    return out


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _require(doc, key, kind, pointer=""):
    value = doc[key]
    ok = _is_number(value) if kind is float else (
        isinstance(value, kind) and not isinstance(value, bool))
    if not ok:
        raise SchemaError(f"expected {kind.__name__}", f"{pointer}/{key}")
    return value


def problem_from_dict(doc: dict) -> ProblemSpec:
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    missing = REQUIRED - doc.keys()
    if missing:
        raise SchemaError(f"missing field {sorted(missing)[0]!r}", f"/{sorted(missing)[0]}")
    extra = doc.keys() - REQUIRED - OPTIONAL
    if extra:
        raise SchemaError(f"unknown field {sorted(extra)[0]!r}", f"/{sorted(extra)[0]}")

    n = _require(doc, "n", int)
    if n < 1:
        raise SchemaError("n must be positive", "/n")
    epsilon = float(_require(doc, "epsilon", float))
    if not epsilon > 0:
        raise SchemaError("epsilon must be positive", "/epsilon")
    iterations = _require(doc, "iterations", int)
    if iterations < 0:
        raise SchemaError("iterations must be >= 0", "/iterations")
    steps = _require(doc, "steps", int)
    if steps < 1:
        raise SchemaError("steps must be >= 1", "/steps")
    project = bool(doc.get("project_targets", False))
    kwargs = {}
    for key in ("tol_shoot", "tol_K"):
        if key in doc:
            kwargs[key] = float(_require(doc, key, float))

    basis = build_basis(n)

    def state(obj, pointer, label):
        m = decode_matrix(obj, n, pointer)
        if project:
            m = nearest_density_matrix(m)
        try:
            return validate(m, basis)
        except ValidationError as exc:
            raise type(exc)(f"{label}: {exc}") from exc

    rho0 = state(doc["rho0"], "/rho0", "rho0")
    try:
        H0 = to_coords(decode_matrix(doc["H0"], n, "/H0"), basis)
    except ValidationError as exc:
        raise ValidationError(f"H0: {exc}") from exc

    raw_targets = doc["targets"]
    if not isinstance(raw_targets, list) or not raw_targets:
        raise SchemaError("expected a non-empty list", "/targets")
    targets = []
    prev = 0.0
    for j, item in enumerate(raw_targets):
        ptr = f"/targets/{j}"
        if not isinstance(item, dict) or set(item) != {"t", "rho"}:
            raise SchemaError("expected an object with fields 't' and 'rho'", ptr)
        t = float(_require(item, "t", float, ptr))
        if not t > prev:
            raise SchemaError(f"target times must increase strictly (got {t} after {prev})",
                              f"{ptr}/t")
        prev = t
        targets.append(Target(t, state(item["rho"], f"{ptr}/rho", f"target {j}")))

    return ProblemSpec(n=n, targets=tuple(targets), rho0=rho0, H0=H0, epsilon=epsilon,
                       iterations=iterations, steps=steps, **kwargs)


def parse_problem(source) -> ProblemSpec:
    """Parse a problem from a path, or from JSON text."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return problem_from_dict(doc)


def problem_to_dict(spec: ProblemSpec, name: str | None = None) -> dict:
    doc = {
        "n": spec.n,
        "epsilon": spec.epsilon,
        "iterations": spec.iterations,
        "steps": spec.steps,
        "tol_shoot": spec.tol_shoot,
        "tol_K": spec.tol_K,
        "rho0": encode_matrix(spec.rho0.matrix()),
        "H0": encode_matrix(spec.H0.matrix()),
        "targets": [{"t": tg.t, "rho": encode_matrix(tg.rho.matrix())} for tg in spec.targets],
    }
    if name:
        doc["name"] = name
    return doc


_PAIR = re.compile(r"\[\s+(\S+),\s+(\S+)\s+\]")


def dumps(doc: dict) -> str:
    """Indented JSON with each ``[re, im]`` pair kept on one line."""
    return _PAIR.sub(r"[\1, \2]", json.dumps(doc, indent=1)) + "\n"


def dump_problem(spec: ProblemSpec, name: str | None = None) -> str:
    return dumps(problem_to_dict(spec, name))
