"""Built-in problems: the qubit and qutrit examples with their published data.

The qubit fourth target is stored with a sigma_z coefficient of -sqrt(3)/4
(the only value that makes it a pure state).  The qutrit matrices are kept to
the six decimals in which they were published and carry ``project_targets``.
"""

from __future__ import annotations

import dataclasses
from importlib import resources

from qspline.problem_io import parse_problem
from qspline.solver import ProblemSpec

SCENARIOS = ("qubit", "qutrit", "qutrit-off-orbit")


def scenario_text(name: str) -> str:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    return resources.files("qspline.data").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_scenario(name: str, **overrides) -> ProblemSpec:
    """Load a built-in scenario; keyword overrides (epsilon, iterations, steps, ...) win."""
    spec = parse_problem(scenario_text(name))
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(spec, **overrides) if overrides else spec
