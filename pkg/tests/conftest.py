import time

import numpy as np
import pytest

import acceptance_log

from qspline import dynamics
from qspline.lie_basis import build_basis
from qspline.quantum_state import validate
from qspline.scenarios import load_scenario
from qspline.solver import solve_spline

SQ2, SQ3 = np.sqrt(2.0), np.sqrt(3.0)

# sigma coordinates (I, X, Y, Z) of the six qubit points
QUBIT_COORDS = [
    (0.5, 0.0, 0.0, 0.5),
    (0.5, 0.25, 0.25, SQ2 / 4),
    (0.5, 3 / 8, SQ3 / 8, 0.25),
    (0.5, 0.5, 0.0, 0.0),
    (0.5, SQ3 / 8, 1 / 8, -SQ3 / 4),
    (0.5, 0.0, 0.5, 0.0),
]


@pytest.fixture(scope="session")
def b2():
    return build_basis(2)


@pytest.fixture(scope="session")
def b3():
    return build_basis(3)


@pytest.fixture(scope="session")
def qubit_states(b2):
    return [validate(b2.matrix_of(np.array(c)), b2) for c in QUBIT_COORDS]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class SolvedScenarios:
    """Solves each (scenario, overrides) pair once per session and times it."""

    def __init__(self):
        self._cache = {}

    def get(self, name, **overrides):
        key = (name, tuple(sorted(overrides.items())))
        if key not in self._cache:
            start = time.perf_counter()
            report = solve_spline(load_scenario(name, **overrides))
            self._cache[key] = (report, time.perf_counter() - start)
        return self._cache[key]


@pytest.fixture(scope="session")
def solved():
    return SolvedScenarios()


@pytest.fixture(params=dynamics.available_backends())
def backend(request):
    previous = dynamics.get_backend()
    dynamics.set_backend(request.param)
    yield request.param
    dynamics.set_backend(previous)


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
