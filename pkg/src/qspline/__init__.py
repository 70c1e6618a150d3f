"""Quantum splines: piecewise-cubic Hamiltonians that steer density matrices
through prescribed states at prescribed times."""

__version__ = "0.1.0"

from qspline.dynamics import get_backend, set_backend
from qspline.lie_basis import (
    AlgebraElement,
    LieBasis,
    bracket,
    build_basis,
    distance,
    from_coords,
    inner,
    to_coords,
)
from qspline.quantum_state import DensityState, bloch_coords, orbit_distance, purity, validate
from qspline.solver import ProblemSpec, SplineReport, Target, evaluate_cost, solve_spline

__all__ = [
    "AlgebraElement",
    "DensityState",
    "LieBasis",
    "ProblemSpec",
    "SplineReport",
    "Target",
    "bloch_coords",
    "bracket",
    "build_basis",
    "distance",
    "evaluate_cost",
    "from_coords",
    "get_backend",
    "inner",
    "orbit_distance",
    "purity",
    "set_backend",
    "solve_spline",
    "to_coords",
    "validate",
]
