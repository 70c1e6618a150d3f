import numpy as np
import pytest

from oracles import brute_force_orbit_distance, random_density, random_unitary
from qspline.errors import DimensionError, PositivityError, TraceError, ValidationError
from qspline.lie_basis import distance
from qspline.quantum_state import (
    bloch_coords,
    is_pure,
    nearest_density_matrix,
    orbit_distance,
    purity,
    same_orbit,
    validate,
)


def test_validate_mixed_qutrit():
    s = validate(np.diag([1 / 3, 2 / 3, 0]))
    np.testing.assert_allclose(s.spectrum, [2 / 3, 1 / 3, 0], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_validate_maximally_mixed(n):
    s = validate(np.eye(n) / n)
    np.testing.assert_allclose(s.spectrum, np.full(n, 1 / n))


def test_validate_negative_eigenvalue():
    with pytest.raises(PositivityError, match="-0.5"):
        validate(np.diag([1.5, -0.5]))


def test_validate_trace():
    with pytest.raises(TraceError, match="1.1"):
        validate(np.diag([0.6, 0.5]))


def test_validate_non_hermitian():
    with pytest.raises(ValidationError):
        validate(np.array([[0.5, 0.1], [0.0, 0.5]]))


def test_identity_coordinate_encodes_trace(b2, b3):
    # unit trace fixes the identity coordinate at 1/sqrt(2n)
    assert validate(np.diag([0.3, 0.7]), b2).coords[0] == pytest.approx(0.5, abs=1e-15)
    assert validate(np.diag([0.2, 0.3, 0.5]), b3).coords[8] == pytest.approx(1 / np.sqrt(6), abs=1e-15)


def test_purity_examples(qubit_states):
    for s in qubit_states:
        assert purity(s) == pytest.approx(1.0, abs=1e-12)
        assert is_pure(s)
    assert purity(validate(np.eye(3) / 3)) == pytest.approx(1 / 3)
    assert purity(validate(np.diag([1 / 3, 2 / 3, 0]))) == pytest.approx(5 / 9)
    assert not is_pure(validate(np.diag([1 / 3, 2 / 3, 0])))


def test_orbit_distance_published_floor():
    a = validate(np.diag([1 / 3 - 0.001, 2 / 3 + 0.001, 0]))
    b = validate(np.diag([1 / 3, 2 / 3, 0]))
    assert orbit_distance(a, b) == pytest.approx(0.001, rel=1e-9)
    assert orbit_distance(a, a) == 0.0
    assert same_orbit(b, b)
    assert not same_orbit(a, b)


def test_orbit_distance_dimension_mismatch():
    with pytest.raises(DimensionError):
        orbit_distance(validate(np.eye(2) / 2), validate(np.eye(3) / 3))


def test_orbit_distance_lower_bounds_distance(rng):
    for _ in range(500):
        a = validate(random_density(3, rng))
        b = validate(random_density(3, rng))
        assert orbit_distance(a, b) <= distance(a.element, b.element) + 1e-12


def test_orbit_distance_against_random_unitaries(rng):
    a = validate(random_density(3, rng))
    b = validate(random_density(3, rng))
    floor = orbit_distance(a, b)
    best = brute_force_orbit_distance(a, b, 10_000, rng)
    assert best >= floor - 1e-9
    # the sampled minimum approaches the floor from above
    assert best - floor < 0.5 * (distance(a.element, b.element) - floor) + 1e-3


@pytest.mark.parametrize("n", [2, 3, 4])
def test_conjugation_invariants(n, rng):
    s = validate(random_density(n, rng, rank=max(1, n - 1)))
    for _ in range(100):
        u = random_unitary(n, rng)
        t = validate(u @ s.matrix() @ u.conj().T, s.basis)
        assert orbit_distance(s, t) < 1e-10
        assert abs(purity(s) - purity(t)) < 1e-10
        assert np.max(np.abs(s.spectrum - t.spectrum)) < 1e-10


def test_bloch_coords_examples(qubit_states):
    assert bloch_coords(qubit_states[0]) == (0.0, 0.0, 0.5)
    assert bloch_coords(validate(np.eye(2) / 2)) == (0.0, 0.0, 0.0)
    assert bloch_coords(qubit_states[3]) == pytest.approx((0.5, 0.0, 0.0), abs=1e-15)
    for s in qubit_states:
        assert sum(v * v for v in bloch_coords(s)) == pytest.approx(0.25, abs=1e-12)


def test_bloch_coords_random_pure_states(rng):
    for _ in range(50):
        s = validate(random_density(2, rng, rank=1))
        assert sum(v * v for v in bloch_coords(s)) == pytest.approx(0.25, abs=1e-12)


def test_bloch_coords_needs_qubit():
    with pytest.raises(DimensionError):
        bloch_coords(validate(np.eye(3) / 3))


def test_nearest_density_matrix_fixes_rounding():
    m = np.diag([0.5, 0.5000004, -2e-7])
    s = validate(nearest_density_matrix(m))
    assert s.spectrum[-1] >= 0
    assert np.trace(s.matrix()).real == pytest.approx(1.0, abs=1e-14)
    rho = np.diag([0.2, 0.8])
    np.testing.assert_allclose(nearest_density_matrix(rho), rho, atol=1e-15)
