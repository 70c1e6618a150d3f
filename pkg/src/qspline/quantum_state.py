"""Density states: validation, purity, spectra and unitary-orbit diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qspline.errors import DimensionError, PositivityError, TraceError
from qspline.lie_basis import AlgebraElement, LieBasis, build_basis, to_coords

TRACE_TOL = 1e-12
POSITIVITY_SLACK = 1e-10
SAME_ORBIT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DensityState:
    """A validated density matrix.  ``spectrum`` is sorted descending."""

    element: AlgebraElement
    spectrum: np.ndarray

    @property
    def n(self) -> int:
        return self.element.n

    @property
    def basis(self) -> LieBasis:
        return self.element.basis

    @property
    def coords(self) -> np.ndarray:
        return self.element.coords

    def matrix(self) -> np.ndarray:
        return self.element.matrix()


def validate(m, basis: LieBasis | None = None) -> DensityState:
    """Check that ``m`` is a density matrix and wrap it.

    Raises:
        TraceError: ``|Tr m - 1| > 1e-12``.
        PositivityError: an eigenvalue is below ``-1e-10``.
    """
    m = np.asarray(m, dtype=complex)
    if basis is None:
        if m.ndim != 2:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
        basis = build_basis(m.shape[0])
    element = to_coords(m, basis)
    trace = float(np.trace(m).real)
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceError(f"trace is {trace!r}, expected 1")
    spectrum = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[::-1].copy()
    if spectrum[-1] < -POSITIVITY_SLACK:
        raise PositivityError(f"negative eigenvalue {spectrum[-1]!r}")
    spectrum.setflags(write=False)
    return DensityState(element, spectrum)


def from_element(a: AlgebraElement) -> DensityState:
    return validate(a.matrix(), a.basis)


def nearest_density_matrix(m) -> np.ndarray:
    """Frobenius-nearest density matrix to a Hermitian ``m``.

    Hermitizes, then projects the eigenvalues onto the probability simplex.
    """
    m = np.asarray(m, dtype=complex)
    m = 0.5 * (m + m.conj().T)
    w, u = np.linalg.eigh(m)
    # simplex projection (sort-and-threshold)
    s = np.sort(w)[::-1]
    cssv = np.cumsum(s) - 1.0
    k = np.arange(1, len(s) + 1)
    rho = np.nonzero(s - cssv / k > 0)[0][-1]
    theta = cssv[rho] / (rho + 1)
    p = np.maximum(w - theta, 0.0)
    out = (u * p) @ u.conj().T
    return 0.5 * (out + out.conj().T)


def purity(s: DensityState) -> float:
    """``Tr rho^2``; equals 1 exactly for pure states."""
    return float(np.sum(s.spectrum**2))


def is_pure(s: DensityState, tol: float = 1e-10) -> bool:
    return abs(purity(s) - 1.0) <= tol


def spectrum_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.sort(np.asarray(a, dtype=float))[::-1]
    b = np.sort(np.asarray(b, dtype=float))[::-1]
    return float(np.sqrt(0.5 * np.sum((a - b) ** 2)))


def orbit_distance(a: DensityState, b: DensityState) -> float:
    """Distance between the unitary orbits of ``a`` and ``b``.

    For Hermitian operators ``min_U d(a, U b U^H)`` is attained by aligning
    eigenvectors with both spectra sorted the same way.
    """
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")
    return spectrum_distance(a.spectrum, b.spectrum)


def same_orbit(a: DensityState, b: DensityState, tol: float = SAME_ORBIT_TOL) -> bool:
    return orbit_distance(a, b) < tol


def bloch_coords(s: DensityState) -> tuple[float, float, float]:
    """The (sigma_x, sigma_y, sigma_z) coordinates of a qubit state.

    Pure states lie on the sphere of radius 1/2.
    """
    if s.n != 2:
        raise DimensionError(f"Bloch coordinates need n = 2, got n = {s.n}")
    x = s.coords
    return float(x[1]), float(x[2]), float(x[3])
