"""Orthonormal Hermitian bases of u*(n) and the coordinate algebra on them.

Hermitian matrices are paired through ``<A, B> = Tr(A B) / 2`` and bracketed
with ``[A, B] = -i (A B - B A)``, which keeps the result Hermitian.  For n = 2
the basis is (I, X, Y, Z); for n = 3 it is the eight Gell-Mann matrices followed
by ``sqrt(2/3) I``; for other n it is the generalized Gell-Mann set with the
scaled identity last.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from qspline.errors import BasisMismatchError, ValidationError

HERMITIAN_TOL = 1e-12
SNAP_TOL = 1e-12


def _gell_mann_elements(n: int) -> list[np.ndarray]:
    elements = []
    for j in range(1, n):
        for k in range(j):
            sym = np.zeros((n, n), dtype=complex)
            sym[k, j] = sym[j, k] = 1.0
            anti = np.zeros((n, n), dtype=complex)
            anti[k, j] = -1j
            anti[j, k] = 1j
            elements += [sym, anti]
        diag = np.zeros(n)
        diag[:j] = 1.0
        diag[j] = -j
        elements.append(np.diag(np.sqrt(2.0 / (j * (j + 1))) * diag).astype(complex))
    elements.append(np.sqrt(2.0 / n) * np.eye(n, dtype=complex))
    return elements


def matrix_bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hermitian-preserving commutator ``-i (a b - b a)``."""
    return -1j * (a @ b - b @ a)


@dataclass(frozen=True, eq=False)
class LieBasis:
    """Orthonormal Hermitian basis of u*(n) with its structure constants.

    ``c[l, r, s]`` is the coefficient of element ``l`` in ``[e_r, e_s]``
    (0-based).  ``identity_index`` locates the central direction.
    """

    n: int
    elements: np.ndarray
    c: np.ndarray
    identity_index: int
    # sparse view of c, used by the integration kernels
    nz_l: np.ndarray = field(repr=False)
    nz_r: np.ndarray = field(repr=False)
    nz_s: np.ndarray = field(repr=False)
    nz_val: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.n * self.n

    @property
    def c_flat(self) -> np.ndarray:
        """``c`` reshaped to (m, m*m) so that ``c_flat @ outer(a, b).ravel()`` brackets."""
        return self.c.reshape(self.dim, self.dim * self.dim)

    def element(self, index: int) -> AlgebraElement:
        coords = np.zeros(self.dim)
        coords[index] = 1.0
        return AlgebraElement(self, coords)

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, np.zeros(self.dim))

    def coords_of(self, m: np.ndarray) -> np.ndarray:
        """Raw coordinate vector ``Tr(e_l M) / 2``; no validation."""
        # Tr(e_l M) = sum_ij e_l[i, j] M[j, i]
        return 0.5 * np.einsum("lij,ji->l", self.elements, m).real

    def matrix_of(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(coords, self.elements, axes=1)

    def bracket_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim)
        np.add.at(out, self.nz_l, self.nz_val * a[self.nz_r] * b[self.nz_s])
        return out

    def __eq__(self, other):
        return isinstance(other, LieBasis) and other.n == self.n

    def __hash__(self):
        return hash(("LieBasis", self.n))


@lru_cache(maxsize=None)
def build_basis(n: int) -> LieBasis:
    """Build the orthonormal basis of u*(n) and compute its structure constants.

    Results are cached, so repeated calls with the same ``n`` share one object.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
    n = int(n)
    elements = _gell_mann_elements(n)
    if n == 2:
        elements = [elements[-1]] + elements[:-1]
        identity_index = 0
    else:
        identity_index = n * n - 1
    e = np.array(elements)
    m = n * n

    c = np.zeros((m, m, m))
    for r in range(m):
        for s in range(r + 1, m):
            comm = matrix_bracket(e[r], e[s])
            col = 0.5 * np.einsum("lij,ji->l", e, comm).real
            col[np.abs(col) < SNAP_TOL] = 0.0
            c[:, r, s] = col
            c[:, s, r] = -col
    e.setflags(write=False)
    c.setflags(write=False)
    nz = np.nonzero(c)
    return LieBasis(
        n=n,
        elements=e,
        c=c,
        identity_index=identity_index,
        nz_l=nz[0].astype(np.intc),
        nz_r=nz[1].astype(np.intc),
        nz_s=nz[2].astype(np.intc),
        nz_val=np.ascontiguousarray(c[nz]),
    )


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A Hermitian operator stored as coordinates over a :class:`LieBasis`."""

    basis: LieBasis
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if coords.shape != (self.basis.dim,):
            raise BasisMismatchError(
                f"expected {self.basis.dim} coordinates, got shape {coords.shape}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.basis.n

    def matrix(self) -> np.ndarray:
        return from_coords(self)

    def _check(self, other: AlgebraElement) -> None:
        if self.basis != other.basis:
            raise BasisMismatchError(
                f"elements live over different bases (n={self.n} vs n={other.n})"
            )

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.basis, self.coords + other.coords)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.basis, self.coords - other.coords)

    def __neg__(self):
        return AlgebraElement(self.basis, -self.coords)

    def __mul__(self, scalar):
        return AlgebraElement(self.basis, float(scalar) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return AlgebraElement(self.basis, self.coords / float(scalar))

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and self.basis == other.basis
            and np.array_equal(self.coords, other.coords)
        )

    __hash__ = None

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


def to_coords(m, basis: LieBasis) -> AlgebraElement:
    """Expand a Hermitian matrix over ``basis``."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] != basis.n:
        raise BasisMismatchError(f"matrix is {m.shape[0]}x{m.shape[0]}, basis has n={basis.n}")
    skew = float(np.max(np.abs(m - m.conj().T)))
    if skew > HERMITIAN_TOL:
        raise ValidationError(f"matrix is not Hermitian (max |M - M^H| = {skew:.3e})")
    return AlgebraElement(basis, basis.coords_of(m))


def from_coords(a: AlgebraElement) -> np.ndarray:
    return a.basis.matrix_of(a.coords)


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return AlgebraElement(a.basis, a.basis.bracket_coords(a.coords, b.coords))


def inner(a: AlgebraElement, b: AlgebraElement) -> float:
    a._check(b)
    return float(np.dot(a.coords, b.coords))


def distance(a: AlgebraElement, b: AlgebraElement) -> float:
    """Distance ``sqrt(Tr((A - B)^2) / 2)``, the Euclidean norm in coordinates."""
    a._check(b)
    return float(np.linalg.norm(a.coords - b.coords))


def jacobi_residual(basis: LieBasis) -> float:
    """Largest violation of the Jacobi identity over all index quadruples."""
    c = basis.c
    # J[l, q, r, s] = sum_m c[m,r,s] c[l,m,q] + c[m,s,q] c[l,m,r] + c[m,q,r] c[l,m,s]
    t1 = np.einsum("mrs,lmq->lqrs", c, c)
    t2 = np.einsum("msq,lmr->lqrs", c, c)
    t3 = np.einsum("mqr,lms->lqrs", c, c)
    return float(np.max(np.abs(t1 + t2 + t3))) if c.size else 0.0
