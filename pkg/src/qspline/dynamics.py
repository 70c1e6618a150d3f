"""Coupled state/Hamiltonian dynamics and the Gauss-Legendre integrator.

In coordinates over an orthonormal basis the extremal curves obey

    x' = [y, x],   y' = v,   v' = k + [y, v]

where x is the density state, y the Hamiltonian, v its time derivative (the
control) and k a constant steering acceleration fixed per subinterval.  The
(y, v) block does not depend on x, which the shooting code exploits.

The stepping loop lives in a compiled kernel (``qspline._gl_core``) with a
numpy fallback; set ``QSPLINE_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from qspline import _kernels_py
from qspline.errors import BasisMismatchError, StageConvergenceError
from qspline.lie_basis import AlgebraElement, LieBasis

try:
    from qspline import _gl_core
except ImportError:  # pragma: no cover - depends on the build
    _gl_core = None

STAGE_TOL = 1e-14
STAGE_FAIL_TOL = 1e-12
MAX_SWEEPS = 100

_BACKENDS = {"python": _kernels_py}
if _gl_core is not None:
    _BACKENDS["compiled"] = _gl_core


def _default_backend() -> str:
    requested = os.environ.get("QSPLINE_BACKEND", "").strip().lower()
    if requested in _BACKENDS:
        return requested
    return "compiled" if "compiled" in _BACKENDS else "python"


_active = _default_backend()


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = name


@dataclass(frozen=True)
class PhaseState:
    """Coordinates of (rho, H, H') at time ``t``."""

    t: float
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Uniform samples of one subinterval.  Arrays have shape (steps + 1, m)."""

    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray
    K: AlgebraElement
    h: float

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> PhaseState:
        return PhaseState(float(self.times[i]), self.x[i], self.y[i], self.v[i])

    @property
    def samples(self) -> list[PhaseState]:
        return [self.state(i) for i in range(len(self))]

    @property
    def final(self) -> PhaseState:
        return self.state(-1)


def _coords(k, basis: LieBasis) -> np.ndarray:
    if isinstance(k, AlgebraElement):
        if k.basis != basis:
            raise BasisMismatchError("K lives over a different basis")
        return k.coords
    k = np.asarray(k, dtype=float)
    if k.shape != (basis.dim,):
        raise BasisMismatchError(f"expected {basis.dim} coordinates, got shape {k.shape}")
    return k


def vector_field(s: PhaseState, K, basis: LieBasis):
    """Right-hand side ``(x', y', v')`` at ``s``."""
    k = _coords(K, basis)
    for name in ("x", "y", "v"):
        if np.shape(getattr(s, name)) != (basis.dim,):
            raise BasisMismatchError(f"{name} has wrong length for n={basis.n}")
    xdot = basis.bracket_coords(s.y, s.x)
    vdot = k + basis.bracket_coords(s.y, s.v)
    return xdot, np.array(s.v, dtype=float), vdot


def _run(z0, k, h, steps, basis, with_x, store):
    kernel = _BACKENDS[_active]
    out, status, fail_step, res = kernel.integrate(
        z0, k, float(h), int(steps),
        basis.nz_l, basis.nz_r, basis.nz_s, basis.nz_val,
        bool(with_x), bool(store),
        STAGE_TOL, STAGE_FAIL_TOL, MAX_SWEEPS,
    )
    if status:
        raise StageConvergenceError(
            f"stage iteration stalled at residual {res:.3e} on step {fail_step} "
            f"(h = {h:g}); reduce the step size"
        )
    return out


def gauss_step(s: PhaseState, h: float, K, basis: LieBasis) -> PhaseState:
    """One two-stage (order 4) Gauss-Legendre step.  ``h`` may be negative."""
    if h == 0:
        raise ValueError("step size must be nonzero")
    k = _coords(K, basis)
    m = basis.dim
    z = _run(np.concatenate([s.x, s.y, s.v]), k, h, 1, basis, True, False)
    return PhaseState(s.t + h, z[:m], z[m:2 * m], z[2 * m:])


def integrate(s0: PhaseState, K, t_end: float, steps: int, basis: LieBasis) -> Trajectory:
    """Integrate from ``s0.t`` to ``t_end`` in ``steps`` uniform steps, keeping all samples."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not t_end > s0.t:
        raise ValueError("t_end must exceed the start time")
    k = _coords(K, basis)
    m = basis.dim
    h = (t_end - s0.t) / steps
    z = _run(np.concatenate([s0.x, s0.y, s0.v]), k, h, steps, basis, True, True)
    times = s0.t + h * np.arange(steps + 1)
    times[-1] = t_end
    K_el = K if isinstance(K, AlgebraElement) else AlgebraElement(basis, k)
    return Trajectory(times, z[:, :m], z[:, m:2 * m], z[:, 2 * m:], K_el, h)


def terminal_yv(y0, v0, k, duration: float, steps: int, basis: LieBasis) -> np.ndarray:
    """Endpoint ``[y, v]`` of the Hamiltonian block alone (no samples kept)."""
    h = duration / steps
    return _run(np.concatenate([y0, v0]), k, h, steps, basis, False, False)
