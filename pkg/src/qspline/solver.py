"""Chained penalty-steering solver for quantum splines.

Each subinterval [t_{j-1}, t_j] is handled in order.  Its start (rho, H) is the
end of the previous one; H' there is free.  For a fixed steering acceleration K
the initial H' is found by shooting so that H'(t_j) = 0.  K itself starts at
zero and is accumulated as

    K <- K + [rho_j, rho(t_j)] / epsilon

re-shooting after every update.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from qspline import dynamics
from qspline.dynamics import PhaseState, Trajectory
from qspline.errors import ShootingDivergenceError, StageConvergenceError
from qspline.lie_basis import AlgebraElement, LieBasis
from qspline.quantum_state import DensityState, orbit_distance

logger = logging.getLogger(__name__)

FD_PERTURBATION = 1e-7
MAX_NEWTON = 25
MAX_HALVINGS = 6
ORBIT_WARN = 1e-4


@dataclass(frozen=True)
class Target:
    t: float
    rho: DensityState


@dataclass(frozen=True)
class ProblemSpec:
    """A complete interpolation problem.

    ``targets`` are ``(t_j, rho_j)`` pairs with strictly increasing positive
    times; the start is ``rho0``/``H0`` at t = 0.
    """

    n: int
    targets: tuple[Target, ...]
    rho0: DensityState
    H0: AlgebraElement
    epsilon: float
    iterations: int = 50
    steps: int = 200
    tol_shoot: float = 1e-10
    tol_K: float = 1e-12
    orbit_warn: float = ORBIT_WARN

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise ValueError("at least one target is required")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        prev = 0.0
        for j, tg in enumerate(self.targets, start=1):
            if not tg.t > prev:
                raise ValueError(f"target {j}: time {tg.t} is not after {prev}")
            if tg.rho.n != self.n:
                raise ValueError(f"target {j}: dimension {tg.rho.n} != {self.n}")
            prev = tg.t
        if self.rho0.n != self.n or self.H0.n != self.n:
            raise ValueError("rho0/H0 dimension does not match n")

    @property
    def basis(self) -> LieBasis:
        return self.rho0.basis

    @property
    def times(self) -> list[float]:
        return [0.0] + [tg.t for tg in self.targets]


@dataclass
class ShotResult:
    v0: np.ndarray
    residual: float
    newton_steps: int


@dataclass
class SubintervalSolution:
    trajectory: Trajectory
    K_final: AlgebraElement
    endpoint_distance: float
    J_cont: float
    K_history: list[float] = field(default_factory=list)
    distance_history: list[float] = field(default_factory=list)
    terminal_velocity: float = 0.0
    newton_steps: list[int] = field(default_factory=list)
    orbit_floor: float = 0.0
    K_consistency: float = 0.0

    @property
    def iterations_run(self) -> int:
        return len(self.K_history)


@dataclass
class SplineReport:
    spec: ProblemSpec
    subintervals: list[SubintervalSolution]
    J: float
    J_cont: list[float]
    penalty: float
    rho_continuity: list[float]
    H_continuity: list[float]
    same_orbit: list[bool]
    orbit_warning: bool

    @property
    def distances(self) -> list[float]:
        return [s.endpoint_distance for s in self.subintervals]


def _residual_norm(r: np.ndarray) -> float:
    return float(np.linalg.norm(r))


def shoot_subinterval(x0, y0, K, t_start: float, t_end: float, steps: int,
                      tol_shoot: float, basis: LieBasis, v0_guess=None) -> ShotResult:
    """Find H'(t_start) so that H'(t_end) vanishes.

    Newton on v0 -> v(t_end) with a forward-difference Jacobian, starting from
    the bracket-free guess ``-K (t_end - t_start)``.  ``x0`` is accepted for
    interface symmetry; the Hamiltonian block does not depend on it.
    """
    if not t_end > t_start:
        raise ValueError("t_end must exceed t_start")
    k = K.coords if isinstance(K, AlgebraElement) else np.asarray(K, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    m = basis.dim
    dt = t_end - t_start
    v0 = -k * dt if v0_guess is None else np.array(v0_guess, dtype=float)

    def residual(v):
        return dynamics.terminal_yv(y0, v, k, dt, steps, basis)[m:]

    r = residual(v0)
    rn = _residual_norm(r)
    best = rn
    for it in range(MAX_NEWTON + 1):
        if rn <= tol_shoot:
            return ShotResult(v0, rn, it)
        if it == MAX_NEWTON:
            break
        jac = np.empty((m, m))
        for col in range(m):
            dv = FD_PERTURBATION * max(1.0, abs(v0[col]))
            vp = v0.copy()
            vp[col] += dv
            jac[:, col] = (residual(vp) - r) / dv
        step = np.linalg.solve(jac, -r)
        lam = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            v_try = v0 + lam * step
            try:
                r_try = residual(v_try)
            except StageConvergenceError:
                # an overshooting trial step counts as no decrease
                lam *= 0.5
                continue
            rn_try = _residual_norm(r_try)
            accepted = True
            if rn_try < rn:
                break
            lam *= 0.5
        if not accepted:
            break
        v0, r, rn = v_try, r_try, rn_try
        best = min(best, rn)
    raise ShootingDivergenceError(
        f"shooting did not reach |v(t_end)| <= {tol_shoot:g} after {MAX_NEWTON} "
        f"Newton steps (best residual {best:.3e})",
        best_residual=best,
    )


def _simpson(values: np.ndarray, h: float) -> float:
    """Composite Simpson; an odd panel count gets a trapezoid on the last panel."""
    panels = len(values) - 1
    if panels < 1:
        return 0.0
    if panels == 1:
        return 0.5 * h * float(values[0] + values[1])
    even = panels - (panels % 2)
    f = values[: even + 1]
    total = h / 3.0 * float(f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum())
    if panels % 2:
        total += 0.5 * h * float(values[-2] + values[-1])
    return total


def control_cost(traj: Trajectory) -> float:
    """``int |u|^2 / 2 dt`` over the stored samples."""
    return _simpson(0.5 * np.sum(traj.v**2, axis=1), traj.h)


def _solve_once(x0, y0, k, t_start, t_end, steps, tol_shoot, basis, guess=None):
    shot = shoot_subinterval(x0, y0, k, t_start, t_end, steps, tol_shoot, basis, guess)
    start = PhaseState(t_start, np.asarray(x0, dtype=float), np.asarray(y0, dtype=float), shot.v0)
    traj = dynamics.integrate(start, AlgebraElement(basis, k), t_end, steps, basis)
    return shot, traj


def iterate_K(x0, y0, target: DensityState, t_start: float, t_end: float, epsilon: float,
              iterations: int, steps: int, tol_shoot: float = 1e-10,
              tol_K: float = 1e-12, continuation: bool = True) -> SubintervalSolution:
    """Run the accumulated K update on one subinterval.

    Starts from K = 0 and performs ``iterations`` update/re-shoot rounds,
    stopping early once the K increment drops below ``tol_K``.

    With ``continuation`` every re-shoot starts Newton from the previous
    initial velocity, falling back to the linear guess if that diverges.  The
    linear guess alone stops converging once |K| reaches a few hundred on
    subintervals where H is already large.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    basis = target.basis
    rho_t = target.coords
    k = np.zeros(basis.dim)
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)

    def run(i, k, guess=None):
        try:
            if guess is not None:
                try:
                    return _solve_once(x0, y0, k, t_start, t_end, steps, tol_shoot, basis, guess)
                except (ShootingDivergenceError, StageConvergenceError):
                    logger.debug("warm start diverged at iteration %d; retrying", i)
            return _solve_once(x0, y0, k, t_start, t_end, steps, tol_shoot, basis)
        except ShootingDivergenceError as exc:
            raise ShootingDivergenceError(
                f"K-iteration {i}: {exc}", best_residual=exc.best_residual
            ) from exc
        except StageConvergenceError as exc:
            raise StageConvergenceError(f"K-iteration {i}: {exc}") from exc

    shot, traj = run(0, k)
    dists = [float(np.linalg.norm(traj.x[-1] - rho_t))]
    k_hist: list[float] = []
    newton = [shot.newton_steps]
    for i in range(1, iterations + 1):
        dk = basis.bracket_coords(rho_t, traj.x[-1]) / epsilon
        k = k + dk
        k_hist.append(float(np.linalg.norm(dk)))
        shot, traj = run(i, k, shot.v0 if continuation else None)
        newton.append(shot.newton_steps)
        dists.append(float(np.linalg.norm(traj.x[-1] - rho_t)))
        if k_hist[-1] < tol_K:
            logger.debug("K stabilized after %d iterations", i)
            break

    K_final = AlgebraElement(basis, k)
    consistency = basis.bracket_coords(rho_t, traj.x[-1]) / epsilon
    return SubintervalSolution(
        trajectory=traj,
        K_final=K_final,
        endpoint_distance=dists[-1],
        J_cont=control_cost(traj),
        K_history=k_hist,
        distance_history=dists,
        terminal_velocity=float(np.linalg.norm(traj.v[-1])),
        newton_steps=newton,
        K_consistency=float(np.linalg.norm(k - consistency)),
    )


def evaluate_cost(report: SplineReport, epsilon: float | None = None):
    """Return ``(J, [J_cont_j], penalty)`` for a solved report."""
    eps = report.spec.epsilon if epsilon is None else epsilon
    j_cont = [control_cost(s.trajectory) for s in report.subintervals]
    penalty = sum(s.endpoint_distance**2 for s in report.subintervals) / (2.0 * eps)
    return sum(j_cont) + penalty, j_cont, penalty


def solve_spline(spec: ProblemSpec, continuation: bool = True) -> SplineReport:
    """Solve every subinterval in time order, chaining rho and H."""
    basis = spec.basis
    x = spec.rho0.coords.copy()
    y = spec.H0.coords.copy()
    t_prev = 0.0
    subs: list[SubintervalSolution] = []
    rho_cont: list[float] = []
    h_cont: list[float] = []
    for j, tg in enumerate(spec.targets, start=1):
        try:
            sol = iterate_K(x, y, tg.rho, t_prev, tg.t, spec.epsilon, spec.iterations,
                            spec.steps, spec.tol_shoot, spec.tol_K, continuation)
        except ShootingDivergenceError as exc:
            raise ShootingDivergenceError(f"subinterval {j}: {exc}",
                                          best_residual=exc.best_residual) from exc
        except StageConvergenceError as exc:
            raise StageConvergenceError(f"subinterval {j}: {exc}") from exc
        sol.orbit_floor = orbit_distance(spec.rho0, tg.rho)
        traj = sol.trajectory
        rho_cont.append(float(np.max(np.abs(traj.x[0] - x))))
        h_cont.append(float(np.max(np.abs(traj.y[0] - y))))
        logger.info("subinterval %d: distance %.3e after %d iterations",
                    j, sol.endpoint_distance, sol.iterations_run)
        subs.append(sol)
        x, y = traj.x[-1], traj.y[-1]
        t_prev = tg.t

    floors = [orbit_distance(spec.rho0, tg.rho) for tg in spec.targets]
    same = [f < spec.orbit_warn for f in floors]
    report = SplineReport(
        spec=spec,
        subintervals=subs,
        J=0.0,
        J_cont=[],
        penalty=0.0,
        rho_continuity=rho_cont,
        H_continuity=h_cont,
        same_orbit=same,
        orbit_warning=not all(same),
    )
    report.J, report.J_cont, report.penalty = evaluate_cost(report)
    return report


def spectrum_drift(report: SplineReport) -> float:
    """Largest sorted-spectrum deviation from rho0 over every stored sample."""
    basis = report.spec.basis
    ref = report.spec.rho0.spectrum
    worst = 0.0
    for sub in report.subintervals:
        mats = np.tensordot(sub.trajectory.x, basis.elements, axes=1)
        evs = np.sort(np.linalg.eigvalsh(mats), axis=1)[:, ::-1]
        worst = max(worst, float(np.max(np.abs(evs - ref))))
    return worst
