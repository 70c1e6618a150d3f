import dataclasses

import numpy as np
import pytest

from oracles import first_integral_residual
from qspline.dynamics import PhaseState, integrate
from qspline.errors import QSplineError, ShootingDivergenceError, StageConvergenceError
from qspline.lie_basis import distance
from qspline.quantum_state import validate
from qspline.scenarios import load_scenario
from qspline.solver import (
    ProblemSpec,
    Target,
    _simpson,
    control_cost,
    evaluate_cost,
    iterate_K,
    shoot_subinterval,
    solve_spline,
    spectrum_drift,
)

@pytest.fixture(scope="module")
def qubit():
    return load_scenario("qubit")


def _first_K(spec):
    b = spec.basis
    return b.bracket_coords(spec.targets[0].rho.coords, spec.rho0.coords) / spec.epsilon


def test_shoot_zero_control(qubit):
    b = qubit.basis
    shot = shoot_subinterval(qubit.rho0.coords, qubit.H0.coords, b.zero(), 0.0, 0.2, 200, 1e-10, b)
    assert shot.newton_steps == 0
    assert shot.residual == 0.0
    assert not np.any(shot.v0)


def test_shoot_first_iteration(qubit):
    b = qubit.basis
    shot = shoot_subinterval(qubit.rho0.coords, qubit.H0.coords, _first_K(qubit),
                             0.0, 0.2, 200, 1e-10, b)
    assert shot.residual < 1e-10
    assert shot.newton_steps <= 8


def test_shoot_velocity_scales_with_interval(qubit):
    b = qubit.basis
    k = 1e-3 * _first_K(qubit)
    short = shoot_subinterval(qubit.rho0.coords, qubit.H0.coords, k, 0.0, 0.1, 200, 1e-10, b)
    long = shoot_subinterval(qubit.rho0.coords, qubit.H0.coords, k, 0.0, 0.2, 200, 1e-10, b)
    assert np.linalg.norm(long.v0) / np.linalg.norm(short.v0) == pytest.approx(2.0, rel=0.02)


def test_shoot_rejects_empty_interval(qubit):
    with pytest.raises(ValueError):
        shoot_subinterval(qubit.rho0.coords, qubit.H0.coords, np.zeros(4), 0.2, 0.2, 10, 1e-10,
                          qubit.basis)


def test_zero_iterations_is_free_solution(qubit):
    tg = qubit.targets[0]
    sol = iterate_K(qubit.rho0.coords, qubit.H0.coords, tg.rho, 0.0, tg.t, qubit.epsilon, 0, 200)
    # H0 commutes with rho0, so rho never moves
    assert sol.endpoint_distance == pytest.approx(distance(qubit.rho0.element, tg.rho.element),
                                                  abs=1e-15)
    assert sol.J_cont == 0.0
    assert not np.any(sol.K_final.coords)
    assert sol.iterations_run == 0


def test_target_already_reached(qubit):
    b = qubit.basis
    y0 = np.array([0.0, 0.4, -0.3, 1.0])
    start = PhaseState(0.0, qubit.rho0.coords, y0, np.zeros(4))
    reached = integrate(start, np.zeros(4), 0.2, 200, b).x[-1]
    target = validate(b.matrix_of(reached), b)
    sol = iterate_K(qubit.rho0.coords, y0, target, 0.0, 0.2, qubit.epsilon, 5, 200)
    assert sol.K_history[0] < 1e-12
    assert sol.iterations_run == 1  # stabilized immediately
    assert np.max(np.abs(sol.K_final.coords)) < 1e-9


def test_single_target_at_start_costs_nothing(qubit):
    spec = ProblemSpec(n=2, targets=[Target(0.5, qubit.rho0)], rho0=qubit.rho0, H0=qubit.H0,
                       epsilon=0.01, iterations=3, steps=50)
    report = solve_spline(spec)
    assert report.J == 0.0
    assert report.J_cont == [0.0]


def test_iterate_K_rejects_bad_arguments(qubit):
    tg = qubit.targets[0]
    with pytest.raises(ValueError):
        iterate_K(qubit.rho0.coords, qubit.H0.coords, tg.rho, 0.0, tg.t, 0.0, 1, 10)
    with pytest.raises(ValueError):
        iterate_K(qubit.rho0.coords, qubit.H0.coords, tg.rho, 0.0, tg.t, 0.1, -1, 10)


@pytest.mark.parametrize("changes,match", [
    ({"epsilon": 0.0}, "epsilon"),
    ({"steps": 0}, "steps"),
    ({"iterations": -1}, "iterations"),
    ({"targets": ()}, "target"),
])
def test_problem_spec_validation(qubit, changes, match):
    with pytest.raises(ValueError, match=match):
        dataclasses.replace(qubit, **changes)


def test_problem_spec_rejects_unordered_times(qubit):
    tg = list(qubit.targets)
    tg[1], tg[2] = tg[2], tg[1]
    with pytest.raises(ValueError, match="target 3"):
        ProblemSpec(n=2, targets=tg, rho0=qubit.rho0, H0=qubit.H0, epsilon=0.005)


def test_simpson_exact_for_cubics():
    t = np.linspace(0.0, 1.0, 11)
    f = 3 * t**3 - t**2 + 2
    assert _simpson(f, 0.1) == pytest.approx(0.75 - 1 / 3 + 2, abs=1e-14)


def test_simpson_odd_panel_count():
    t = np.linspace(0.0, 1.0, 8)  # seven panels
    h = t[1] - t[0]
    f = 2 * t + 1
    assert _simpson(f, h) == pytest.approx(2.0, abs=1e-14)
    assert _simpson(f[:2], h) == pytest.approx(h * (f[0] + f[1]) / 2)
    assert _simpson(f[:1], h) == 0.0


def test_simpson_self_convergence():
    exact = 1 - np.cos(2.0)
    prev = None
    for panels in (16, 32, 64):
        t = np.linspace(0.0, 2.0, panels + 1)
        val = _simpson(np.sin(t), t[1] - t[0])
        if prev is not None:
            assert abs(val - exact) < abs(prev - exact) / 12
        prev = val
    assert abs(prev - exact) / exact < 1e-6


def test_control_cost_resolution_independent(qubit):
    k = _first_K(qubit)
    costs = []
    for steps in (200, 400):
        shot = shoot_subinterval(qubit.rho0.coords, qubit.H0.coords, k, 0.0, 0.2, steps, 1e-10,
                                 qubit.basis)
        start = PhaseState(0.0, qubit.rho0.coords, qubit.H0.coords, shot.v0)
        costs.append(control_cost(integrate(start, k, 0.2, steps, qubit.basis)))
    assert abs(costs[0] - costs[1]) / costs[1] < 1e-6


def test_cost_refines_with_steps(solved):
    coarse, _ = solved.get("qubit")
    fine, _ = solved.get("qubit", steps=400)
    for a, b in zip(coarse.J_cont, fine.J_cont):
        assert abs(a - b) / b < 1e-6


def test_zero_control_cost_is_penalty_only(qubit):
    report = solve_spline(load_scenario("qubit", iterations=0))
    J, j_cont, penalty = evaluate_cost(report)
    assert j_cont == [0.0] * 5
    assert J == penalty
    expected = sum(distance(qubit.rho0.element, tg.rho.element) ** 2 for tg in qubit.targets)
    assert penalty == pytest.approx(expected / (2 * qubit.epsilon), rel=1e-12)
    assert evaluate_cost(report, epsilon=2 * qubit.epsilon)[2] == pytest.approx(penalty / 2)


def test_converged_qubit_solution(solved):
    report, _ = solved.get("qubit")
    assert max(report.distances) < 1e-6
    assert all(report.same_orbit) and not report.orbit_warning
    for sub in report.subintervals:
        assert sub.terminal_velocity <= report.spec.tol_shoot
        assert sub.J_cont > 0
        assert np.isfinite(sub.K_consistency)
    assert report.rho_continuity == [0.0] * 5
    assert report.H_continuity == [0.0] * 5


def test_junctions_share_state(solved):
    report, _ = solved.get("qubit")
    subs = report.subintervals
    for a, b in zip(subs, subs[1:]):
        assert np.array_equal(a.trajectory.x[-1], b.trajectory.x[0])
        assert np.array_equal(a.trajectory.y[-1], b.trajectory.y[0])
        assert a.trajectory.times[-1] == b.trajectory.times[0]


@pytest.mark.parametrize("name", ["qubit", "qutrit"])
def test_monotone_steering(solved, name):
    report, _ = solved.get(name)
    for sub in report.subintervals:
        d = np.array(sub.distance_history[2:])
        # the qubit runs bottom out near 1e-13, where round-off shows
        assert np.all(np.diff(d) <= 1e-12)


def test_large_penalty_weight_steers_away():
    spec = load_scenario("qubit")
    tg = spec.targets[0]
    sol = iterate_K(spec.rho0.coords, spec.H0.coords, tg.rho, 0.0, tg.t, 1e-3, 8, 200)
    d = sol.distance_history
    assert d[-1] > d[0]  # a worse interpolant than doing nothing


def test_tiny_epsilon_is_not_monotone():
    # characterization: with epsilon = 1e-6 the first update overshoots so far
    # that either the distance grows or the integration gives up
    try:
        report = solve_spline(load_scenario("qubit", epsilon=1e-6, iterations=5))
    except QSplineError as exc:
        assert "subinterval 1" in str(exc)
        assert "K-iteration 1" in str(exc)
    else:
        d = report.subintervals[0].distance_history
        assert np.any(np.diff(d) > 0)


def test_shooting_failure_is_annotated():
    spec = load_scenario("qubit", epsilon=1e-4, iterations=2)
    with pytest.raises((ShootingDivergenceError, StageConvergenceError)) as info:
        solve_spline(spec)
    msg = str(info.value)
    assert msg.startswith("subinterval 1: K-iteration 1:")
    if isinstance(info.value, ShootingDivergenceError):
        assert info.value.best_residual > 1e-10


def test_first_integral(solved):
    report, _ = solved.get("qubit")
    assert first_integral_residual(report) < 1e-7


@pytest.mark.parametrize("name", ["qubit", "qutrit"])
def test_orbit_confinement(solved, name):
    report, _ = solved.get(name)
    assert spectrum_drift(report) < 1e-9


def test_without_continuation_first_subinterval():
    spec = load_scenario("qubit", iterations=10)
    a = solve_spline(spec, continuation=False)
    b = solve_spline(spec)
    np.testing.assert_allclose(a.distances, b.distances, rtol=1e-6, atol=1e-12)
