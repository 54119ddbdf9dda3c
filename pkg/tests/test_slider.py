"""Unit tests for the sliding iteration: projections, parameter updates,
overshoot handling, convergence metrics, and the full solve loop."""

import math

import numpy as np
import pytest

from surfslide.geometry import Ellipsoid, SurfaceParam, surface_frame
from surfslide.scenarios import builtin_scenario
from surfslide.slider import (
    SolverConfig,
    SurfaceSlider,
    advance_param,
    apply_overshoot_schedule,
    convergence_metrics,
    initial_state,
    iterate_once,
    project_tension,
    solve,
    step_increments,
    warm_start_from,
)

PI = math.pi


def _spheres(r1, c1, r2, c2):
    return (
        Ellipsoid((r1, r1, r1), c1, (0, 0, 0)),
        Ellipsoid((r2, r2, r2), c2, (0, 0, 0)),
    )


# ---------------------------------------------------------------------------
# elementary operations


def test_project_tension_at_pole_has_no_theta_component():
    e = Ellipsoid((1.0, 0.6, 0.4), (0, 0, 0), (0, 0, 0))
    f = surface_frame(e, SurfaceParam(0.3, 0.0))
    dth, dph = project_tension(f, [0.7, -0.2, 0.5])
    assert dth == 0.0


def test_step_increments_normalizes_to_lambda():
    assert step_increments(3.0, 4.0, 0.05) == pytest.approx((0.03, 0.04))
    assert step_increments(0.0, 0.0, 0.05) == (0.0, 0.0)
    assert step_increments(-1.0, 0.0, 0.05) == pytest.approx((-0.05, 0.0))
    dth, dph = step_increments(0.1, -0.7, 0.02)
    assert math.isclose(math.hypot(dth, dph), 0.02, rel_tol=1e-12)


def test_advance_param_wraps_theta():
    p = advance_param(SurfaceParam(6.2, PI / 2), 0.2, 0.0)
    assert math.isclose(p.theta, 6.4 - 2 * PI, abs_tol=1e-12)
    assert math.isclose(p.phi, PI / 2, abs_tol=1e-15)


def test_advance_param_reflects_through_pole():
    p = advance_param(SurfaceParam(0.0, 0.02), 0.0, -0.05)
    assert math.isclose(p.theta, PI, abs_tol=1e-12)
    assert math.isclose(p.phi, 0.03, abs_tol=1e-12)


def test_advance_param_interior_is_pure_addition():
    p = advance_param(SurfaceParam(1.0, 1.0), 0.05, 0.05)
    assert math.isclose(p.theta, 1.05, abs_tol=1e-15)
    assert math.isclose(p.phi, 1.05, abs_tol=1e-15)


# ---------------------------------------------------------------------------
# convergence metrics and overshoot schedule


def _state_for_metrics(**kw):
    e1, e2 = _spheres(1.0, (-1.5, 0, 0), 1.0, (1.5, 0, 0))
    base = initial_state(e1, e2, None, SolverConfig())
    import dataclasses

    return dataclasses.replace(base, **kw)


def test_metrics_identical_distances_give_zero_eps_d():
    s = _state_for_metrics(prev_distance=1.0, distance=1.0)
    eps_d, _, _ = convergence_metrics(s)
    assert eps_d == 0.0


def test_metrics_perfect_alignment_gives_zero_eps_n():
    # two unit spheres facing each other across the x axis: d12 = n1 = -n2
    s = _state_for_metrics()
    eps_d, eps_n, _ = convergence_metrics(s)
    assert eps_d is None  # no previous iteration yet
    assert eps_n < 1e-12


def test_metrics_eps_lambda_is_max():
    s = _state_for_metrics(lambdas=(0.05, 0.00625))
    _, _, eps_l = convergence_metrics(s)
    assert eps_l == 0.05


def test_overshoot_schedule_no_growth_leaves_state():
    s = _state_for_metrics(prev_distance=2.0, distance=1.5)
    assert apply_overshoot_schedule(s, SolverConfig()) is s


def test_overshoot_schedule_alternates():
    cfg = SolverConfig()
    s = _state_for_metrics(prev_distance=1.0, distance=1.1, lambdas=(0.05, 0.05))
    s = apply_overshoot_schedule(s, cfg)
    assert s.lambdas == (0.025, 0.05) and s.halve_toggle == 1
    import dataclasses

    s = dataclasses.replace(s, prev_distance=1.1, distance=1.2)
    s = apply_overshoot_schedule(s, cfg)
    assert s.lambdas == (0.025, 0.025) and s.halve_toggle == 0


# ---------------------------------------------------------------------------
# iterate_once


def test_iterate_once_stationary_fixed_point():
    e1, e2 = _spheres(1.0, (-1.5, 0, 0), 1.0, (1.5, 0, 0))
    cfg = SolverConfig()
    s0 = initial_state(e1, e2, None, cfg)  # mutual nearest points
    s1 = iterate_once(s0, cfg, (e1, e2))
    assert s1.k == s0.k + 1
    assert s1.params == s0.params
    assert s1.distance == s0.distance == pytest.approx(1.0)


def test_iterate_once_decreases_system_i_distance():
    sc = builtin_scenario("system-I")
    cfg = SolverConfig()
    s0 = initial_state(sc.e1, sc.e2, sc.init, cfg)
    s1 = iterate_once(s0, cfg, (sc.e1, sc.e2))
    assert s1.distance < s0.distance


def test_revert_mode_distance_is_monotone():
    sc = builtin_scenario("system-I")
    cfg = SolverConfig(overshoot_mode="revert-and-retry", record_trace=True)
    res = solve(sc.e1, sc.e2, sc.init, cfg)
    assert res.status == "converged"
    d = [r.distance for r in res.trace]
    assert all(b <= a + 1e-15 for a, b in zip(d, d[1:]))


# ---------------------------------------------------------------------------
# solve


def test_solve_unit_spheres():
    e1, e2 = _spheres(1.0, (0, 0, 0), 1.0, (3, 0, 0))
    res = solve(e1, e2)
    assert res.status == "converged"
    assert res.distance == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(res.closest_points[0], [1, 0, 0], atol=1e-6)
    assert np.allclose(res.closest_points[1], [2, 0, 0], atol=1e-6)


def test_solve_system_ii_aligned_support_point():
    sc = builtin_scenario("system-II-aligned")
    res = solve(sc.e1, sc.e2, sc.init, sc.config())
    assert res.status == "converged"
    # |X02 - X01| - a1 - c2 = 3 - 1 - 0.4
    assert res.distance == pytest.approx(1.6, abs=1e-6)
    p1, p2 = res.params
    assert abs(p1.theta) < 1e-4
    assert abs(p1.phi - PI / 2) < 1e-4
    assert abs(p2.phi - PI) < 1e-4


def test_solve_system_i_multistart_agrees():
    sc = builtin_scenario("system-I")
    rng = np.random.default_rng(42)
    distances = []
    for _ in range(4):
        init = (
            SurfaceParam(rng.uniform(0, 2 * PI), rng.uniform(0, PI)),
            SurfaceParam(rng.uniform(0, 2 * PI), rng.uniform(0, PI)),
        )
        res = solve(sc.e1, sc.e2, init, sc.config())
        assert res.status == "converged"
        distances.append(res.distance)
    assert max(distances) - min(distances) < 1e-6


def test_solve_rejects_non_canonical_init():
    e1, e2 = _spheres(1.0, (0, 0, 0), 1.0, (3, 0, 0))
    with pytest.raises(ValueError):
        solve(e1, e2, (SurfaceParam(0.0, 4.0), SurfaceParam(0.0, 1.0)))


def test_solve_converged_via_eps_n_satisfies_signature():
    sc = builtin_scenario("system-I")
    res = solve(sc.e1, sc.e2, sc.init, sc.config())
    assert res.status == "converged"
    if "eps_n" in res.stop_criteria:
        d = res.closest_points[1] - res.closest_points[0]
        dhat = d / np.linalg.norm(d)
        cfg = sc.config()
        assert 1.0 - res.normals[0] @ dhat < cfg.tol_n
        assert 1.0 + res.normals[1] @ dhat < cfg.tol_n


def test_max_iter_status():
    sc = builtin_scenario("system-I")
    res = solve(sc.e1, sc.e2, sc.init, SolverConfig(max_iter=3))
    assert res.status == "max-iter"
    assert res.iterations == 3


# ---------------------------------------------------------------------------
# warm start


def test_warm_restart_unchanged_configuration():
    sc = builtin_scenario("system-II-aligned")
    first = solve(sc.e1, sc.e2, sc.init, sc.config())
    second = solve(sc.e1, sc.e2, warm_start_from(first), sc.config())
    assert second.status == "converged"
    assert second.iterations <= 2
    assert second.distance == pytest.approx(first.distance, abs=1e-10)


def test_warm_start_after_center_shift():
    sc = builtin_scenario("system-II-aligned")
    first = solve(sc.e1, sc.e2, sc.init, sc.config())
    shifted = Ellipsoid(
        sc.e2.semi_axes,
        (sc.e2.center[0] + 0.01, sc.e2.center[1], sc.e2.center[2]),
        sc.e2.euler,
    )
    res = solve(sc.e1, shifted, warm_start_from(first), sc.config())
    assert res.status == "converged"
    # support-point distance with the new separation 3.01
    assert res.distance == pytest.approx(3.01 - 1.0 - 0.4, abs=1e-6)


def test_warm_start_beats_cold_after_small_rotation():
    sc = builtin_scenario("system-I")
    first = solve(sc.e1, sc.e2, sc.init, sc.config())
    rotated = Ellipsoid(
        sc.e2.semi_axes,
        sc.e2.center,
        (sc.e2.euler[0] + 0.01, sc.e2.euler[1], sc.e2.euler[2] - 0.01),
    )
    warm = solve(sc.e1, rotated, warm_start_from(first), sc.config())
    cold = solve(sc.e1, rotated, None, sc.config())
    assert warm.status == cold.status == "converged"
    assert warm.iterations < cold.iterations
    assert warm.distance == pytest.approx(cold.distance, abs=1e-7)


# ---------------------------------------------------------------------------
# configuration and estimator shell


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(lambda0=0.0)
    with pytest.raises(ValueError):
        SolverConfig(tol_n=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(overshoot_mode="bogus")
    with pytest.raises(ValueError):
        SolverConfig(lambda_floor=0.1, lambda0=0.05)


def test_surface_slider_params_round_trip():
    s = SurfaceSlider(lambda0=0.1, tol_n=1e-9)
    params = s.get_params()
    assert params["lambda0"] == 0.1
    s.set_params(lambda0=0.02)
    assert s.get_params()["lambda0"] == 0.02
    e1, e2 = _spheres(1.0, (0, 0, 0), 1.0, (3, 0, 0))
    res = s.solve(e1, e2)
    assert res.status == "converged"
    assert res.distance == pytest.approx(1.0, abs=1e-8)
