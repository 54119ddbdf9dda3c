"""The surface-sliding iteration.

Two points, one per ellipsoid, slide in their (theta, phi) parameter spaces
under the pull of the segment connecting them. Both points step
simultaneously from the iteration-k positions; an increase in separation is
treated as overshoot and triggers alternating halving of the two angle
increment steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import (
    Ellipsoid,
    SurfaceFrame,
    SurfaceParam,
    _frame_fast,
    line_surface_entry,
)

_STATUSES = ("converged", "max-iter", "lambda-floor", "contact", "overlap")

# Eq-style step normalization is singular exactly at the solution; treat the
# projection pair as zero below this fraction of the current separation.
ZERO_PROJECTION_FACTOR = 1e-15


@dataclass(frozen=True)
class SolverConfig:
    """Tunables of the sliding search.

    ``contact_sigma=None`` resolves at solve time to 1e-6 times the mean
    semi-axis of the pair. ``overshoot_mode`` is ``accept-and-continue``
    (keep the overshooting step; matches the observed oscillate-then-settle
    behavior) or ``revert-and-retry`` (monotone distance sequence).
    """

    lambda0: float = 0.05
    max_iter: int = 10_000
    tol_d: float = 1e-12
    tol_n: float = 1e-10
    tol_lambda: float = 1e-8
    lambda_floor: float = 1e-12
    overshoot_mode: str = "accept-and-continue"
    contact_sigma: float | None = None
    record_trace: bool = False

    def __post_init__(self):
        if self.lambda0 <= 0.0:
            raise ValueError("lambda0 must be positive")
        if min(self.tol_d, self.tol_n, self.tol_lambda) <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 <= self.lambda_floor < self.lambda0:
            raise ValueError("lambda_floor must lie in [0, lambda0)")
        if self.overshoot_mode not in ("accept-and-continue", "revert-and-retry"):
            raise ValueError(f"unknown overshoot_mode {self.overshoot_mode!r}")
        if self.contact_sigma is not None and self.contact_sigma <= 0.0:
            raise ValueError("contact_sigma must be positive")

    def resolve_sigma(self, e1: Ellipsoid, e2: Ellipsoid) -> float:
        if self.contact_sigma is not None:
            return self.contact_sigma
        return 1e-6 * (sum(e1.semi_axes) + sum(e2.semi_axes)) / 6.0


@dataclass(frozen=True)
class SolverState:
    """Snapshot of the iteration after step ``k``."""

    k: int
    params: tuple[SurfaceParam, SurfaceParam]
    points_global: tuple[tuple, tuple]
    d12: tuple
    distance: float
    lambdas: tuple[float, float]
    prev_distance: float  # nan before the first iteration
    halve_toggle: int  # index of the lambda halved on the next overshoot
    normals: tuple[tuple, tuple] = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    overshoot: bool = False
    frames: tuple = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class StepRecord:
    k: int
    theta1: float
    phi1: float
    theta2: float
    phi2: float
    distance: float
    lambda1: float
    lambda2: float
    eps_d: float
    eps_n: float
    overshoot_flag: bool


@dataclass(frozen=True)
class DistanceResult:
    status: str
    distance: float
    params: tuple[SurfaceParam, SurfaceParam]
    closest_points: tuple[np.ndarray, np.ndarray]
    normals: tuple[np.ndarray, np.ndarray]
    iterations: int
    final_eps: tuple[float | None, float, float]
    trace: list[StepRecord] | None = None
    stop_criteria: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# elementary operations

def project_tension(frame_i: SurfaceFrame, d_ij) -> tuple[float, float]:
    """Tangential projections of the connecting segment at one surface
    point. The theta projection is zero at a pole."""
    if frame_i.frame != "global":
        raise ValueError("projection expects a global-frame SurfaceFrame")
    d = np.asarray(d_ij, dtype=float)
    et = frame_i.tangent_theta
    delta_theta = 0.0 if et is None else float(d @ et)
    delta_phi = float(d @ frame_i.tangent_phi)
    return delta_theta, delta_phi


def step_increments(
    delta_theta: float, delta_phi: float, lambda_i: float, guard: float = 0.0
) -> tuple[float, float]:
    """Scale the projection pair to Euclidean norm ``lambda_i``; (0, 0) when
    both projections vanish (below ``guard``)."""
    mag = math.hypot(delta_theta, delta_phi)
    if mag <= guard or mag == 0.0:
        return 0.0, 0.0
    return delta_theta / mag * lambda_i, delta_phi / mag * lambda_i


def advance_param(p: SurfaceParam, d_theta: float, d_phi: float) -> SurfaceParam:
    """Raw additive update followed by canonicalization (theta wrap, phi
    reflection through the poles)."""
    return SurfaceParam.canonical(p.theta + d_theta, p.phi + d_phi)


def convergence_metrics(
    state: SolverState, prev_state: SolverState | None = None
) -> tuple[float | None, float, float]:
    """(eps_d, eps_n, eps_lambda) at ``state``.

    eps_d is None before any previous distance exists. eps_n is the worse of
    the two normal/segment misalignments; eps_lambda the larger step.
    """
    prev_d = prev_state.distance if prev_state is not None else state.prev_distance
    if math.isnan(prev_d):
        eps_d = None
    else:
        eps_d = abs((state.distance - prev_d) / state.distance)
    dx, dy, dz = state.d12
    dist = state.distance
    n1, n2 = state.normals
    dot1 = (dx * n1[0] + dy * n1[1] + dz * n1[2]) / dist
    dot2 = (dx * n2[0] + dy * n2[1] + dz * n2[2]) / dist
    eps_n = max(1.0 - dot1, 1.0 + dot2)
    return eps_d, eps_n, max(state.lambdas)


def apply_overshoot_schedule(state: SolverState, config: SolverConfig) -> SolverState:
    """Alternating step halving: when the distance grew this round, halve
    the lambda selected by the toggle and flip the toggle."""
    if math.isnan(state.prev_distance) or not state.distance > state.prev_distance:
        return state
    lam = list(state.lambdas)
    lam[state.halve_toggle] *= 0.5
    return replace(
        state,
        lambdas=tuple(lam),
        halve_toggle=1 - state.halve_toggle,
        overshoot=True,
    )


# ---------------------------------------------------------------------------
# iteration engine

def _increments_fast(frame, d, lam, guard):
    """step_increments over the raw float-tuple frame used in the hot loop."""
    _, _, et, ep = frame
    dx, dy, dz = d
    dth = 0.0 if et is None else dx * et[0] + dy * et[1] + dz * et[2]
    dph = dx * ep[0] + dy * ep[1] + dz * ep[2]
    return step_increments(dth, dph, lam, guard)


def _evaluate(e1, e2, p1: SurfaceParam, p2: SurfaceParam):
    f1 = _frame_fast(e1, p1.theta, p1.phi)
    f2 = _frame_fast(e2, p2.theta, p2.phi)
    P1, P2 = f1[0], f2[0]
    d12 = (P2[0] - P1[0], P2[1] - P1[1], P2[2] - P1[2])
    dist = math.sqrt(d12[0] ** 2 + d12[1] ** 2 + d12[2] ** 2)
    return f1, f2, d12, dist


def initial_state(
    e1: Ellipsoid,
    e2: Ellipsoid,
    init: tuple[SurfaceParam, SurfaceParam] | None,
    config: SolverConfig,
) -> SolverState:
    """State at k = 0. Without explicit parameters, both points start at
    the entry of the center-to-center segment into their own surface."""
    if init is None:
        A, B = e1.center, e2.center
        p1 = line_surface_entry(e1, A, B)
        p2 = line_surface_entry(e2, A, B)
    else:
        p1, p2 = init
        if not (p1.is_canonical() and p2.is_canonical()):
            raise ValueError("initial surface parameters must be canonical")
    f1, f2, d12, dist = _evaluate(e1, e2, p1, p2)
    return SolverState(
        k=0,
        params=(p1, p2),
        points_global=(f1[0], f2[0]),
        d12=d12,
        distance=dist,
        lambdas=(config.lambda0, config.lambda0),
        prev_distance=math.nan,
        halve_toggle=0,
        normals=(f1[1], f2[1]),
        frames=(f1, f2),
    )


def iterate_once(
    state: SolverState,
    config: SolverConfig,
    ellipsoids: tuple[Ellipsoid, Ellipsoid],
) -> SolverState:
    """One full round: project the tension at both iteration-k points,
    advance both parameter pairs simultaneously, re-evaluate, and apply the
    overshoot schedule."""
    e1, e2 = ellipsoids
    p1, p2 = state.params
    if state.frames is not None:
        f1, f2 = state.frames
    else:
        f1, f2, _, _ = _evaluate(e1, e2, p1, p2)
    d12 = state.d12
    d21 = (-d12[0], -d12[1], -d12[2])
    dist = state.distance
    lam1, lam2 = state.lambdas
    toggle = state.halve_toggle
    guard = ZERO_PROJECTION_FACTOR * dist
    revert = config.overshoot_mode == "revert-and-retry"

    while True:
        dth1, dph1 = _increments_fast(f1, d12, lam1, guard)
        dth2, dph2 = _increments_fast(f2, d21, lam2, guard)
        if dth1 == 0.0 and dph1 == 0.0 and dth2 == 0.0 and dph2 == 0.0:
            # stationary: tension has no tangential component anywhere
            return replace(state, k=state.k + 1, prev_distance=dist, overshoot=False)
        q1 = advance_param(p1, dth1, dph1)
        q2 = advance_param(p2, dth2, dph2)
        g1, g2, nd12, ndist = _evaluate(e1, e2, q1, q2)
        if ndist > dist and revert and max(lam1, lam2) > config.lambda_floor:
            if toggle == 0:
                lam1 *= 0.5
            else:
                lam2 *= 0.5
            toggle = 1 - toggle
            continue
        new = SolverState(
            k=state.k + 1,
            params=(q1, q2),
            points_global=(g1[0], g2[0]),
            d12=nd12,
            distance=ndist,
            lambdas=(lam1, lam2),
            prev_distance=dist,
            halve_toggle=toggle,
            normals=(g1[1], g2[1]),
            frames=(g1, g2),
        )
        if not revert:
            new = apply_overshoot_schedule(new, config)
        return new


def solve(
    e1: Ellipsoid,
    e2: Ellipsoid,
    init: tuple[SurfaceParam, SurfaceParam] | None = None,
    config: SolverConfig = SolverConfig(),
) -> DistanceResult:
    """Run the sliding search until a stopping criterion fires.

    Any one of eps_d < tol_d, eps_n < tol_n, eps_lambda < tol_lambda ends
    the search as converged; hitting max_iter or the lambda floor is
    reported as a status, not an exception. Separations below the contact
    threshold hand off to the contact classifier.
    """
    from .contact import classify  # local import; contact depends on us

    sigma = config.resolve_sigma(e1, e2)
    state = initial_state(e1, e2, init, config)
    trace: list[StepRecord] | None = [] if config.record_trace else None

    # a warm start (or an already-optimal init) may need no iteration at all
    _, eps_n0, eps_l0 = convergence_metrics(state)
    if trace is not None:
        p1, p2 = state.params
        trace.append(
            StepRecord(
                0,
                p1.theta,
                p1.phi,
                p2.theta,
                p2.phi,
                state.distance,
                state.lambdas[0],
                state.lambdas[1],
                math.nan,
                eps_n0,
                False,
            )
        )
    if eps_n0 < config.tol_n:
        return _result("converged", state, (None, eps_n0, eps_l0), trace, ("eps_n",))
    if state.distance < sigma:
        kind = classify(state, e1, e2, sigma)
        if kind != "separated":
            status = "contact" if kind == "in-contact" else "overlap"
            return _result(status, state, (None, eps_n0, eps_l0), trace, ())

    eps = (None, eps_n0, eps_l0)
    status = "max-iter"
    criteria: tuple[str, ...] = ()
    for _ in range(config.max_iter):
        prev = state
        state = iterate_once(prev, config, (e1, e2))
        eps = convergence_metrics(state, prev)
        if trace is not None:
            p1, p2 = state.params
            trace.append(
                StepRecord(
                    state.k,
                    p1.theta,
                    p1.phi,
                    p2.theta,
                    p2.phi,
                    state.distance,
                    state.lambdas[0],
                    state.lambdas[1],
                    eps[0] if eps[0] is not None else math.nan,
                    eps[1],
                    state.overshoot,
                )
            )
        if state.distance < sigma:
            kind = classify(state, e1, e2, sigma)
            if kind != "separated":
                status = "contact" if kind == "in-contact" else "overlap"
                criteria = ()
                break
        met = []
        if eps[0] is not None and eps[0] < config.tol_d:
            met.append("eps_d")
        if eps[1] < config.tol_n:
            met.append("eps_n")
        if eps[2] < config.tol_lambda:
            met.append("eps_lambda")
        if met:
            status = "converged"
            criteria = tuple(met)
            break
        if max(state.lambdas) < config.lambda_floor:
            status = "lambda-floor"
            break
    return _result(status, state, eps, trace, criteria)


def _result(status, state, eps, trace, criteria) -> DistanceResult:
    return DistanceResult(
        status=status,
        distance=state.distance,
        params=state.params,
        closest_points=(
            np.array(state.points_global[0]),
            np.array(state.points_global[1]),
        ),
        normals=(np.array(state.normals[0]), np.array(state.normals[1])),
        iterations=state.k,
        final_eps=eps,
        trace=trace,
        stop_criteria=criteria,
    )


def warm_start_from(result: DistanceResult) -> tuple[SurfaceParam, SurfaceParam]:
    """Final surface parameters of a previous query, for reuse as ``init``
    on a nearby configuration."""
    return result.params


class SurfaceSlider:
    """Estimator-style front end: hyperparameters at construction,
    ``solve`` per query, sklearn-compatible ``get_params``/``set_params``."""

    def __init__(
        self,
        lambda0: float = 0.05,
        max_iter: int = 10_000,
        tol_d: float = 1e-12,
        tol_n: float = 1e-10,
        tol_lambda: float = 1e-8,
        lambda_floor: float = 1e-12,
        overshoot_mode: str = "accept-and-continue",
        contact_sigma: float | None = None,
        record_trace: bool = False,
    ):
        self.lambda0 = lambda0
        self.max_iter = max_iter
        self.tol_d = tol_d
        self.tol_n = tol_n
        self.tol_lambda = tol_lambda
        self.lambda_floor = lambda_floor
        self.overshoot_mode = overshoot_mode
        self.contact_sigma = contact_sigma
        self.record_trace = record_trace

    _param_names = (
        "lambda0",
        "max_iter",
        "tol_d",
        "tol_n",
        "tol_lambda",
        "lambda_floor",
        "overshoot_mode",
        "contact_sigma",
        "record_trace",
    )

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params) -> "SurfaceSlider":
        for name, value in params.items():
            if name not in self._param_names:
                raise ValueError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def config(self) -> SolverConfig:
        return SolverConfig(**self.get_params())

    def solve(
        self,
        e1: Ellipsoid,
        e2: Ellipsoid,
        init: tuple[SurfaceParam, SurfaceParam] | None = None,
    ) -> DistanceResult:
        return solve(e1, e2, init, self.config())
