"""Classification of near-contact and overlapping pairs, plus the
penetration-depth continuation.

When the sliding search drives the separation below the contact threshold
sigma, the configuration is either tangent (the two outward normals are
anti-aligned) or interpenetrating (each witness point sits inside the other
ellipsoid). For the overlap case the same stepping machinery is reused with
the pull replaced by a push along the other body's negated normal, which
drives the pair to the maximum-overlap points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Ellipsoid, SurfaceParam, implicit_value
from .slider import (
    SolverConfig,
    SolverState,
    _evaluate,
    _increments_fast,
    advance_param,
)

# tolerance on |n1 . n2 + 1| for calling a sub-sigma pair tangent
ALIGN_TOL = 1e-6


@dataclass(frozen=True)
class ContactReport:
    """kind is 'separated', 'in-contact', or 'overlapping'.

    distance_or_depth is positive separation, ~0 at tangency, and the
    penetration magnitude (reported positive, flagged by kind) for overlap.
    """

    kind: str
    distance_or_depth: float
    witness_params: tuple[SurfaceParam, SurfaceParam]
    witness_normals: tuple[np.ndarray, np.ndarray]


def classify(
    state: SolverState,
    e1: Ellipsoid,
    e2: Ellipsoid,
    sigma: float,
    align_tol: float = ALIGN_TOL,
) -> str:
    """Sort a sub-sigma (or converged) state into in-contact / overlapping /
    separated.

    Interpenetration is confirmed by interior tests on both witness points,
    not by distance alone: a small separation also occurs at near-tangency.
    """
    n1, n2 = state.normals
    dot = n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2]
    if abs(dot + 1.0) < align_tol:
        return "in-contact"
    P1, P2 = state.points_global
    if implicit_value(e2, P1) < 0.0 and implicit_value(e1, P2) < 0.0:
        return "overlapping"
    return "separated"


def _report(kind: str, state: SolverState) -> ContactReport:
    return ContactReport(
        kind=kind,
        distance_or_depth=state.distance,
        witness_params=state.params,
        witness_normals=(np.array(state.normals[0]), np.array(state.normals[1])),
    )


def penetration_depth(
    e1: Ellipsoid,
    e2: Ellipsoid,
    entry_state: SolverState,
    config: SolverConfig = SolverConfig(),
) -> ContactReport:
    """Continue an overlapping search to the maximum-overlap pair.

    While the witness points interpenetrate (or sit within sigma), each is
    pushed along the negated normal of the other body, re-read every step;
    once both points pop outside beyond sigma, the regular tension pull
    resumes. At the fixed point the connecting segment leaves each witness
    point against its own outward normal, and its length is the depth.
    """
    sigma = config.resolve_sigma(e1, e2)
    if (
        entry_state.distance < sigma
        and classify(entry_state, e1, e2, sigma) == "in-contact"
    ):
        return _report("in-contact", entry_state)
    p1, p2 = entry_state.params
    f1, f2, d12, dist = _evaluate(e1, e2, p1, p2)
    lam1 = lam2 = config.lambda0
    toggle = 0
    prev_dist = math.nan
    prev_push = None

    for k in range(1, config.max_iter + 1):
        P1, P2 = f1[0], f2[0]
        inside1 = implicit_value(e2, P1) < 0.0
        inside2 = implicit_value(e1, P2) < 0.0
        push = dist < sigma or inside1 or inside2

        # overshoot = motion against the current goal; skip across mode flips
        if prev_push is not None and push == prev_push and not math.isnan(prev_dist):
            wrong_way = dist < prev_dist if push else dist > prev_dist
            if wrong_way:
                if toggle == 0:
                    lam1 *= 0.5
                else:
                    lam2 *= 0.5
                toggle = 1 - toggle

        guard = 1e-15 * max(dist, sigma)
        if push:
            g1 = (-f2[1][0], -f2[1][1], -f2[1][2])  # -n2 pushes the point on e1
            g2 = (-f1[1][0], -f1[1][1], -f1[1][2])
        else:
            g1 = d12
            g2 = (-d12[0], -d12[1], -d12[2])
        dth1, dph1 = _increments_fast(f1, g1, lam1, guard)
        dth2, dph2 = _increments_fast(f2, g2, lam2, guard)

        stationary = dth1 == 0.0 and dph1 == 0.0 and dth2 == 0.0 and dph2 == 0.0
        eps_d = None if math.isnan(prev_dist) else abs((dist - prev_dist) / dist) if dist > 0 else None
        if push and dist > 0.0:
            # at maximum overlap the segment runs against n1 and along n2
            dot1 = (d12[0] * f1[1][0] + d12[1] * f1[1][1] + d12[2] * f1[1][2]) / dist
            dot2 = (d12[0] * f2[1][0] + d12[1] * f2[1][1] + d12[2] * f2[1][2]) / dist
            eps_align = max(1.0 + dot1, 1.0 - dot2)
            done = (
                stationary
                or eps_align < config.tol_n
                or (eps_d is not None and eps_d < config.tol_d)
                or max(lam1, lam2) < config.tol_lambda
            )
            if done and inside1 and inside2 and dist > sigma:
                final = SolverState(
                    k=k,
                    params=(p1, p2),
                    points_global=(P1, P2),
                    d12=d12,
                    distance=dist,
                    lambdas=(lam1, lam2),
                    prev_distance=prev_dist,
                    halve_toggle=toggle,
                    normals=(f1[1], f2[1]),
                )
                return _report("overlapping", final)
        if not push and classify_state_contact(f1, f2, dist, sigma):
            final = SolverState(
                k=k,
                params=(p1, p2),
                points_global=(P1, P2),
                d12=d12,
                distance=dist,
                lambdas=(lam1, lam2),
                prev_distance=prev_dist,
                halve_toggle=toggle,
                normals=(f1[1], f2[1]),
            )
            return _report("in-contact", final)

        q1 = advance_param(p1, dth1, dph1)
        q2 = advance_param(p2, dth2, dph2)
        nf1, nf2, nd12, ndist = _evaluate(e1, e2, q1, q2)
        prev_dist, prev_push = dist, push
        p1, p2, f1, f2, d12, dist = q1, q2, nf1, nf2, nd12, ndist

    final = SolverState(
        k=config.max_iter,
        params=(p1, p2),
        points_global=(f1[0], f2[0]),
        d12=d12,
        distance=dist,
        lambdas=(lam1, lam2),
        prev_distance=prev_dist,
        halve_toggle=toggle,
        normals=(f1[1], f2[1]),
    )
    report = _report("overlapping", final)
    return ContactReport("max-iter", report.distance_or_depth, report.witness_params, report.witness_normals)


def classify_state_contact(f1, f2, dist, sigma) -> bool:
    """Tangency short-circuit for the continuation: sub-sigma pair with
    anti-aligned normals."""
    if dist >= sigma:
        return False
    n1, n2 = f1[1], f2[1]
    dot = n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2]
    return abs(dot + 1.0) < ALIGN_TOL


def analyze(
    e1: Ellipsoid,
    e2: Ellipsoid,
    config: SolverConfig = SolverConfig(),
    init: tuple[SurfaceParam, SurfaceParam] | None = None,
) -> ContactReport:
    """Full pipeline: run the sliding search, then classify, continuing to
    the penetration depth when the pair overlaps."""
    from .slider import solve

    result = solve(e1, e2, init, config)
    sigma = config.resolve_sigma(e1, e2)
    state = SolverState(
        k=result.iterations,
        params=result.params,
        points_global=(tuple(result.closest_points[0]), tuple(result.closest_points[1])),
        d12=tuple(result.closest_points[1] - result.closest_points[0]),
        distance=result.distance,
        lambdas=(config.lambda0, config.lambda0),
        prev_distance=math.nan,
        halve_toggle=0,
        normals=(tuple(result.normals[0]), tuple(result.normals[1])),
    )
    if result.status == "contact":
        return _report("in-contact", state)
    if result.status == "overlap":
        return penetration_depth(e1, e2, state, config)
    # a converged state can still be interpenetrating: overlapping bodies
    # admit spurious stationary pairs (anti-aligned normals at the
    # maximum-overlap points), so interiority decides, not alignment
    P1, P2 = state.points_global
    if implicit_value(e2, P1) < 0.0 and implicit_value(e1, P2) < 0.0:
        return penetration_depth(e1, e2, state, config)
    if state.distance < sigma:
        kind = classify(state, e1, e2, sigma)
        if kind == "in-contact":
            return _report("in-contact", state)
        if kind == "overlapping":
            return penetration_depth(e1, e2, state, config)
    return _report("separated", state)
