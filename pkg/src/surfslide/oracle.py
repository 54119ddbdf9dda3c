"""Reference solvers used to validate the sliding iteration.

Two layers: an exact point-to-ellipsoid projection (axis-frame root solve)
and a coarse-to-fine lattice search over one surface. Resolution-limited by
design; accuracy, not speed, is the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    Ellipsoid,
    SurfaceParam,
    implicit_value,
    param_from_local_point,
    to_local_point,
)


class OverlapSuspectedError(RuntimeError):
    """A sampled surface point of one ellipsoid lies inside the other."""


@dataclass(frozen=True)
class OracleConfig:
    grid_theta: int = 64
    grid_phi: int = 32
    refine_levels: int = 6
    refine_shrink: float = 0.25
    point_tol: float = 1e-12

    def __post_init__(self):
        if self.grid_theta < 8 or self.grid_phi < 8:
            raise ValueError("grid counts must be >= 8")
        if not 0.0 < self.refine_shrink < 1.0:
            raise ValueError("refine_shrink must lie in (0, 1)")


def _foot_points_local(e: Ellipsoid, q: np.ndarray, point_tol: float) -> np.ndarray:
    """Feet of the normals dropped from exterior local points ``q`` (n, 3).

    The foot satisfies x_i = a_i^2 q_i / (a_i^2 + t) with t > 0 the unique
    root putting x on the surface; solved by bracketed bisection.
    """
    axes = np.asarray(e.semi_axes)
    a2 = axes**2
    qn = np.linalg.norm(q, axis=1)

    def resid(t):
        # sum_i (a_i q_i / (a_i^2 + t))^2 - 1
        return np.sum((axes * q / (a2 + t[:, None])) ** 2, axis=1) - 1.0

    lo = np.zeros_like(qn)
    hi = np.maximum(axes.max() * qn, axes.max() ** 2)
    while True:
        open_hi = resid(hi) >= 0.0
        if not open_hi.any():
            break
        hi[open_hi] *= 2.0
    # bisection; iteration count bounds the interval well below point_tol
    n_iter = max(80, int(math.ceil(math.log2(float(hi.max()) / point_tol))) + 2)
    for _ in range(min(n_iter, 200)):
        mid = 0.5 * (lo + hi)
        pos = resid(mid) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    t = 0.5 * (lo + hi)
    return a2 * q / (a2 + t[:, None])


def point_to_ellipsoid(
    e: Ellipsoid, Q, point_tol: float = 1e-12
) -> tuple[float, SurfaceParam]:
    """Distance from a strictly exterior global point to the ellipsoid, and
    the surface parameters of the closest point."""
    if implicit_value(e, Q) <= 0.0:
        raise ValueError("point is not strictly outside the ellipsoid")
    q = to_local_point(e, Q).reshape(1, 3)
    foot = _foot_points_local(e, q, point_tol)[0]
    dist = float(np.linalg.norm(q[0] - foot))
    return dist, param_from_local_point(e, foot)


def _surface_points_local(e: Ellipsoid, thetas: np.ndarray, phis: np.ndarray):
    """Lattice of local surface points, flattened theta-major so that
    np.argmin tie-breaks to the lowest (theta, phi) pair."""
    a, b, c = e.semi_axes
    th = thetas[:, None]
    ph = phis[None, :]
    x = a * np.sin(ph) * np.cos(th)
    y = b * np.sin(ph) * np.sin(th)
    z = c * np.cos(ph) * np.ones_like(th)
    pts = np.stack([x, y, z], axis=-1).reshape(-1, 3)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    return pts, tt.ravel(), pp.ravel()


def oracle_min_distance(
    e1: Ellipsoid, e2: Ellipsoid, cfg: OracleConfig = OracleConfig()
) -> tuple[float, tuple[SurfaceParam, SurfaceParam]]:
    """Brute-force minimum distance: project a refined lattice of points on
    e1 onto e2 and keep the best pair.

    Raises :class:`OverlapSuspectedError` when any sampled point of e1 falls
    inside e2, or when the best foot on e2 falls inside e1.
    """
    R12 = e2.rotation.T @ e1.rotation  # e1 local -> e2 local
    t12 = to_local_point(e2, np.asarray(e1.center))
    axes2 = np.asarray(e2.semi_axes)

    theta_c, theta_hw = math.pi, math.pi
    phi_c, phi_hw = math.pi / 2.0, math.pi / 2.0

    best = None  # (distance, theta1, phi1, foot_local2)
    for level in range(cfg.refine_levels + 1):
        thetas = np.linspace(
            theta_c - theta_hw, theta_c + theta_hw, cfg.grid_theta, endpoint=False
        )
        lo = max(0.0, phi_c - phi_hw)
        hi = min(math.pi, phi_c + phi_hw)
        phis = np.linspace(lo, hi, cfg.grid_phi)

        pts1, tt, pp = _surface_points_local(e1, thetas, phis)
        q = pts1 @ R12.T + t12  # points of e1 in e2's local frame
        inside = np.sum((q / axes2) ** 2, axis=1) - 1.0 <= 0.0
        if inside.any():
            raise OverlapSuspectedError(
                "a sampled surface point of e1 lies inside e2"
            )
        feet = _foot_points_local(e2, q, cfg.point_tol)
        dists = np.linalg.norm(q - feet, axis=1)
        i = int(np.argmin(dists))
        if best is None or dists[i] < best[0]:
            best = (float(dists[i]), float(tt[i]), float(pp[i]), feet[i])

        theta_c, phi_c = best[1], best[2]
        theta_hw *= cfg.refine_shrink
        phi_hw *= cfg.refine_shrink

    dist, th1, ph1, foot2 = best
    foot_global = e2.rotation @ foot2 + np.asarray(e2.center)
    if implicit_value(e1, foot_global) <= 0.0:
        raise OverlapSuspectedError("closest point of e2 lies inside e1")
    p1 = SurfaceParam.canonical(th1, ph1)
    p2 = param_from_local_point(e2, foot2)
    return dist, (p1, p2)
