"""Ellipsoid geometry: rotations, the parametric surface, and local frames.

Everything here is a pure function of its inputs. ``Ellipsoid`` values are
immutable after construction, so they can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# tangent_theta degenerates at the poles (phi = 0 or pi); the threshold is
# relative to the largest in-plane semi-axis so very small ellipsoids
# (semi-axes down to 0.02 in the bundled scenarios) are not misflagged.
POLE_TOL = 1e-12

# a point handed to param_from_local_point may be off-surface by at most this
# much in implicit-function value
ON_SURFACE_TOL = 1e-8


class NoIntersectionError(ValueError):
    """The segment does not reach the ellipsoid surface."""


def rotation_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Body-to-global rotation, composed as Rx(alpha) @ Ry(beta) @ Rz(gamma)."""
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    cg, sg = math.cos(gamma), math.sin(gamma)
    return np.array(
        [
            [cb * cg, -cb * sg, sb],
            [ca * sg + sa * sb * cg, ca * cg - sa * sb * sg, -sa * cb],
            [sa * sg - ca * sb * cg, sa * cg + ca * sb * sg, ca * cb],
        ]
    )


def euler_from_rotation(R: np.ndarray) -> tuple[float, float, float]:
    """Invert :func:`rotation_matrix`. Gimbal lock (|cos beta| = 0) resolves
    to gamma = 0."""
    R = np.asarray(R, dtype=float)
    cb = math.hypot(R[0, 0], R[0, 1])
    beta = math.atan2(R[0, 2], cb)
    if cb < 1e-12:
        return math.atan2(R[2, 1], R[1, 1]), beta, 0.0
    alpha = math.atan2(-R[1, 2], R[2, 2])
    gamma = math.atan2(-R[0, 1], R[0, 0])
    return alpha, beta, gamma


@dataclass(frozen=True)
class SurfaceParam:
    """A (theta, phi) pair locating a point on an ellipsoid surface.

    Canonical form has 0 <= theta < 2*pi and 0 <= phi <= pi.
    """

    theta: float
    phi: float

    @staticmethod
    def canonical(theta: float, phi: float) -> "SurfaceParam":
        """Wrap theta into [0, 2*pi) and reflect phi back into [0, pi].

        Stepping past a pole reflects phi and shifts theta by pi, which keeps
        the point on the same continuous surface path.
        """
        phi = math.fmod(phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi > math.pi:
            phi = TWO_PI - phi
            theta += math.pi
        theta = math.fmod(theta, TWO_PI)
        if theta < 0.0:
            theta += TWO_PI
        return SurfaceParam(theta, phi)

    def is_canonical(self) -> bool:
        return 0.0 <= self.theta < TWO_PI and 0.0 <= self.phi <= math.pi


@dataclass(frozen=True)
class SurfaceFrame:
    """Position plus the outward normal and unit tangents at a surface point.

    ``tangent_theta`` is None exactly when the point sits at a pole, where
    the theta direction is degenerate.
    """

    position: np.ndarray
    normal: np.ndarray
    tangent_theta: np.ndarray | None
    tangent_phi: np.ndarray
    frame: str  # "local" or "global"


@dataclass(frozen=True)
class Ellipsoid:
    """An ellipsoid with semi-axes (a, b, c), a global center, and an
    orientation given by the (alpha, beta, gamma) angles of
    :func:`rotation_matrix`."""

    semi_axes: tuple[float, float, float]
    center: tuple[float, float, float]
    euler: tuple[float, float, float]
    # derived, cached at construction; kept out of comparisons
    _rows: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        axes = tuple(float(v) for v in self.semi_axes)
        ctr = tuple(float(v) for v in self.center)
        ang = tuple(float(v) for v in self.euler)
        if len(axes) != 3 or len(ctr) != 3 or len(ang) != 3:
            raise ValueError("semi_axes, center and euler must each have 3 entries")
        for v in axes + ctr + ang:
            if not math.isfinite(v):
                raise ValueError("ellipsoid parameters must be finite")
        if min(axes) <= 0.0:
            raise ValueError("semi-axis must be positive")
        object.__setattr__(self, "semi_axes", axes)
        object.__setattr__(self, "center", ctr)
        object.__setattr__(self, "euler", ang)
        R = rotation_matrix(*ang)
        object.__setattr__(self, "_rows", tuple(tuple(row) for row in R))

    @property
    def rotation(self) -> np.ndarray:
        """The cached 3x3 body-to-global rotation matrix."""
        return np.array(self._rows)

    @property
    def max_semi_axis(self) -> float:
        return max(self.semi_axes)


# ---------------------------------------------------------------------------
# scalar kernels (plain floats; the solver's inner loop lives on these)

def _local_point(a, b, c, theta, phi):
    sp, cp = math.sin(phi), math.cos(phi)
    st, ct = math.sin(theta), math.cos(theta)
    return a * sp * ct, b * sp * st, c * cp


def _rotate(rows, v):
    x, y, z = v
    r0, r1, r2 = rows
    return (
        r0[0] * x + r0[1] * y + r0[2] * z,
        r1[0] * x + r1[1] * y + r1[2] * z,
        r2[0] * x + r2[1] * y + r2[2] * z,
    )


def _rotate_t(rows, v):
    x, y, z = v
    r0, r1, r2 = rows
    return (
        r0[0] * x + r1[0] * y + r2[0] * z,
        r0[1] * x + r1[1] * y + r2[1] * z,
        r0[2] * x + r1[2] * y + r2[2] * z,
    )


def _norm3(v):
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


def _unit3(v, n):
    return (v[0] / n, v[1] / n, v[2] / n)


def _frame_fast(e: Ellipsoid, theta: float, phi: float):
    """Global-frame (position, normal, tangent_theta-or-None, tangent_phi)
    as plain float triples. Hot path shared by the solver and the public
    :func:`surface_frame`."""
    a, b, c = e.semi_axes
    sp, cp = math.sin(phi), math.cos(phi)
    st, ct = math.sin(theta), math.cos(theta)

    p_loc = (a * sp * ct, b * sp * st, c * cp)
    n_loc = (b * c * sp * ct, a * c * sp * st, a * b * cp)
    rt_loc = (-a * sp * st, b * sp * ct, 0.0)
    rp_loc = (a * cp * ct, b * cp * st, -c * sp)

    n_loc = _unit3(n_loc, _norm3(n_loc))
    rt_norm = _norm3(rt_loc)
    et_loc = None if rt_norm < POLE_TOL * max(a, b) else _unit3(rt_loc, rt_norm)
    ep_loc = _unit3(rp_loc, _norm3(rp_loc))

    rows = e._rows
    cx, cy, cz = e.center
    px, py, pz = _rotate(rows, p_loc)
    pos = (px + cx, py + cy, pz + cz)
    return (
        pos,
        _rotate(rows, n_loc),
        None if et_loc is None else _rotate(rows, et_loc),
        _rotate(rows, ep_loc),
    )


# ---------------------------------------------------------------------------
# public operations

def surface_point_local(e: Ellipsoid, p: SurfaceParam) -> np.ndarray:
    """Local coordinates of the surface point at (theta, phi)."""
    a, b, c = e.semi_axes
    return np.array(_local_point(a, b, c, p.theta, p.phi))


def to_global_point(e: Ellipsoid, x_local) -> np.ndarray:
    """Rotate a local point into the global frame and translate by the
    center."""
    x = np.asarray(x_local, dtype=float)
    return e.rotation @ x + np.asarray(e.center)


def to_global_vector(e: Ellipsoid, v_local) -> np.ndarray:
    """Rotate a local direction into the global frame (no translation)."""
    return e.rotation @ np.asarray(v_local, dtype=float)


def to_local_point(e: Ellipsoid, X_global) -> np.ndarray:
    """Inverse of :func:`to_global_point`."""
    X = np.asarray(X_global, dtype=float) - np.asarray(e.center)
    return e.rotation.T @ X


def surface_point_global(e: Ellipsoid, p: SurfaceParam) -> np.ndarray:
    return to_global_point(e, surface_point_local(e, p))


def surface_frame(e: Ellipsoid, p: SurfaceParam, frame: str = "global") -> SurfaceFrame:
    """Surface point with its unit normal and unit tangents.

    ``tangent_theta`` is None at the poles, where its defining direction
    vanishes; that degeneracy is represented, never raised.
    """
    if frame not in ("local", "global"):
        raise ValueError(f"frame must be 'local' or 'global', got {frame!r}")
    a, b, c = e.semi_axes
    theta, phi = p.theta, p.phi
    if frame == "global":
        pos, n, et, ep = _frame_fast(e, theta, phi)
        return SurfaceFrame(
            np.array(pos),
            np.array(n),
            None if et is None else np.array(et),
            np.array(ep),
            "global",
        )
    sp, cp = math.sin(phi), math.cos(phi)
    st, ct = math.sin(theta), math.cos(theta)
    pos = np.array((a * sp * ct, b * sp * st, c * cp))
    n = np.array((b * c * sp * ct, a * c * sp * st, a * b * cp))
    n /= np.linalg.norm(n)
    rt = np.array((-a * sp * st, b * sp * ct, 0.0))
    rt_norm = np.linalg.norm(rt)
    et = None if rt_norm < POLE_TOL * max(a, b) else rt / rt_norm
    rp = np.array((a * cp * ct, b * cp * st, -c * sp))
    ep = rp / np.linalg.norm(rp)
    return SurfaceFrame(pos, n, et, ep, "local")


def implicit_value(e: Ellipsoid, X_global) -> float:
    """(x/a)^2 + (y/b)^2 + (z/c)^2 - 1 for the local coordinates of the
    point: negative inside, zero on the surface, positive outside."""
    a, b, c = e.semi_axes
    x, y, z = to_local_point(e, X_global)
    return (x / a) ** 2 + (y / b) ** 2 + (z / c) ** 2 - 1.0


def param_from_local_point(e: Ellipsoid, x_local) -> SurfaceParam:
    """Invert the parametric map for a point on the surface.

    phi = arccos(z/c) with clamping against round-off; theta = atan2(y/b, x/a)
    wrapped into [0, 2*pi). Poles report theta = 0.
    """
    x, y, z = (float(v) for v in x_local)
    a, b, c = e.semi_axes
    resid = (x / a) ** 2 + (y / b) ** 2 + (z / c) ** 2 - 1.0
    if abs(resid) > ON_SURFACE_TOL:
        raise ValueError(
            f"point is off the surface (implicit value {resid:.3e} exceeds "
            f"{ON_SURFACE_TOL:.0e})"
        )
    phi = math.acos(min(1.0, max(-1.0, z / c)))
    if math.hypot(x / a, y / b) < 1e-12:
        theta = 0.0  # pole convention
    else:
        theta = math.atan2(y / b, x / a)
        if theta < 0.0:
            theta += TWO_PI
    return SurfaceParam(theta, phi)


def line_surface_entry(e: Ellipsoid, A, B) -> SurfaceParam:
    """Parameters of the point where the segment A -> B first meets the
    surface (the entry point as seen from A)."""
    a, b, c = e.semi_axes
    A_loc = to_local_point(e, A)
    B_loc = to_local_point(e, B)
    inv = np.array((1.0 / a, 1.0 / b, 1.0 / c))
    p = A_loc * inv
    d = (B_loc - A_loc) * inv
    qa = float(d @ d)
    qb = 2.0 * float(p @ d)
    qc = float(p @ p) - 1.0
    if qa == 0.0:
        raise NoIntersectionError("degenerate segment (A == B)")
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        raise NoIntersectionError("segment does not intersect the ellipsoid")
    sq = math.sqrt(disc)
    roots = sorted(((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)))
    for t in roots:
        if 0.0 <= t <= 1.0:
            return param_from_local_point(e, A_loc + t * (B_loc - A_loc))
    raise NoIntersectionError("both intersections lie outside the segment")
