"""Shared randomized-case generators for the property and acceptance
suites."""

import math

import numpy as np

from surfslide.geometry import Ellipsoid, SurfaceParam

PI = math.pi


def random_ellipsoid(rng, lo=0.02, hi=2.0, max_aspect=30.0, center_box=0.0):
    """Ellipsoid with semi-axes log-uniform in [lo, hi], aspect ratio capped
    at max_aspect, uniform orientation angles."""
    while True:
        axes = np.exp(rng.uniform(math.log(lo), math.log(hi), 3))
        if axes.max() / axes.min() <= max_aspect:
            break
    center = rng.uniform(-center_box, center_box, 3) if center_box else np.zeros(3)
    euler = rng.uniform(-PI, PI, 3)
    return Ellipsoid(tuple(axes), tuple(center), tuple(euler))


def random_separated_pair(rng, lo=0.02, hi=2.0, max_aspect=30.0):
    """Two random ellipsoids guaranteed separated: the center gap exceeds
    the sum of the enclosing-sphere radii."""
    e1 = random_ellipsoid(rng, lo, hi, max_aspect)
    e2 = random_ellipsoid(rng, lo, hi, max_aspect)
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    gap = (max(e1.semi_axes) + max(e2.semi_axes)) * (1.05 + rng.uniform(0.0, 1.0))
    c1 = rng.uniform(-1.0, 1.0, 3)
    c2 = c1 + gap * u
    e1 = Ellipsoid(e1.semi_axes, tuple(c1), e1.euler)
    e2 = Ellipsoid(e2.semi_axes, tuple(c2), e2.euler)
    return e1, e2


def random_param(rng) -> SurfaceParam:
    return SurfaceParam(rng.uniform(0.0, 2.0 * PI), rng.uniform(0.0, PI))
