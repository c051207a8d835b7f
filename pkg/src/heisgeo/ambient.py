"""The Heisenberg group H3 in exponential coordinates with its left-invariant metric.

Tangent vectors are carried as coefficients in the orthonormal left-invariant
frame

    E1 = d/dx - (y/2) d/dz,   E2 = d/dy + (x/2) d/dz,   E3 = d/dz,

with brackets [E1, E2] = E3 and [Ei, E3] = 0.  Every vector field handled here
is treated as left-invariant (constant frame coefficients), so the connection
and curvature reduce to bilinear/trilinear algebra on R^3.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np


class Point3(NamedTuple):
    x: float
    y: float
    z: float


class FrameVec3(NamedTuple):
    """Coefficients in the frame {E1, E2, E3}."""

    v1: float
    v2: float
    v3: float


class CoordVec3(NamedTuple):
    """Coefficients in the coordinate basis {d/dx, d/dy, d/dz}."""

    a: float
    b: float
    c: float


IDENTITY = Point3(0.0, 0.0, 0.0)

# Structure constants: BRACKET[i, j] = [E_i, E_j] as frame coefficients.
BRACKET = np.zeros((3, 3, 3))
BRACKET[0, 1] = (0.0, 0.0, 1.0)
BRACKET[1, 0] = (0.0, 0.0, -1.0)

# Levi-Civita table: CONNECTION[i, j] = nabla_{E_i} E_j.
CONNECTION = np.zeros((3, 3, 3))
CONNECTION[0, 1] = (0.0, 0.0, 0.5)
CONNECTION[1, 0] = (0.0, 0.0, -0.5)
CONNECTION[0, 2] = (0.0, -0.5, 0.0)
CONNECTION[2, 0] = (0.0, -0.5, 0.0)
CONNECTION[1, 2] = (0.5, 0.0, 0.0)
CONNECTION[2, 1] = (0.5, 0.0, 0.0)


def _check_finite(*values: float) -> None:
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"non-finite coordinates: {values}")


def group_mul(p: Point3, q: Point3) -> Point3:
    x1, y1, z1 = p
    x2, y2, z2 = q
    _check_finite(x1, y1, z1, x2, y2, z2)
    return Point3(x1 + x2, y1 + y2, z1 + z2 + 0.5 * (x1 * y2 - x2 * y1))


def group_inv(p: Point3) -> Point3:
    x, y, z = p
    _check_finite(x, y, z)
    return Point3(-x, -y, -z)


def coord_to_frame(p: Point3, v: CoordVec3) -> FrameVec3:
    x, y, _ = p
    a, b, c = v
    return FrameVec3(a, b, 0.5 * a * y - 0.5 * b * x + c)


def frame_to_coord(p: Point3, v: FrameVec3) -> CoordVec3:
    x, y, _ = p
    v1, v2, v3 = v
    return CoordVec3(v1, v2, v3 - 0.5 * v1 * y + 0.5 * v2 * x)


def metric(u: FrameVec3, v: FrameVec3) -> float:
    return float(np.dot(u, v))


def norm(u: FrameVec3) -> float:
    return math.sqrt(metric(u, u))


def bracket(u: FrameVec3, v: FrameVec3) -> FrameVec3:
    return FrameVec3(*np.einsum("i,j,ijk->k", u, v, BRACKET))


def nabla(u: FrameVec3, v: FrameVec3) -> FrameVec3:
    """Covariant derivative of the left-invariant field ``v`` along ``u``."""
    return FrameVec3(*np.einsum("i,j,ijk->k", u, v, CONNECTION))


def curvature(u: FrameVec3, v: FrameVec3, w: FrameVec3) -> FrameVec3:
    """R(u, v)w = nabla_u nabla_v w - nabla_v nabla_u w - nabla_[u,v] w."""
    a = np.asarray(nabla(u, nabla(v, w)))
    b = np.asarray(nabla(v, nabla(u, w)))
    c = np.asarray(nabla(bracket(u, v), w))
    return FrameVec3(*(a - b - c))


def sectional(u: FrameVec3, v: FrameVec3) -> float:
    """Sectional curvature <R(u,v)v, u> / |u ^ v|^2 of the plane spanned by u, v."""
    area2 = metric(u, u) * metric(v, v) - metric(u, v) ** 2
    if area2 <= 0.0:
        raise ValueError("u and v are linearly dependent")
    return metric(curvature(u, v, v), u) / area2


def plane_sectional(normal: FrameVec3) -> float:
    """Ambient sectional curvature of the plane orthogonal to ``normal``.

    Equal to 1/4 - n3^2 for the unit normal n; vertical planes give 1/4 and
    the horizontal plane at any point gives -3/4.
    """
    n3 = normal[2] / norm(normal)
    return 0.25 - n3 * n3
