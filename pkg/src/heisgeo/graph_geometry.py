"""Pointwise geometry of graphs z = f(x, y) in H3.

Every function takes a :class:`~heisgeo.scalar_field.Jet2` of f at (x, y) and
the point itself; all arguments broadcast, so a whole grid of jets can be
processed in one call.  2x2 operators are returned as arrays of shape
``(..., 2, 2)`` expressed in the parametrisation basis {X_x, X_y}, with the
column convention ``A @ [a, b]`` giving the image of ``a X_x + b X_y``.

Notation: p = f_x + y/2, q = f_y - x/2, w = sqrt(1 + p^2 + q^2).  In the frame,
X_x = E1 + p E3, X_y = E2 + q E3 and the upward unit normal is
(-p, -q, 1)/w.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .scalar_field import Jet2

# Sign s in  gauss_jacobian = -s * (weingarten + alpha_matrix).  With the
# Weingarten operator A v = -nabla_v eta, the upward normal and column-image
# matrices used here, the identity holds as printed (s = +1); checked by
# tests/test_graph_geometry.py and the acceptance suite.
OPERATOR_SIGN = 1.0


class SlopeData(NamedTuple):
    p: np.ndarray | float
    q: np.ndarray | float
    w: np.ndarray | float


def _mat2(m11, m12, m21, m22) -> np.ndarray:
    m11, m12, m21, m22 = np.broadcast_arrays(
        *(np.asarray(m, dtype=float) for m in (m11, m12, m21, m22))
    )
    out = np.empty(m11.shape + (2, 2))
    out[..., 0, 0] = m11
    out[..., 0, 1] = m12
    out[..., 1, 0] = m21
    out[..., 1, 1] = m22
    return out


def det2(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def trace2(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] + m[..., 1, 1]


def slope(jet: Jet2, x, y) -> SlopeData:
    p = jet.fx + 0.5 * np.asarray(y)
    q = jet.fy - 0.5 * np.asarray(x)
    return SlopeData(p, q, np.sqrt(1.0 + p * p + q * q))


def first_form(jet: Jet2, x, y) -> np.ndarray:
    p, q, _ = slope(jet, x, y)
    return _mat2(1.0 + p * p, p * q, p * q, 1.0 + q * q)


def unit_normal(jet: Jet2, x, y) -> np.ndarray:
    """Upward unit normal as frame coefficients, shape ``(..., 3)``."""
    p, q, w = slope(jet, x, y)
    return np.stack(np.broadcast_arrays(-p / w, -q / w, 1.0 / w), axis=-1)


def second_form(jet: Jet2, x, y) -> np.ndarray:
    p, q, w = slope(jet, x, y)
    L = (jet.fxx + q * p) / w
    M = (jet.fxy + 0.5 * q * q - 0.5 * p * p) / w
    N = (jet.fyy - q * p) / w
    return _mat2(L, M, M, N)


def weingarten(jet: Jet2, x, y) -> np.ndarray:
    """Shape operator I^{-1} II in the basis {X_x, X_y}."""
    I = first_form(jet, x, y)
    II = second_form(jet, x, y)
    # explicit 2x2 inverse; det I = w^2 >= 1
    d = det2(I)
    inv = _mat2(I[..., 1, 1] / d, -I[..., 0, 1] / d, -I[..., 1, 0] / d, I[..., 0, 0] / d)
    return inv @ II


def mean_curvature(jet: Jet2, x, y) -> np.ndarray:
    I = first_form(jet, x, y)
    II = second_form(jet, x, y)
    E, F, G = I[..., 0, 0], I[..., 0, 1], I[..., 1, 1]
    L, M, N = II[..., 0, 0], II[..., 0, 1], II[..., 1, 1]
    return 0.5 * (E * N + G * L - 2.0 * F * M) / (E * G - F * F)


def minimal_residual(jet: Jet2, x, y) -> np.ndarray:
    """Left side of the minimal-graph equation; equals 2 H w^3."""
    p, q, _ = slope(jet, x, y)
    return (1.0 + q * q) * jet.fxx - 2.0 * q * p * jet.fxy + (1.0 + p * p) * jet.fyy


def gauss_jacobian(jet: Jet2, x, y) -> np.ndarray:
    """Matrix of dL_p o dgamma_p, differentiating the normal analytically."""
    p, q, w = slope(jet, x, y)
    px, py = jet.fxx, jet.fxy + 0.5
    qx, qy = jet.fxy - 0.5, jet.fyy
    wx = (p * px + q * qx) / w
    wy = (p * py + q * qy) / w
    w2 = w * w
    return _mat2(
        -(px * w - p * wx) / w2,
        -(py * w - p * wy) / w2,
        -(qx * w - q * wx) / w2,
        -(qy * w - q * wy) / w2,
    )


def hessian_det(jet: Jet2) -> np.ndarray:
    """f_xx f_yy - f_xy^2."""
    return jet.fxx * jet.fyy - jet.fxy * jet.fxy


def rank_det(jet: Jet2, x, y) -> np.ndarray:
    """Gauss-map rank indicator (f_xx f_yy - f_xy^2 + 1/4) / w^2.

    Vanishes exactly where the Gauss map drops rank.  Note the true
    determinant of :func:`gauss_jacobian` carries w^4, not w^2; the two agree
    in sign and zero set, and ``det(gauss_jacobian) * w^2 == rank_det``.
    """
    _, _, w = slope(jet, x, y)
    return (hessian_det(jet) + 0.25) / (w * w)


def alpha_matrix(jet: Jet2, x, y) -> np.ndarray:
    """nabla_v of the left-invariant extension of the normal, in {X_x, X_y}."""
    p, q, w = slope(jet, x, y)
    s = 1.0 / (2.0 * w)
    return _mat2(-p * q * s, (1.0 - q * q) * s, (p * p - 1.0) * s, p * q * s)


def operator_identity_defect(jet: Jet2, x, y) -> np.ndarray:
    """gauss_jacobian + s (weingarten + alpha_matrix); zero up to rounding."""
    return gauss_jacobian(jet, x, y) + OPERATOR_SIGN * (
        weingarten(jet, x, y) + alpha_matrix(jet, x, y)
    )


def ambient_sectional(jet: Jet2, x, y) -> np.ndarray:
    _, _, w = slope(jet, x, y)
    return 0.25 - 1.0 / (w * w)


def surface_sectional(jet: Jet2, x, y) -> np.ndarray:
    """Intrinsic Gauss curvature of the graph."""
    p, q, w = slope(jet, x, y)
    num = (
        hessian_det(jet)
        + 0.25
        + p * q * (jet.fyy - jet.fxx)
        + p * p * (jet.fxy - 0.5)
        - q * q * (jet.fxy + 0.5)
        - 1.0
    )
    return num / w**4


def umbilicity_defect(jet: Jet2, x, y) -> np.ndarray:
    """Frobenius norm of the trace-free part of the shape operator."""
    A = weingarten(jet, x, y)
    half_tr = 0.5 * trace2(A)
    d = A.copy()
    d[..., 0, 0] -= half_tr
    d[..., 1, 1] -= half_tr
    return np.sqrt(np.sum(d * d, axis=(-2, -1)))


@dataclass(frozen=True)
class SurfacePointReport:
    slope: SlopeData
    first_form: np.ndarray
    second_form: np.ndarray
    normal: np.ndarray
    weingarten: np.ndarray
    mean_curvature: float
    surface_K: float
    ambient_K: float
    gauss_jac: np.ndarray
    alpha: np.ndarray
    rank_det: float
    umbilicity_defect: float

    @property
    def trace_gauss(self) -> float:
        return float(trace2(self.gauss_jac))

    def to_dict(self) -> dict:
        p, q, w = self.slope
        I, II = self.first_form, self.second_form
        return {
            "p": float(p),
            "q": float(q),
            "w": float(w),
            "E": float(I[0, 0]),
            "F": float(I[0, 1]),
            "G": float(I[1, 1]),
            "L": float(II[0, 0]),
            "M": float(II[0, 1]),
            "N": float(II[1, 1]),
            "normal": [float(c) for c in self.normal],
            "H": float(self.mean_curvature),
            "K": float(self.surface_K),
            "K_ambient": float(self.ambient_K),
            "rank_det": float(self.rank_det),
            "trace_gauss": self.trace_gauss,
            "umbilicity_defect": float(self.umbilicity_defect),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def report(jet: Jet2, x: float, y: float) -> SurfacePointReport:
    """All pointwise geometry at a single point."""
    jet = Jet2(*(float(c) for c in jet))
    s = SlopeData(*(float(c) for c in slope(jet, x, y)))
    return SurfacePointReport(
        slope=s,
        first_form=first_form(jet, x, y),
        second_form=second_form(jet, x, y),
        normal=unit_normal(jet, x, y),
        weingarten=weingarten(jet, x, y),
        mean_curvature=float(mean_curvature(jet, x, y)),
        surface_K=float(surface_sectional(jet, x, y)),
        ambient_K=float(ambient_sectional(jet, x, y)),
        gauss_jac=gauss_jacobian(jet, x, y),
        alpha=alpha_matrix(jet, x, y),
        rank_det=float(rank_det(jet, x, y)),
        umbilicity_defect=float(umbilicity_defect(jet, x, y)),
    )


def field_table(jet: Jet2, x, y) -> dict[str, np.ndarray]:
    """Columnar geometry over arrays of points (the CLI ``eval`` columns)."""
    p, q, w = slope(jet, x, y)
    shape = np.broadcast(x, y, jet.f).shape
    cols = {
        "x": x,
        "y": y,
        "f": jet.f,
        "p": p,
        "q": q,
        "w": w,
        "H": mean_curvature(jet, x, y),
        "K": surface_sectional(jet, x, y),
        "rank_det": rank_det(jet, x, y),
        "trace_gauss": trace2(gauss_jacobian(jet, x, y)),
        "umbilicity_defect": umbilicity_defect(jet, x, y),
    }
    return {k: np.broadcast_to(np.asarray(v, dtype=float), shape) for k, v in cols.items()}
