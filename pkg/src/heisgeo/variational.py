"""Area functional of graphs and its first two vertical variations.

For f on a rectangle and a perturbation h vanishing on the boundary,

    A(t)   = int w(t),           w(t) = sqrt(1 + (p + t h_x)^2 + (q + t h_y)^2)
    A'(0)  = int (p h_x + q h_y) / w
    A''(0) = int (h_x^2 + h_y^2 + (q h_x - p h_y)^2) / w^3

Differentiating w(t) twice gives w^3 in the last denominator; the finite
difference tests in ``tests/test_variational.py`` pin that exponent.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .scalar_field import AnalyticField, Domain2, GridField, Jet2, ScalarField

BOUNDARY_TOL = 1e-12


class AdmissibilityError(ValueError):
    """Perturbation does not vanish on the boundary."""


@dataclass(frozen=True)
class QuadratureSpec:
    rule: Literal["midpoint", "trapezoid"] = "midpoint"
    n_x: int = 256
    n_y: int = 256

    def __post_init__(self):
        if self.rule not in ("midpoint", "trapezoid"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.n_x < 8 or self.n_y < 8:
            raise ValueError("quadrature needs at least 8 panels per axis")


DEFAULT_QUAD = QuadratureSpec()


def _nodes_weights(dom: Domain2, quad: QuadratureSpec):
    hx = (dom.x_max - dom.x_min) / quad.n_x
    hy = (dom.y_max - dom.y_min) / quad.n_y
    if quad.rule == "midpoint":
        xs = dom.x_min + hx * (np.arange(quad.n_x) + 0.5)
        ys = dom.y_min + hy * (np.arange(quad.n_y) + 0.5)
        wx = np.full(quad.n_x, hx)
        wy = np.full(quad.n_y, hy)
    else:
        xs = np.linspace(dom.x_min, dom.x_max, quad.n_x + 1)
        ys = np.linspace(dom.y_min, dom.y_max, quad.n_y + 1)
        wx = np.full(quad.n_x + 1, hx)
        wy = np.full(quad.n_y + 1, hy)
        wx[[0, -1]] *= 0.5
        wy[[0, -1]] *= 0.5
    X, Y = np.meshgrid(xs, ys)
    return X, Y, np.outer(wy, wx)


def _integrate(values: np.ndarray, weights: np.ndarray) -> float:
    # numpy's pairwise summation: fixed order for a fixed panel count
    return float(np.sum(values * weights))


def _grid_gradient_at_cells(g: GridField):
    """f_x, f_y at cell centres from the four surrounding nodes."""
    v = g.values
    fx = 0.5 * ((v[:-1, 1:] - v[:-1, :-1]) + (v[1:, 1:] - v[1:, :-1])) / g.h_x
    fy = 0.5 * ((v[1:, :-1] - v[:-1, :-1]) + (v[1:, 1:] - v[:-1, 1:])) / g.h_y
    X, Y = g.mesh()
    xc = 0.25 * (X[:-1, :-1] + X[1:, :-1] + X[:-1, 1:] + X[1:, 1:])
    yc = 0.25 * (Y[:-1, :-1] + Y[1:, :-1] + Y[:-1, 1:] + Y[1:, 1:])
    return xc, yc, fx, fy, np.full(fx.shape, g.h_x * g.h_y)


def _gradients(f: ScalarField, dom: Domain2, quad: QuadratureSpec):
    """Quadrature points, gradient of f there, and weights.

    Grid fields always integrate over their own cells with the midpoint rule.
    """
    if isinstance(f, GridField):
        return _grid_gradient_at_cells(f)
    X, Y, W = _nodes_weights(dom, quad)
    j = f.jet(X, Y)
    return X, Y, np.broadcast_to(j.fx, X.shape), np.broadcast_to(j.fy, X.shape), W


def area(f: ScalarField, dom: Domain2, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    X, Y, fx, fy, W = _gradients(f, dom, quad)
    p = fx + 0.5 * Y
    q = fy - 0.5 * X
    return _integrate(np.sqrt(1.0 + p * p + q * q), W)


def check_admissible(h: AnalyticField, dom: Domain2, n: int = 257) -> None:
    bx, by = dom.boundary_samples(n)
    worst = float(np.max(np.abs(h(bx, by))))
    if worst > BOUNDARY_TOL:
        raise AdmissibilityError(f"perturbation is {worst:.3e} on the boundary")


def _pair(f: ScalarField, h: AnalyticField, dom: Domain2, quad: QuadratureSpec):
    check_admissible(h, dom)
    X, Y, fx, fy, W = _gradients(f, dom, quad)
    hj = h.jet(X, Y)
    hx = np.broadcast_to(hj.fx, X.shape)
    hy = np.broadcast_to(hj.fy, X.shape)
    p = fx + 0.5 * Y
    q = fy - 0.5 * X
    return p, q, np.sqrt(1.0 + p * p + q * q), hx, hy, W


def first_variation(
    f: ScalarField, h: AnalyticField, dom: Domain2, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    p, q, w, hx, hy, W = _pair(f, h, dom, quad)
    return _integrate((p * hx + q * hy) / w, W)


def second_variation(
    f: ScalarField, h: AnalyticField, dom: Domain2, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    p, q, w, hx, hy, W = _pair(f, h, dom, quad)
    twist = q * hx - p * hy
    return _integrate((hx * hx + hy * hy + twist * twist) / w**3, W)


# ---------------------------------------------------------------------------
# admissible perturbations


def bump(cx: float, cy: float, radius: float, amplitude: float = 1.0) -> AnalyticField:
    """Smooth compactly supported bump A exp(1 - 1/(1 - r^2/R^2)), zero for r >= R."""
    R2 = radius * radius

    def jet(x, y):
        dx = x - cx
        dy = y - cy
        s = (dx * dx + dy * dy) / R2
        inside = s < 1.0
        si = np.where(inside, s, 0.0)
        u = 1.0 / (1.0 - si)
        g = np.where(inside, np.exp(1.0 - u), 0.0)
        g1 = -g * u * u  # dg/ds
        g2 = g * (u**4 - 2.0 * u**3)  # d2g/ds2
        sx = 2.0 * dx / R2
        sy = 2.0 * dy / R2
        A = amplitude
        return Jet2(
            A * g,
            A * g1 * sx,
            A * g1 * sy,
            A * (g2 * sx * sx + g1 * 2.0 / R2),
            A * g2 * sx * sy,
            A * (g2 * sy * sy + g1 * 2.0 / R2),
        )

    return AnalyticField(jet, name=f"bump({cx:g},{cy:g},{radius:g})")


def sine_bump(dom: Domain2, mx: int = 1, my: int = 1, amplitude: float = 1.0) -> AnalyticField:
    """A sin(mx pi u) sin(my pi v) in the domain's unit coordinates (u, v)."""
    Lx = dom.x_max - dom.x_min
    Ly = dom.y_max - dom.y_min
    kx = mx * np.pi / Lx
    ky = my * np.pi / Ly

    def jet(x, y):
        sx, cx_ = np.sin(kx * (x - dom.x_min)), np.cos(kx * (x - dom.x_min))
        sy, cy_ = np.sin(ky * (y - dom.y_min)), np.cos(ky * (y - dom.y_min))
        A = amplitude
        return Jet2(
            A * sx * sy,
            A * kx * cx_ * sy,
            A * ky * sx * cy_,
            -A * kx * kx * sx * sy,
            A * kx * ky * cx_ * cy_,
            -A * ky * ky * sx * sy,
        )

    return AnalyticField(jet, name=f"sine_bump({mx},{my})")


def random_bump(
    rng: np.random.Generator, dom: Domain2, min_frac: float = 0.2, amplitude: float | None = None
) -> AnalyticField:
    """A bump with random centre, radius and amplitude supported inside ``dom``.

    The radius is at least ``min_frac`` of the shorter side so that default
    quadrature resolves it.  Pass ``amplitude`` to fix the height instead.
    """
    Lx = dom.x_max - dom.x_min
    Ly = dom.y_max - dom.y_min
    short = min(Lx, Ly)
    radius = rng.uniform(min_frac, 0.45) * short
    cx = rng.uniform(dom.x_min + radius, dom.x_max - radius)
    cy = rng.uniform(dom.y_min + radius, dom.y_max - radius)
    if amplitude is None:
        amplitude = rng.uniform(0.05, 1.0) * rng.choice([-1.0, 1.0])
    return bump(cx, cy, radius, amplitude)
