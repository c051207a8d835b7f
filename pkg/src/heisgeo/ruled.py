"""Vertical ruled surfaces X(t, s) = (t, a(t), s) and the ruled-minimal ODEs.

The tangent X_t has frame coefficients (1, a', (a - t a')/2) and X_s = E3.
Two ODE families classify ruled minimal graphs:

* item 5:  R'' (4 + R^2) = 2 R (R' + 1)(R' + 2), the graph z = (y/2)(R(x) + x);
* item 6:  the coupled system for (u, a) in
  x = t + s u(t), y = s, z = a(t) - s t / 2.

With u == 0 the second equation reduces to (1 + t^2) a'' = t a', solved by
:func:`closed_form_a`.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .scalar_field import AnalyticField, Domain2, GridField, Jet2, format_real


class DivergenceError(ArithmeticError):
    """Integration produced a non-finite state."""

    def __init__(self, t_last: float, message: str = ""):
        self.t_last = t_last
        super().__init__(message or f"non-finite state after t = {t_last!r}")


class DirectrixJet(NamedTuple):
    a: float
    a1: float
    a2: float


@dataclass(frozen=True)
class RuledForms:
    E: float
    F: float
    G: float
    L: float
    M: float
    N: float


def ruled_forms(d: DirectrixJet, t: float) -> RuledForms:
    a, a1, a2 = d
    c = a - t * a1
    s = np.sqrt(1.0 + a1 * a1)
    return RuledForms(
        E=1.0 + a1 * a1 + 0.25 * c * c,
        F=0.5 * c,
        G=1.0,
        L=(c * (1.0 + a1 * a1) - 2.0 * a2) / (2.0 * s),
        M=0.5 * s,
        N=0.0 * s,
    )


def ruled_mean_curvature(d: DirectrixJet, t: float) -> float:
    """H from the fundamental forms, 1/2 (EN + GL - 2FM)/(EG - F^2)."""
    r = ruled_forms(d, t)
    return 0.5 * (r.E * r.N + r.G * r.L - 2.0 * r.F * r.M) / (r.E * r.G - r.F * r.F)


def ruled_mean_curvature_closed(d: DirectrixJet) -> float:
    """H = -a'' / (2 (1 + a'^2)^{3/2}); independent of a and t."""
    return -d.a2 / (2.0 * (1.0 + d.a1 * d.a1) ** 1.5)


def ruled_normal(d: DirectrixJet) -> np.ndarray:
    """Unit normal (a', -1, 0)/sqrt(1 + a'^2) in the frame."""
    s = math.sqrt(1.0 + d.a1 * d.a1)
    return np.array([d.a1 / s, -1.0 / s, 0.0])


def closed_form_a(lam: float, mu: float, t):
    """a(t) = (lam/2) [t sqrt(1+t^2) + asinh t] + mu, with a'(t) = lam sqrt(1+t^2)."""
    t = np.asarray(t, dtype=float)
    return 0.5 * lam * (t * np.sqrt(1.0 + t * t) + np.arcsinh(t)) + mu


def closed_form_a_jet(lam: float, mu: float, t) -> DirectrixJet:
    t = np.asarray(t, dtype=float)
    s = np.sqrt(1.0 + t * t)
    return DirectrixJet(closed_form_a(lam, mu, t), lam * s, lam * t / s)


# ---------------------------------------------------------------------------
# ODE integration


@dataclass(frozen=True)
class OdeTrajectory:
    t: np.ndarray
    states: np.ndarray  # shape (len(t), n_components)
    step: float
    system: str
    components: tuple[str, ...]
    params: dict = field(default_factory=dict)
    method: str = "rk4"

    def component(self, name: str) -> np.ndarray:
        return self.states[:, self.components.index(name)]

    def header(self) -> dict:
        return {
            "system": self.system,
            "method": self.method,
            "step": self.step,
            "params": self.params,
            "columns": ["t", *self.components],
        }

    def to_csv(self, path: str | Path) -> None:
        """CSV whose first line is ``# <json header>``, then ``t,<components>``."""
        with open(path, "w", newline="") as fh:
            fh.write("# " + json.dumps(self.header()) + "\n")
            w = csv.writer(fh)
            w.writerow(["t", *self.components])
            for ti, row in zip(self.t, self.states):
                w.writerow([format_real(ti), *(format_real(v) for v in row)])


def rk4(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence[float],
    t_span: tuple[float, float],
    step: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step classical Runge-Kutta.

    The span is divided into ``ceil(span/step)`` equal steps, so the used step
    equals ``step`` whenever it divides the span.
    """
    t0, t1 = map(float, t_span)
    if not (step > 0 and math.isfinite(step)):
        raise ValueError(f"step must be positive and finite, got {step!r}")
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 < t0:
        raise ValueError(f"invalid span {t_span!r}")
    n = max(1, math.ceil((t1 - t0) / step - 1e-9))
    h = (t1 - t0) / n
    ts = t0 + h * np.arange(n + 1)
    ts[-1] = t1
    ys = np.empty((n + 1, len(y0)))
    y = np.asarray(y0, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("initial state must be finite")
    ys[0] = y
    for i in range(n):
        t = ts[i]
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise DivergenceError(float(t))
        ys[i + 1] = y
    return ts, ys


def item5_rhs(t: float, state: np.ndarray) -> np.ndarray:
    R, R1 = state
    return np.array([R1, 2.0 * R * (R1 + 1.0) * (R1 + 2.0) / (4.0 + R * R)])


def item6_rhs(t: float, state: np.ndarray) -> np.ndarray:
    u, u1, a, a1 = state
    d = 1.0 + u * u + t * t
    g = 1.0 + 2.0 * u1 * a1
    return np.array([u1, g * t * u1 / d, a1, g * (t * a1 - u) / d])


def integrate_item5(R0: float, R1: float, t_span: tuple[float, float], step: float) -> OdeTrajectory:
    ts, ys = rk4(item5_rhs, (R0, R1), t_span, step)
    return OdeTrajectory(
        ts, ys, float(ts[1] - ts[0]), "item5", ("R", "R1"), {"R0": R0, "R1": R1}
    )


def integrate_item6(
    u0: float, u1: float, a0: float, a1: float, t_span: tuple[float, float], step: float
) -> OdeTrajectory:
    ts, ys = rk4(item6_rhs, (u0, u1, a0, a1), t_span, step)
    return OdeTrajectory(
        ts,
        ys,
        float(ts[1] - ts[0]),
        "item6",
        ("u", "u1", "a", "a1"),
        {"u0": u0, "u1": u1, "a0": a0, "a1": a1},
    )


# ---------------------------------------------------------------------------
# graphs of u == 0 item-6 surfaces: t = x, so f(x, y) = a(x) - x y / 2


def item6_graph(lam: float, mu: float = 0.0) -> AnalyticField:
    """The u == 0 item-6 surface built on :func:`closed_form_a` as a graph."""

    def jet(x, y):
        a, a1, a2 = closed_form_a_jet(lam, mu, x)
        one = np.ones(np.broadcast(x, y).shape)
        return Jet2(
            (a - 0.5 * x * y) * one,
            (a1 - 0.5 * y) * one,
            -0.5 * x * one,
            a2 * one,
            -0.5 * one,
            0.0 * one,
        )

    return AnalyticField(jet, name=f"item6_graph(lam={lam:g}, mu={mu:g})")


def trajectory_to_graph(traj: OdeTrajectory, y_range: tuple[float, float], n_y: int) -> GridField:
    """Sample f(x, y) = a(x) - x y / 2 on the trajectory's t-grid.

    Only valid for u == 0 trajectories.
    """
    if traj.system != "item6":
        raise ValueError("graph export applies to item-6 trajectories")
    u = traj.component("u")
    if np.max(np.abs(u)) > 0.0:
        raise ValueError("graph export requires u == 0 along the trajectory")
    xs = traj.t
    ys = np.linspace(y_range[0], y_range[1], n_y)
    X, Y = np.meshgrid(xs, ys)
    values = traj.component("a")[None, :] - 0.5 * X * Y
    dom = Domain2(float(xs[0]), float(xs[-1]), float(y_range[0]), float(y_range[1]))
    return GridField(dom, values)
