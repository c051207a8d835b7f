"""Scalar fields f(x, y) with second-order jets.

Two backings share one evaluation interface:

* :class:`AnalyticField` wraps a vectorised closed-form jet function.
* :class:`GridField` holds samples on a uniform rectangular grid and produces
  jets by second-order central differences at interior nodes.

All jet components may be numpy arrays; geometry routines broadcast over them.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Union

import numpy as np


class DomainError(ValueError):
    """Evaluation point lies outside a field's domain."""


class Jet2(NamedTuple):
    f: np.ndarray | float
    fx: np.ndarray | float
    fy: np.ndarray | float
    fxx: np.ndarray | float
    fxy: np.ndarray | float
    fyy: np.ndarray | float

    def __add__(self, other):  # type: ignore[override]
        return Jet2(*(a + b for a, b in zip(self, other)))

    def scaled(self, s: float) -> "Jet2":
        return Jet2(*(s * a for a in self))

    def as_array(self) -> np.ndarray:
        return np.array([np.asarray(c, dtype=float) for c in self])


def zero_jet_like(x) -> Jet2:
    z = np.zeros_like(np.asarray(x, dtype=float))
    return Jet2(z, z, z, z, z, z)


@dataclass(frozen=True)
class Domain2:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite domain bounds {vals}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"empty domain {vals}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def contains(self, x, y, slack: float = 0.0):
        return (
            (x >= self.x_min - slack)
            & (x <= self.x_max + slack)
            & (y >= self.y_min - slack)
            & (y <= self.y_max + slack)
        )

    def boundary_samples(self, n: int = 65) -> tuple[np.ndarray, np.ndarray]:
        """Points on the four edges, ``n`` per edge (corners repeated)."""
        s = np.linspace(0.0, 1.0, n)
        xs = self.x_min + s * (self.x_max - self.x_min)
        ys = self.y_min + s * (self.y_max - self.y_min)
        bx = np.concatenate([xs, xs, np.full(n, self.x_min), np.full(n, self.x_max)])
        by = np.concatenate([np.full(n, self.y_min), np.full(n, self.y_max), ys, ys])
        return bx, by

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "y_min": self.y_min,
            "y_max": self.y_max,
        }


JetFunction = Callable[[np.ndarray, np.ndarray], Jet2]


@dataclass(frozen=True)
class AnalyticField:
    """A scalar field given by an exact, vectorised jet function.

    ``domain`` is optional; when omitted the field is defined on all of R^2.
    """

    jet_fn: JetFunction
    name: str = "analytic"
    domain: Domain2 | None = None

    def jet(self, x, y) -> Jet2:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.jet_fn(x, y)

    def __call__(self, x, y):
        return self.jet(x, y).f


def perturbed(f: AnalyticField, h: AnalyticField, t: float) -> AnalyticField:
    """The field f + t*h."""
    return AnalyticField(
        lambda x, y: f.jet(x, y) + h.jet(x, y).scaled(t),
        name=f"{f.name}+{t!r}*{h.name}",
        domain=f.domain,
    )


@dataclass(frozen=True, eq=False)
class GridField:
    """Samples of f on a uniform grid.

    ``values`` has shape ``(n_y, n_x)`` so that ``values.ravel()`` is row-major
    with x varying fastest.
    """

    domain: Domain2
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] < 3:
            raise ValueError(f"grid needs at least 3x3 nodes, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_x(self) -> int:
        return self.values.shape[1]

    @property
    def n_y(self) -> int:
        return self.values.shape[0]

    @property
    def h_x(self) -> float:
        return (self.domain.x_max - self.domain.x_min) / (self.n_x - 1)

    @property
    def h_y(self) -> float:
        return (self.domain.y_max - self.domain.y_min) / (self.n_y - 1)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.domain.x_min, self.domain.x_max, self.n_x)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.domain.y_min, self.domain.y_max, self.n_y)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs, self.ys)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.values.shape, dtype=bool)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
        return mask

    @classmethod
    def sample(cls, fn, domain: Domain2, n_x: int, n_y: int | None = None) -> "GridField":
        """Sample ``fn`` (a field or any vectorised callable) at the grid nodes."""
        n_y = n_x if n_y is None else n_y
        xs = np.linspace(domain.x_min, domain.x_max, n_x)
        ys = np.linspace(domain.y_min, domain.y_max, n_y)
        X, Y = np.meshgrid(xs, ys)
        return cls(domain, np.broadcast_to(fn(X, Y), X.shape))

    def jet(self, x, y) -> Jet2:
        return jet_at(self, x, y)

    def __call__(self, x, y):
        return self.jet(x, y).f

    def to_csv(self, path: str | Path) -> None:
        """Write ``x,y,f`` rows plus a JSON sidecar ``<path>.json``."""
        path = Path(path)
        X, Y = self.mesh()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "f"])
            for row in zip(X.ravel(), Y.ravel(), self.values.ravel()):
                w.writerow([format_real(v) for v in row])
        sidecar = {"domain": self.domain.to_dict(), "n_x": self.n_x, "n_y": self.n_y}
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "GridField":
        path = Path(path)
        meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        values = data[:, 2].reshape(meta["n_y"], meta["n_x"])
        return cls(Domain2(**meta["domain"]), values)


def format_real(v: float) -> str:
    """17 significant digits, round-trip exact for doubles."""
    return f"{float(v):.16e}"


def fd_jet(g: GridField, i: int, j: int) -> Jet2:
    """Central-difference jet at interior node ``(i, j)`` (i along x, j along y)."""
    if not (1 <= i <= g.n_x - 2 and 1 <= j <= g.n_y - 2):
        raise IndexError(f"node ({i}, {j}) is not interior to a {g.n_x}x{g.n_y} grid")
    block = g.values[j - 1 : j + 2, i - 1 : i + 2]
    return Jet2(*(float(c[0, 0]) for c in fd_jets(block, g.h_x, g.h_y)))


def fd_jets(g: GridField | np.ndarray, h_x: float | None = None, h_y: float | None = None) -> Jet2:
    """Central-difference jets at all interior nodes, each of shape (n_y-2, n_x-2).

    Accepts a raw value array when ``h_x`` and ``h_y`` are given (used by the
    solver on trial iterates).
    """
    if isinstance(g, GridField):
        v, h_x, h_y = g.values, g.h_x, g.h_y
    else:
        v = g
    c = v[1:-1, 1:-1]
    e, w_ = v[1:-1, 2:], v[1:-1, :-2]
    n, s = v[2:, 1:-1], v[:-2, 1:-1]
    fx = (e - w_) / (2.0 * h_x)
    fy = (n - s) / (2.0 * h_y)
    fxx = (e - 2.0 * c + w_) / h_x**2
    fyy = (n - 2.0 * c + s) / h_y**2
    fxy = (v[2:, 2:] - v[:-2, 2:] - v[2:, :-2] + v[:-2, :-2]) / (4.0 * h_x * h_y)
    return Jet2(c, fx, fy, fxx, fxy, fyy)


def nearest_node(g: GridField, x: float, y: float) -> tuple[int, int]:
    i = int(round((x - g.domain.x_min) / g.h_x))
    j = int(round((y - g.domain.y_min) / g.h_y))
    return i, j


ScalarField = Union[AnalyticField, GridField]


def jet_at(fld: ScalarField, x, y) -> Jet2:
    """Jet of ``fld`` at (x, y).

    Grid fields use the nearest node without interpolation; that node must be
    interior.
    """
    if isinstance(fld, GridField):
        if np.ndim(x) or np.ndim(y):
            raise TypeError("grid jets are evaluated one point at a time")
        if not fld.domain.contains(x, y):
            raise DomainError(f"({x}, {y}) outside {fld.domain}")
        i, j = nearest_node(fld, x, y)
        return fd_jet(fld, i, j)
    if fld.domain is not None and not np.all(fld.domain.contains(np.asarray(x), np.asarray(y))):
        raise DomainError(f"point(s) outside {fld.domain}")
    return fld.jet(x, y)


def polynomial2(c0=0.0, cx=0.0, cy=0.0, cxx=0.0, cxy=0.0, cyy=0.0, name="poly2") -> AnalyticField:
    """f = c0 + cx x + cy y + cxx x^2 + cxy x y + cyy y^2."""

    def jet(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        f = c0 + cx * x + cy * y + cxx * x * x + cxy * x * y + cyy * y * y
        return Jet2(
            f * one,
            (cx + 2 * cxx * x + cxy * y) * one,
            (cy + cxy * x + 2 * cyy * y) * one,
            2 * cxx * one,
            cxy * one,
            2 * cyy * one,
        )

    return AnalyticField(jet, name=name)
