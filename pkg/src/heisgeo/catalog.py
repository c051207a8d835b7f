"""Closed-form graphs with exact jets and their expected classification.

Entries (CLI id in brackets):

* ``plane(a, b, c)``            f = a x + b y + c                         [plane]
* ``hyperbolic_paraboloid``     f = x y / 2                               [hparab]
* ``saddle_type(k)``            f = x y / 2 + k [asinh y + y sqrt(1+y^2)]  [saddle]
* ``tilted_product(k)``         f = 2 k y - x y / 2                       [tilted]
* ``rank1_family(k)``           f = x y / 2 - (k/2) [y sqrt(1+y^2) + asinh y]  [rank1]
* ``non_minimal_quadratic``     f = x^2 + y^2                             [quad]

``saddle_type`` and ``rank1_family`` are the same family written with two
parameterisations: ``rank1_family(k) == saddle_type(-k / 2)`` (see
:func:`rank1_as_saddle`).  Both are kept so each printed form can be checked
on its own.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np

from .scalar_field import AnalyticField, Jet2


class Expected(NamedTuple):
    is_minimal: bool
    rank_class: int | None  # 1 or 2; None when not minimal
    is_ruled: bool


@dataclass(frozen=True)
class CatalogSurface:
    id: str
    params: dict[str, float] = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.id not in _BUILDERS:
            raise KeyError(f"unknown catalog surface {self.id!r}")
        defaults = _DEFAULTS[self.id]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"{self.id}: unknown parameters {sorted(unknown)}")
        merged = {**defaults, **{k: float(v) for k, v in self.params.items()}}
        if not all(np.isfinite(v) for v in merged.values()):
            raise ValueError(f"{self.id}: parameters must be finite")
        object.__setattr__(self, "params", merged)

    @property
    def field(self) -> AnalyticField:
        return AnalyticField(_BUILDERS[self.id](**self.params), name=self.label)

    @property
    def label(self) -> str:
        if not self.params:
            return self.id
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.id}({args})"

    def jet(self, x, y) -> Jet2:
        return catalog_jet(self, x, y)


def _plane(a: float, b: float, c: float):
    def jet(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        zero = 0.0 * one
        return Jet2((a * x + b * y + c) * one, a * one, b * one, zero, zero, zero)

    return jet


def _hyperbolic_paraboloid():
    def jet(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        zero = 0.0 * one
        return Jet2(0.5 * x * y * one, 0.5 * y * one, 0.5 * x * one, zero, 0.5 * one, zero)

    return jet


def _saddle(k: float):
    # asinh(y) == ln(y + sqrt(1+y^2)) without cancellation for y << 0
    def jet(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        s = np.sqrt(1.0 + y * y)
        f = 0.5 * x * y + k * (np.arcsinh(y) + y * s)
        return Jet2(
            f * one,
            0.5 * y * one,
            (0.5 * x + 2.0 * k * s) * one,
            0.0 * one,
            0.5 * one,
            (2.0 * k * y / s) * one,
        )

    return jet


def _tilted(k: float):
    def jet(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        zero = 0.0 * one
        return Jet2(
            (2.0 * k * y - 0.5 * x * y) * one,
            -0.5 * y * one,
            (2.0 * k - 0.5 * x) * one,
            zero,
            -0.5 * one,
            zero,
        )

    return jet


def _rank1(k: float):
    def jet(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        s = np.sqrt(1.0 + y * y)
        f = 0.5 * x * y - 0.5 * k * (y * s + np.arcsinh(y))
        return Jet2(
            f * one,
            0.5 * y * one,
            (0.5 * x - k * s) * one,
            0.0 * one,
            0.5 * one,
            (-k * y / s) * one,
        )

    return jet


def _quad():
    def jet(x, y):
        one = np.ones(np.broadcast(x, y).shape)
        return Jet2((x * x + y * y) * one, 2.0 * x * one, 2.0 * y * one, 2.0 * one, 0.0 * one, 2.0 * one)

    return jet


_BUILDERS = {
    "plane": _plane,
    "hyperbolic_paraboloid": _hyperbolic_paraboloid,
    "saddle_type": _saddle,
    "tilted_product": _tilted,
    "rank1_family": _rank1,
    "non_minimal_quadratic": _quad,
}

_DEFAULTS: dict[str, dict[str, float]] = {
    "plane": {"a": 0.0, "b": 0.0, "c": 0.0},
    "hyperbolic_paraboloid": {},
    "saddle_type": {"k": 1.0},
    "tilted_product": {"k": 1.0},
    "rank1_family": {"k": 1.0},
    "non_minimal_quadratic": {},
}

_EXPECTED = {
    "plane": Expected(True, 2, True),
    "hyperbolic_paraboloid": Expected(True, 1, True),
    "saddle_type": Expected(True, 1, True),
    "tilted_product": Expected(True, 1, True),
    "rank1_family": Expected(True, 1, True),
    "non_minimal_quadratic": Expected(False, None, False),
}

CLI_IDS = {
    "plane": "plane",
    "hparab": "hyperbolic_paraboloid",
    "saddle": "saddle_type",
    "tilted": "tilted_product",
    "rank1": "rank1_family",
    "quad": "non_minimal_quadratic",
}


def catalog_jet(s: CatalogSurface, x, y) -> Jet2:
    return s.field.jet(x, y)


def catalog_expected(s: CatalogSurface) -> Expected:
    return _EXPECTED[s.id]


def from_cli(name: str, params: dict[str, float] | None = None) -> CatalogSurface:
    try:
        sid = CLI_IDS[name]
    except KeyError:
        raise KeyError(f"unknown surface id {name!r}; choose from {sorted(CLI_IDS)}") from None
    return CatalogSurface(sid, dict(params or {}))


def rank1_as_saddle(k: float) -> CatalogSurface:
    """The ``saddle_type`` entry equal to ``rank1_family(k)``."""
    return CatalogSurface("saddle_type", {"k": -0.5 * k})


class UmbilicLocus(NamedTuple):
    """Where the umbilicity defect of a catalog surface vanishes exactly.

    ``x_lines`` and ``y_lines`` hold the constant coordinate of vertical and
    horizontal lines; ``points`` holds isolated umbilics.
    """

    x_lines: tuple[float, ...] = ()
    y_lines: tuple[float, ...] = ()
    points: tuple[tuple[float, float], ...] = ()

    def near(self, x, y, tol: float):
        """Mask of points within ``tol`` (max-norm) of the locus."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        m = np.zeros(x.shape, dtype=bool)
        for c in self.x_lines:
            m |= np.abs(x - c) <= tol
        for c in self.y_lines:
            m |= np.abs(y - c) <= tol
        for px, py in self.points:
            m |= (np.abs(x - px) <= tol) & (np.abs(y - py) <= tol)
        return m


def umbilic_locus(s: CatalogSurface) -> UmbilicLocus:
    """Closed-form umbilic set of each entry.

    On a minimal graph the shape operator is trace-free, so a point is
    umbilic exactly when the second form vanishes:

    * plane(a, b, c): p = a + y/2 and q = b - x/2 must both vanish, giving the
      single point (2b, -2a);
    * xy/2: p = y, q = 0, so only M = (1 - y^2)/(2w) survives: lines y = +-1;
    * tilted_product(k): p = 0, q = 2k - x, only M = (q^2 - 1)/(2w) survives:
      lines x = 2k -+ 1;
    * saddle_type and rank1_family with k != 0: L = 0 forces y = 0, where
      M = (1 + q^2)/(2w) > 0, so no umbilics (k = 0 is xy/2);
    * x^2 + y^2: the origin, where the shape operator is 2 Id (found by a
      dense search of [-5, 5]^2; no other umbilics there).
    """
    k = s.params.get("k", 0.0)
    if s.id == "plane":
        return UmbilicLocus(points=((2.0 * s.params["b"], -2.0 * s.params["a"]),))
    if s.id == "hyperbolic_paraboloid" or (s.id in ("saddle_type", "rank1_family") and k == 0.0):
        return UmbilicLocus(y_lines=(-1.0, 1.0))
    if s.id == "tilted_product":
        return UmbilicLocus(x_lines=(2.0 * k - 1.0, 2.0 * k + 1.0))
    if s.id == "non_minimal_quadratic":
        return UmbilicLocus(points=((0.0, 0.0),))
    return UmbilicLocus()


def plane(a=0.0, b=0.0, c=0.0) -> CatalogSurface:
    return CatalogSurface("plane", {"a": a, "b": b, "c": c})


def hyperbolic_paraboloid() -> CatalogSurface:
    return CatalogSurface("hyperbolic_paraboloid")


def saddle_type(k=1.0) -> CatalogSurface:
    return CatalogSurface("saddle_type", {"k": k})


def tilted_product(k=1.0) -> CatalogSurface:
    return CatalogSurface("tilted_product", {"k": k})


def rank1_family(k=1.0) -> CatalogSurface:
    return CatalogSurface("rank1_family", {"k": k})


def non_minimal_quadratic() -> CatalogSurface:
    return CatalogSurface("non_minimal_quadratic")


def minimal_entries() -> list[CatalogSurface]:
    """The minimal catalog members exercised by the invariant battery."""
    return [
        plane(1.0, 2.0, 3.0),
        hyperbolic_paraboloid(),
        saddle_type(-2.0),
        saddle_type(0.5),
        saddle_type(1.0),
        tilted_product(1.0),
        rank1_family(1.0),
    ]


def all_entries() -> list[CatalogSurface]:
    return minimal_entries() + [non_minimal_quadratic()]
