"""Invariant battery run by ``heisgeo check``.

Each group returns a :class:`GroupResult`; failures are reported, never
raised.  Sample sizes are smaller than the test suite's so the battery stays
interactive.  Random points come from a Halton sequence seeded by
``HEISGEO_SEED`` (default 0).
"""
from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import qmc

from . import ambient as amb
from . import catalog as cat
from . import graph_geometry as gg
from . import ruled
from . import solver
from . import variational as var
from .scalar_field import Domain2, Jet2

FRAME = [amb.FrameVec3(*row) for row in np.eye(3)]


@dataclass
class GroupResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def seed_from_env() -> int:
    return int(os.environ.get("HEISGEO_SEED", "0"))


def sample_points(n: int, lo: float = -5.0, hi: float = 5.0, seed: int | None = None):
    seed = seed_from_env() if seed is None else seed
    pts = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    pts = qmc.scale(pts, [lo, lo], [hi, hi])
    return pts[:, 0], pts[:, 1]


def random_jets(n: int, bound: float = 10.0, seed: int | None = None):
    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    cols = rng.uniform(-bound, bound, size=(8, n))
    return Jet2(*cols[:6]), cols[6], cols[7]


def _connection() -> str:
    for i, j, k in itertools.product(range(3), repeat=3):
        Ei, Ej, Ek = FRAME[i], FRAME[j], FRAME[k]
        compat = amb.metric(amb.nabla(Ei, Ej), Ek) + amb.metric(Ej, amb.nabla(Ei, Ek))
        if compat != 0.0:
            raise AssertionError(f"metric compatibility fails at {(i, j, k)}")
        torsion = np.subtract(amb.nabla(Ei, Ej), amb.nabla(Ej, Ei)) - np.asarray(amb.bracket(Ei, Ej))
        if np.any(torsion != 0.0):
            raise AssertionError(f"torsion at {(i, j)}")
    k12 = amb.sectional(FRAME[0], FRAME[1])
    k13 = amb.sectional(FRAME[0], FRAME[2])
    k23 = amb.sectional(FRAME[1], FRAME[2])
    if abs(k12 + 0.75) > 1e-14 or abs(k13 - 0.25) > 1e-14 or abs(k23 - 0.25) > 1e-14:
        raise AssertionError(f"sectional curvatures {k12}, {k13}, {k23}")
    return "27 triples exact; K(E1,E2)=-3/4, K(Ei,E3)=1/4"


def _curvature_symmetries() -> str:
    for a, b, c, d in itertools.product(range(3), repeat=4):
        U, V, W, T = FRAME[a], FRAME[b], FRAME[c], FRAME[d]
        r1 = np.add(amb.curvature(U, V, W), amb.curvature(V, U, W))
        if np.max(np.abs(r1)) > 1e-15:
            raise AssertionError("R not antisymmetric")
        lhs = amb.metric(amb.curvature(U, V, W), T)
        rhs = amb.metric(amb.curvature(W, T, U), V)
        if abs(lhs - rhs) > 1e-15:
            raise AssertionError("pair symmetry fails")
    return "antisymmetry and pair symmetry on 81 index tuples"


def _catalog_minimality() -> str:
    x, y = sample_points(4096)
    worst = 0.0
    for s in cat.minimal_entries():
        worst = max(worst, float(np.max(np.abs(gg.minimal_residual(s.jet(x, y), x, y)))))
    if worst > 1e-9:
        raise AssertionError(f"max residual {worst:.3e}")
    return f"max |residual| {worst:.2e} over {len(cat.minimal_entries())} surfaces"


def _rank_classes() -> str:
    x, y = sample_points(4096)
    worst = 0.0
    for s in cat.minimal_entries():
        j = s.jet(x, y)
        if cat.catalog_expected(s).rank_class == 1:
            worst = max(worst, float(np.max(np.abs(gg.hessian_det(j) + 0.25))))
        else:
            rd = gg.rank_det(j, x, y)
            w = gg.slope(j, x, y).w
            if np.any(rd < 1.0 / (4.0 * np.max(w) ** 2)):
                raise AssertionError(f"{s.label}: rank_det below 1/(4 w_max^2)")
    if worst > 1e-12:
        raise AssertionError(f"rank-1 defect {worst:.3e}")
    return f"rank-1 defect {worst:.2e}; plane rank_det bounded away from 0"


def _gauss_equation() -> str:
    j, x, y = random_jets(4096)
    A = gg.weingarten(j, x, y)
    d = gg.surface_sectional(j, x, y) - (gg.ambient_sectional(j, x, y) + gg.det2(A))
    worst = float(np.max(np.abs(d)))
    z = Jet2(*([0.0] * 6))
    k0 = float(gg.surface_sectional(z, 0.0, 0.0))
    if worst > 1e-9 or abs(k0 + 0.75) > 1e-15:
        raise AssertionError(f"defect {worst:.3e}, K(0) = {k0}")
    return f"max defect {worst:.2e}; K = -3/4 for the zero jet"


def _operator_identity() -> str:
    x, y = sample_points(1000)
    worst = 0.0
    for s in cat.all_entries():
        j = s.jet(x, y)
        worst = max(worst, float(np.max(np.abs(gg.operator_identity_defect(j, x, y)))))
    if worst > 1e-9:
        raise AssertionError(f"max defect {worst:.3e}")
    return f"max |dLdgamma + A + alpha| {worst:.2e} (sign {gg.OPERATOR_SIGN:+g})"


def _trace_identities() -> str:
    x, y = sample_points(2048)
    jr, xr, yr = random_jets(2048)
    ta = float(np.max(np.abs(gg.trace2(gg.alpha_matrix(jr, xr, yr)))))
    if ta > 1e-14:
        raise AssertionError(f"trace alpha {ta:.3e}")
    worst = 0.0
    for s in cat.minimal_entries():
        j = s.jet(x, y)
        worst = max(worst, float(np.max(np.abs(gg.trace2(gg.gauss_jacobian(j, x, y))))))
    q = cat.non_minimal_quadratic().jet(0.0, 0.0)
    tq = float(gg.trace2(gg.gauss_jacobian(q, 0.0, 0.0)))
    if worst > 1e-9 or abs(tq + 4.0) > 1e-12:
        raise AssertionError(f"minimal trace {worst:.3e}, quadratic trace {tq}")
    return f"trace alpha {ta:.1e}; minimal trace {worst:.1e}; x^2+y^2 trace {tq:g}"


def _prop53() -> str:
    x, y = sample_points(4096)
    worst = max(float(np.max(gg.hessian_det(s.jet(x, y)))) for s in cat.minimal_entries())
    if worst > 1e-10:
        raise AssertionError(f"max f_xx f_yy - f_xy^2 = {worst:.3e}")
    return f"max f_xx f_yy - f_xy^2 = {worst:.2e}"


def _pointwise_identities() -> str:
    j, x, y = random_jets(4096)
    n = gg.unit_normal(j, x, y)
    e1 = float(np.max(np.abs(np.linalg.norm(n, axis=-1) - 1.0)))
    p, q, w = gg.slope(j, x, y)
    e2 = float(np.max(np.abs(gg.det2(gg.first_form(j, x, y)) - w * w) / (w * w)))
    e3 = float(np.max(np.abs(2 * gg.mean_curvature(j, x, y) * w**3 - gg.minimal_residual(j, x, y))))
    e4 = float(np.max(np.abs(gg.det2(gg.gauss_jacobian(j, x, y)) * w * w - gg.rank_det(j, x, y))))
    if e1 > 1e-14 or e2 > 1e-13 or e3 > 1e-9 or e4 > 1e-10:
        raise AssertionError(f"|n|-1 {e1:.1e}, EG-F^2 {e2:.1e}, 2Hw^3 {e3:.1e}, rank {e4:.1e}")
    return f"|n|=1 ({e1:.0e}), EG-F^2=w^2, 2Hw^3=residual ({e3:.0e}), det*w^2=rank_det ({e4:.0e})"


def _umbilicity() -> str:
    x, y = sample_points(4096)
    xs = np.linspace(-5.0, 5.0, 101)
    X, Y = np.meshgrid(xs, xs)
    worst_frac = 1.0
    for s in cat.all_entries():
        d = gg.umbilicity_defect(s.jet(x, y), x, y)
        worst_frac = min(worst_frac, float(np.mean(d > 1e-6)))
        # grid lines lying on the documented umbilic locus are excluded
        loc = cat.umbilic_locus(s)
        D = gg.umbilicity_defect(s.jet(X, Y), X, Y)
        rows = ~np.isin(xs, loc.y_lines)
        cols = ~np.isin(xs, loc.x_lines)
        if np.any(D.max(axis=1)[rows] <= 1e-6) or np.any(D.max(axis=0)[cols] <= 1e-6):
            raise AssertionError(f"{s.label}: defect vanishes along a grid line off the umbilic locus")
    if worst_frac < 0.99:
        raise AssertionError(f"defect > 1e-6 at only {worst_frac:.2%}")
    return f"defect > 1e-6 at >= {worst_frac:.2%} of points on every surface"


def _ruled() -> str:
    rng = np.random.default_rng(seed_from_env())
    k, t = rng.uniform(-5, 5, (2, 100))
    b = rng.uniform(-5, 5, 100)
    H = [ruled.ruled_mean_curvature(ruled.DirectrixJet(ki * ti + bi, ki, 0.0), ti) for ki, ti, bi in zip(k, t, b)]
    if max(abs(h) for h in H) > 1e-14:
        raise AssertionError("affine directrix not minimal")
    ts = np.linspace(0, 2, 201)
    a, a1, a2 = ruled.closed_form_a_jet(2.0, 0.3, ts)
    ode = float(np.max(np.abs((1 + ts**2) * a2 - ts * a1)))
    tr = ruled.integrate_item6(0.0, 0.0, 0.0, 2.0, (0.0, 2.0), 1e-3)
    err = float(np.max(np.abs(tr.component("a") - ruled.closed_form_a(2.0, 0.0, tr.t))))
    r5 = ruled.integrate_item5(0.0, -1.0, (0.0, 5.0), 1e-3)
    e5 = float(np.max(np.abs(r5.component("R") + r5.t)))
    if ode > 1e-10 or err > 1e-6 or e5 > 1e-10:
        raise AssertionError(f"closed form {ode:.1e}, item6 {err:.1e}, item5 {e5:.1e}")
    return f"affine H=0; closed form ODE {ode:.0e}; item6 err {err:.0e}; item5 err {e5:.0e}"


def _solver() -> str:
    dom = Domain2(-1.0, 1.0, -1.0, 1.0)
    rows = solver.convergence_study(cat.saddle_type(1.0), dom, [17, 33, 65])
    ratios = [a.max_error / b.max_error for a, b in zip(rows, rows[1:])]
    if not all(3.0 <= r <= 5.0 for r in ratios):
        raise AssertionError(f"error ratios {ratios}")
    if max(r.residual for r in rows) > 1e-10 or max(r.prop53_max for r in rows) > 1e-8:
        raise AssertionError("residual or Hessian-sign check failed")
    return "saddle(1) error ratios " + ", ".join(f"{r:.2f}" for r in ratios)


def _variational() -> str:
    dom = Domain2(-1.0, 1.0, -1.0, 1.0)
    rng = np.random.default_rng(seed_from_env())
    worst1 = 0.0
    min2 = np.inf
    for s in (cat.saddle_type(1.0), cat.tilted_product(1.0)):
        for _ in range(5):
            h = var.random_bump(rng, dom)
            worst1 = max(worst1, abs(var.first_variation(s.field, h, dom)))
            min2 = min(min2, var.second_variation(s.field, h, dom))
    if worst1 > 1e-6 or not min2 > 0:
        raise AssertionError(f"first variation {worst1:.2e}, min second variation {min2:.2e}")
    return f"max |A'(0)| {worst1:.1e}; min A''(0) {min2:.2e} > 0"


GROUPS: list[tuple[str, Callable[[], str]]] = [
    ("connection", _connection),
    ("curvature symmetries", _curvature_symmetries),
    ("catalog minimality", _catalog_minimality),
    ("rank classes", _rank_classes),
    ("Gauss equation", _gauss_equation),
    ("Gauss-map operator identity", _operator_identity),
    ("trace alpha / trace Gauss map", _trace_identities),
    ("Hessian sign on minimal graphs", _prop53),
    ("pointwise identities", _pointwise_identities),
    ("umbilicity defect", _umbilicity),
    ("ruled surfaces and ODEs", _ruled),
    ("Dirichlet solver", _solver),
    ("area variations", _variational),
]


def run_battery() -> list[GroupResult]:
    results = []
    for name, fn in GROUPS:
        t0 = time.perf_counter()
        try:
            detail = fn()
            ok = True
        except Exception as exc:  # failures are reported, not raised
            detail = f"{type(exc).__name__}: {exc}"
            ok = False
        results.append(GroupResult(name, ok, detail, time.perf_counter() - t0))
    return results
