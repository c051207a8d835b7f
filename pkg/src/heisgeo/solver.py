"""Newton solver for the Dirichlet problem of the minimal-graph equation.

On a uniform grid over a rectangle the residual at interior nodes is

    (1 + q^2) D_xx f - 2 p q D_xy f + (1 + p^2) D_yy f,
    p = D_x f + y/2,  q = D_y f - x/2,

with second-order central differences (the same stencils as
:func:`heisgeo.scalar_field.fd_jets`).  Newton steps use the exact Jacobian of
this discrete residual, assembled as a sparse 9-point operator and solved by
sparse LU; steps are damped by halving until the max-norm residual does not
increase.  The first iterate is the discrete harmonic extension of the trace.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .catalog import CatalogSurface
from .scalar_field import Domain2, GridField, fd_jets
from . import graph_geometry as gg

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class NonConvergenceError(SolverError):
    def __init__(self, message: str, residual: float, iterations: int, field: GridField | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.field = field


class SingularSystemError(SolverError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    max_newton_iters: int = 50
    residual_tol: float = 1e-10
    max_halvings: int = 20

    def __post_init__(self):
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be >= 1")
        if not (self.residual_tol > 0 and math.isfinite(self.residual_tol)):
            raise ValueError("residual_tol must be positive")
        if self.max_halvings < 0:
            raise ValueError("max_halvings must be >= 0")


Trace = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DirichletProblem:
    domain: Domain2
    boundary_trace: Trace
    n: int
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.n < 5 or self.n % 2 == 0:
            raise ValueError(f"grid node count must be odd and >= 5, got {self.n}")


@dataclass
class SolveResult:
    field: GridField
    iterations: int
    residual_history: list[float]

    @property
    def residual(self) -> float:
        return self.residual_history[-1]


def _grid(domain: Domain2, n: int):
    xs = np.linspace(domain.x_min, domain.x_max, n)
    ys = np.linspace(domain.y_min, domain.y_max, n)
    X, Y = np.meshgrid(xs, ys)
    return X, Y, xs[1] - xs[0], ys[1] - ys[0]


def _residual_parts(v: np.ndarray, X: np.ndarray, Y: np.ndarray, hx: float, hy: float):
    j = fd_jets(v, hx, hy)
    Xi, Yi = X[1:-1, 1:-1], Y[1:-1, 1:-1]
    p = j.fx + 0.5 * Yi
    q = j.fy - 0.5 * Xi
    r = (1.0 + q * q) * j.fxx - 2.0 * p * q * j.fxy + (1.0 + p * p) * j.fyy
    return r, j, p, q


def discrete_residual(g: GridField) -> GridField:
    """Residual at interior nodes; boundary nodes are set to zero."""
    X, Y = g.mesh()
    r, *_ = _residual_parts(g.values, X, Y, g.h_x, g.h_y)
    out = np.zeros_like(g.values)
    out[1:-1, 1:-1] = r
    return GridField(g.domain, out)


# 9-point stencil offsets (dj, di) and the weight each derivative puts on them
_OFFSETS = [(dj, di) for dj in (-1, 0, 1) for di in (-1, 0, 1)]


def _jacobian(v, X, Y, hx, hy):
    """Sparse d(residual)/d(interior values), plus index bookkeeping."""
    r, j, p, q = _residual_parts(v, X, Y, hx, hy)
    ny, nx = v.shape
    mi, mj = nx - 2, ny - 2
    # partial derivatives of the residual w.r.t. each finite-difference quantity
    c_x = 2.0 * p * j.fyy - 2.0 * q * j.fxy
    c_y = 2.0 * q * j.fxx - 2.0 * p * j.fxy
    c_xx = 1.0 + q * q
    c_xy = -2.0 * p * q
    c_yy = 1.0 + p * p

    weights = {}
    for dj, di in _OFFSETS:
        w = 0.0
        if dj == 0:
            w = w + c_x * (di / (2.0 * hx)) + c_xx * ((1.0 if di else -2.0) / hx**2)
        if di == 0:
            w = w + c_y * (dj / (2.0 * hy)) + c_yy * ((1.0 if dj else -2.0) / hy**2)
        if di and dj:
            w = w + c_xy * (di * dj / (4.0 * hx * hy))
        weights[(dj, di)] = np.broadcast_to(w, (mj, mi))

    row_j, row_i = np.meshgrid(np.arange(mj), np.arange(mi), indexing="ij")
    rows, cols, vals = [], [], []
    for (dj, di), w in weights.items():
        cj = row_j + dj
        ci = row_i + di
        ok = (cj >= 0) & (cj < mj) & (ci >= 0) & (ci < mi)
        rows.append((row_j * mi + row_i)[ok])
        cols.append((cj * mi + ci)[ok])
        vals.append(w[ok])
    J = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mi * mj, mi * mj),
    )
    return J, r


def _sparse_solve(A, b) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            x = spla.spsolve(A, b)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise SingularSystemError(f"singular linear system: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("linear solve produced non-finite values")
    return x


def _boundary_values(problem: DirichletProblem):
    X, Y, hx, hy = _grid(problem.domain, problem.n)
    v = np.zeros_like(X)
    mask = np.zeros(X.shape, dtype=bool)
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
    b = np.broadcast_to(np.asarray(problem.boundary_trace(X[mask], Y[mask]), dtype=float), X[mask].shape)
    if not np.all(np.isfinite(b)):
        raise ValueError("boundary trace must be finite on the sampled boundary")
    v[mask] = b
    return v, X, Y, hx, hy


def harmonic_extension(domain: Domain2, trace: Trace, n: int) -> GridField:
    """Solve the 5-point Laplacian with the given Dirichlet data."""
    v, X, Y, hx, hy = _boundary_values(DirichletProblem(domain, trace, n))
    return GridField(domain, _harmonic(v, hx, hy))


def _harmonic(v: np.ndarray, hx: float, hy: float) -> np.ndarray:
    ny, nx = v.shape
    mi, mj = nx - 2, ny - 2
    ax, ay = 1.0 / hx**2, 1.0 / hy**2
    Ix = sp.identity(mi, format="csc")
    Iy = sp.identity(mj, format="csc")
    Dx = sp.diags([ax, -2 * ax, ax], [-1, 0, 1], shape=(mi, mi))
    Dy = sp.diags([ay, -2 * ay, ay], [-1, 0, 1], shape=(mj, mj))
    A = (sp.kron(Iy, Dx) + sp.kron(Dy, Ix)).tocsc()
    rhs = np.zeros((mj, mi))
    rhs[:, 0] -= ax * v[1:-1, 0]
    rhs[:, -1] -= ax * v[1:-1, -1]
    rhs[0, :] -= ay * v[0, 1:-1]
    rhs[-1, :] -= ay * v[-1, 1:-1]
    out = v.copy()
    out[1:-1, 1:-1] = _sparse_solve(A, rhs.ravel()).reshape(mj, mi)
    return out


def solve(problem: DirichletProblem) -> SolveResult:
    cfg = problem.config
    v, X, Y, hx, hy = _boundary_values(problem)
    v = _harmonic(v, hx, hy)
    mi, mj = problem.n - 2, problem.n - 2

    r, *_ = _residual_parts(v, X, Y, hx, hy)
    norm = float(np.max(np.abs(r)))
    history = [norm]
    iters = 0
    while norm > cfg.residual_tol:
        if iters >= cfg.max_newton_iters:
            raise NonConvergenceError(
                f"no convergence in {iters} Newton iterations (residual {norm:.3e})",
                norm,
                iters,
                GridField(problem.domain, v),
            )
        J, r = _jacobian(v, X, Y, hx, hy)
        delta = _sparse_solve(J, -r.ravel()).reshape(mj, mi)
        lam = 1.0
        for _ in range(cfg.max_halvings + 1):
            trial = v.copy()
            trial[1:-1, 1:-1] += lam * delta
            rt, *_ = _residual_parts(trial, X, Y, hx, hy)
            trial_norm = float(np.max(np.abs(rt)))
            if trial_norm <= norm:
                break
            lam *= 0.5
        else:
            raise NonConvergenceError(
                f"line search stalled at residual {norm:.3e}", norm, iters, GridField(problem.domain, v)
            )
        v, norm = trial, trial_norm
        iters += 1
        history.append(norm)
        log.debug("newton %d: step %.3g residual %.3e", iters, lam, norm)
    return SolveResult(GridField(problem.domain, v), iters, history)


# ---------------------------------------------------------------------------
# convergence studies

EXACT_TOL = 1e-12


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    max_error: float
    observed_order: float | None
    residual: float
    prop53_max: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "max_error": self.max_error,
            "observed_order": self.observed_order,
            "residual": self.residual,
            "prop53_max": self.prop53_max,
        }


def hessian_det_max(g: GridField) -> float:
    """max over interior nodes of f_xx f_yy - f_xy^2 (finite differences)."""
    return float(np.max(gg.hessian_det(fd_jets(g))))


def convergence_study(
    surface: CatalogSurface,
    dom: Domain2,
    ns: Sequence[int],
    config: SolverConfig | None = None,
) -> list[ConvergenceRow]:
    """Solve with the surface's own trace on nested grids and compare to it.

    ``observed_order`` is log2 of successive error ratios; it is ``None`` for
    the coarsest grid and whenever either error is at rounding level.
    """
    ns = list(ns)
    for a, b in zip(ns, ns[1:]):
        if b != 2 * a - 1:
            raise ValueError(f"grids {a} -> {b} do not nest")
    fld = surface.field
    config = config or SolverConfig()
    rows: list[ConvergenceRow] = []
    prev_err = None
    for n in ns:
        res = solve(DirichletProblem(dom, fld, n, config))
        X, Y = res.field.mesh()
        err = float(np.max(np.abs(res.field.values - fld(X, Y))))
        order = None
        if prev_err is not None and prev_err > EXACT_TOL and err > EXACT_TOL:
            order = math.log2(prev_err / err)
        rows.append(
            ConvergenceRow(n, err, order, res.residual, hessian_det_max(res.field), res.iterations)
        )
        prev_err = err
    return rows
