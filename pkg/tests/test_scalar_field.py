import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heisgeo import catalog as cat
from heisgeo.scalar_field import (
    AnalyticField,
    Domain2,
    DomainError,
    GridField,
    Jet2,
    fd_jet,
    fd_jets,
    jet_at,
    nearest_node,
    perturbed,
    polynomial2,
)

UNIT = Domain2(0.0, 1.0, 0.0, 1.0)


def test_jet_at_analytic_examples():
    zero = polynomial2()
    assert tuple(map(float, jet_at(zero, 3.0, 4.0))) == (0, 0, 0, 0, 0, 0)
    x0, y0 = 0.3, -1.7
    half_xy = polynomial2(cxy=0.5)
    assert tuple(map(float, jet_at(half_xy, x0, y0))) == pytest.approx(
        (x0 * y0 / 2, y0 / 2, x0 / 2, 0, 0.5, 0)
    )
    r2 = polynomial2(cxx=1.0, cyy=1.0)
    assert tuple(map(float, jet_at(r2, 1.0, 1.0))) == (2, 2, 2, 2, 0, 2)


def test_jet_at_rejects_points_outside_domain():
    f = AnalyticField(polynomial2().jet_fn, domain=UNIT)
    with pytest.raises(DomainError):
        jet_at(f, 2.0, 0.5)
    g = GridField.sample(polynomial2(cxx=1.0), UNIT, 9)
    with pytest.raises(DomainError):
        jet_at(g, -0.5, 0.5)


def test_domain_validation():
    with pytest.raises(ValueError):
        Domain2(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        Domain2(0.0, np.inf, 0.0, 1.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridField(UNIT, np.zeros((2, 5)))
    with pytest.raises(ValueError):
        GridField(UNIT, np.full((3, 3), np.nan))


def test_grid_layout_is_x_fastest():
    g = GridField.sample(lambda x, y: x + 10 * y, UNIT, 3, 4)
    assert g.n_x == 3 and g.n_y == 4
    flat = g.values.ravel()
    assert flat[:3] == pytest.approx([0.0, 0.5, 1.0])
    assert g.h_x == 0.5 and g.h_y == pytest.approx(1 / 3)


def test_grid_is_immutable():
    g = GridField.sample(lambda x, y: x, UNIT, 5)
    with pytest.raises(ValueError):
        g.values[1, 1] = 3.0


def test_fd_constant_is_exact():
    g = GridField(UNIT, np.full((7, 5), 2.5))
    assert tuple(fd_jet(g, 2, 3)) == (2.5, 0, 0, 0, 0, 0)


def test_fd_x_squared():
    g = GridField.sample(lambda x, y: x * x, Domain2(-1, 2, 0, 1), 13, 5)
    j = fd_jets(g)
    assert np.allclose(j.fxx, 2.0, atol=1e-12)


def test_fd_jet_rejects_boundary_nodes():
    g = GridField.sample(lambda x, y: x, UNIT, 5)
    for i, j in [(0, 2), (4, 2), (2, 0), (2, 4)]:
        with pytest.raises(IndexError):
            fd_jet(g, i, j)


coef = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=50)
@given(coef, coef, coef, coef, coef, coef)
def test_fd_exact_on_quadratics(c0, cx, cy, cxx, cxy, cyy):
    f = polynomial2(c0, cx, cy, cxx, cxy, cyy)
    dom = Domain2(-2.0, 1.0, -0.5, 2.5)
    g = GridField.sample(f, dom, 11, 9)
    X, Y = g.mesh()
    fd = fd_jets(g).as_array()
    exact = np.array([np.broadcast_to(c, X.shape)[1:-1, 1:-1] for c in f.jet(X, Y)])
    assert np.allclose(fd, exact, atol=1e-10)


def test_jet_at_grid_uses_nearest_interior_node():
    f = polynomial2(cxx=1.0, cxy=0.5)
    g = GridField.sample(f, UNIT, 11)
    i, j = nearest_node(g, 0.42, 0.58)
    assert (i, j) == (4, 6)
    jet = jet_at(g, 0.42, 0.58)
    exact = f.jet(0.4, 0.6)
    assert tuple(jet) == pytest.approx(tuple(map(float, exact)), abs=1e-12)
    with pytest.raises(IndexError):
        jet_at(g, 0.01, 0.5)


def _errors(surface, h, nodes_xy):
    """|fd - analytic| at physical points on a grid of spacing h over [-1/2, 1/2]^2."""
    n = int(round(1.0 / h)) + 1
    dom = Domain2(-0.5, 0.5, -0.5, 0.5)
    g = GridField.sample(surface.field, dom, n)
    out = []
    for x, y in nodes_xy:
        i, j = nearest_node(g, x, y)
        fd = np.array(fd_jet(g, i, j))
        ex = np.array([float(c) for c in surface.jet(x, y)])
        out.append(np.abs(fd - ex))
    return np.array(out)


@pytest.mark.parametrize(
    "surface",
    [cat.saddle_type(1.0), cat.rank1_family(-0.7), cat.non_minimal_quadratic(), cat.plane(1, 2, 3)],
    ids=lambda s: s.label,
)
def test_fd_second_order(surface):
    h = 2.0**-7
    pts = [(0.25, 0.125), (-0.25, 0.375), (0.0, -0.25)]
    e1 = _errors(surface, h, pts)
    e2 = _errors(surface, h / 2, pts)
    significant = e1 > 1e-9
    ratios = e1[significant] / e2[significant]
    assert np.all((ratios >= 3.0) & (ratios <= 5.0)), ratios
    # components below the significance threshold are exact up to rounding
    assert np.all(e1[~significant] < 1e-9) and np.all(e2[~significant] < 1e-8)


def test_saddle_fd_converges_at_h_2_minus_7():
    # only f_y and f_yy carry truncation error for the saddle
    e = _errors(cat.saddle_type(1.0), 2.0**-7, [(0.125, 0.25)])[0]
    assert np.all(e[[0, 1, 3, 4]] < 1e-10)
    assert 0 < e[2] < 1e-4 and 0 < e[5] < 1e-4


def test_perturbed_combines_jets():
    f = polynomial2(cx=1.0)
    h = polynomial2(cyy=1.0)
    j = perturbed(f, h, 0.5).jet(2.0, 3.0)
    assert tuple(map(float, j)) == pytest.approx((2.0 + 4.5, 1.0, 3.0, 0.0, 0.0, 1.0))


def test_csv_round_trip(tmp_path):
    g = GridField.sample(lambda x, y: np.sin(x) * np.exp(y) / 3.0, Domain2(-1, 2, 0, 1), 7, 5)
    path = tmp_path / "g.csv"
    g.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,f"
    assert len(lines) == 1 + 7 * 5
    meta = json.loads((tmp_path / "g.csv.json").read_text())
    assert meta == {"domain": {"x_min": -1, "x_max": 2, "y_min": 0, "y_max": 1}, "n_x": 7, "n_y": 5}
    back = GridField.from_csv(path)
    assert np.array_equal(back.values, g.values)
    assert back.domain == g.domain


def test_jet_arithmetic():
    a = Jet2(1, 2, 3, 4, 5, 6)
    assert tuple(a + a.scaled(2.0)) == (3, 6, 9, 12, 15, 18)
