import numpy as np
import pytest

from tfpainleve import (
    Grid1D,
    SingularPivotError,
    first_difference,
    graded_grid,
    make_operator,
    second_difference,
    solve_tridiagonal,
    uniform_grid,
)
from tfpainleve.grids import from_boundary_layer, to_boundary_layer


def test_uniform_grid_basics():
    g = uniform_grid(-1.0, 2.0, 7)
    assert g.n == 7
    assert g.a == -1.0 and g.b == 2.0
    assert g.require_uniform("test") == pytest.approx(0.5)
    np.testing.assert_allclose(np.diff(g.nodes), 0.5)


def test_uniform_grid_rejects_bad_bounds():
    with pytest.raises(ValueError):
        uniform_grid(1.0, 1.0, 5)
    with pytest.raises(ValueError):
        uniform_grid(0.0, 1.0, 1)


def test_graded_grid_monotone_with_endpoints():
    g = graded_grid(0.0, 2.5, 101, focus=1.0, strength=4.0)
    assert g.nodes[0] == pytest.approx(0.0)
    assert g.nodes[-1] == pytest.approx(2.5)
    assert np.all(np.diff(g.nodes) > 0.0)
    # spacing tightens near the focus
    h = np.diff(g.nodes)
    near = np.abs(g.nodes[:-1] - 1.0) < 0.2
    assert h[near].mean() < h[~near].mean()


def test_require_uniform_raises_on_graded():
    g = graded_grid(0.0, 1.0, 51, focus=0.5, strength=3.0)
    with pytest.raises(ValueError, match="uniform"):
        g.require_uniform("caller")


def test_tridiagonal_solve_matches_dense(rng):
    n = 60
    sub = rng.standard_normal(n - 1)
    sup = rng.standard_normal(n - 1)
    diag = rng.standard_normal(n) + 8.0  # diagonally dominant
    op = make_operator(sub, diag, sup)
    b = rng.standard_normal(n)
    x = solve_tridiagonal(op, b)
    np.testing.assert_allclose(op.dense() @ x, b, atol=1e-12)
    np.testing.assert_allclose(x, np.linalg.solve(op.dense(), b), atol=1e-11)


def test_tridiagonal_apply_matches_dense(rng):
    n = 17
    op = make_operator(rng.standard_normal(n - 1), rng.standard_normal(n), rng.standard_normal(n - 1))
    v = rng.standard_normal(n)
    np.testing.assert_allclose(op.apply(v), op.dense() @ v, atol=1e-13)


def test_singular_pivot_reported():
    op = make_operator(np.zeros(1), np.array([1.0, 0.0]), np.zeros(1))
    with pytest.raises(SingularPivotError):
        solve_tridiagonal(op, np.ones(2))


def test_symmetry_detection():
    off = np.array([1.0, 2.0])
    assert make_operator(off, np.zeros(3), off.copy()).symmetric
    assert not make_operator(off, np.zeros(3), off + 1e-6).symmetric


def test_second_difference_exact_on_quadratics():
    g = uniform_grid(-2.0, 3.0, 41)
    x = g.nodes
    d2 = second_difference(3.0 * x**2 - x + 2.0, g)
    np.testing.assert_allclose(d2, 6.0, atol=1e-10)


def test_second_difference_sine_accuracy():
    # h = 1e-2 resolves sin to the h^2/12 Taylor envelope
    g = uniform_grid(0.0, 1.0, 101)
    x = g.nodes
    d2 = second_difference(np.sin(x), g)
    assert np.max(np.abs(d2 + np.sin(x))) <= 1e-4


def test_second_difference_nonuniform():
    g = graded_grid(0.0, 1.0, 201, focus=0.5, strength=2.0)
    x = g.nodes
    d2 = second_difference(x**2, g)
    np.testing.assert_allclose(d2[1:-1], 2.0, atol=1e-8)


def test_first_difference_accuracy():
    g = uniform_grid(0.0, 1.0, 101)
    x = g.nodes
    d1 = first_difference(np.cos(x), g)
    err = np.abs(d1 + np.sin(x))
    assert np.max(err[2:-2]) <= 1e-9  # fourth-order interior
    assert np.max(err) <= 1e-4  # second-order edge closure


def test_boundary_layer_maps_roundtrip():
    eps = 0.05
    x = np.linspace(0.0, 1.4, 40)
    y = to_boundary_layer(x, eps)
    np.testing.assert_allclose(from_boundary_layer(y, eps), x, atol=1e-12)
    assert y[0] == pytest.approx(eps ** (-2.0 / 3.0))


def test_from_boundary_layer_rejects_center_overshoot():
    eps = 0.1
    with pytest.raises(ValueError):
        from_boundary_layer(np.array([1.01 * eps ** (-2.0 / 3.0)]), eps)
