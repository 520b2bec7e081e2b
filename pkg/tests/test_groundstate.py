import numpy as np
import pytest

import oracles
from tfpainleve import (
    ConvergenceError,
    build_corrections,
    composite_eta,
    default_grid,
    energy,
    energy_of,
    remainder_study,
    solve_ground_state,
    tail_minus,
    thomas_fermi,
    to_boundary_layer,
    uniform_grid,
)
from tfpainleve.corrections import composite_nu


def test_thomas_fermi_values():
    assert thomas_fermi(0.0) == 1.0
    assert thomas_fermi(1.0) == 0.0
    assert thomas_fermi(2.0) == 0.0
    assert thomas_fermi(0.6) == pytest.approx(0.8, abs=1e-15)
    np.testing.assert_allclose(thomas_fermi(np.array([0.0, 0.6])), [1.0, 0.8])


def test_thomas_fermi_energy_matches_symbolic_quadrature():
    exact = float(oracles.tf_energy_1d())
    assert exact == pytest.approx(-8.0 / 15.0, abs=1e-15)
    grid = uniform_grid(0.0, 2.5, 4001)
    measured = energy_of(0.0, 1, grid, thomas_fermi(grid.nodes))
    assert measured == pytest.approx(exact, abs=1e-12)


def test_ground_state_invariants(gs1_eps01):
    gs = gs1_eps01
    assert gs.residual_max <= gs.tol
    assert gs.continuation_path == (0.1,)
    assert np.all(gs.eta >= 0.0)
    assert float(gs.eta.max()) <= 1.0 + 1e-7
    # radially decreasing profile
    assert np.all(np.diff(gs.eta) <= 1e-12)
    assert gs.eta[-1] == 0.0


def test_ground_state_energy_ordering(sol, cset1):
    e_tf = -8.0 / 15.0
    e10 = energy(solve_ground_state(0.1, 1, painleve_sol=sol, correction_set=cset1))
    e05 = energy(solve_ground_state(0.05, 1, painleve_sol=sol, correction_set=cset1))
    assert e_tf < e05 < e10 < 0.0


def test_ground_state_stable_under_grid_halving(sol, cset1):
    g40 = solve_ground_state(0.1, 1, painleve_sol=sol, correction_set=cset1, nodes_per_layer=40)
    g80 = solve_ground_state(0.1, 1, painleve_sol=sol, correction_set=cset1, nodes_per_layer=80)
    diff = np.abs(g80.interp(g40.grid.nodes) - g40.eta).max()
    assert diff <= 2e-5


@pytest.mark.parametrize("eps", [0.1, 0.05, 0.025])
def test_exponential_envelope_beyond_the_bulk(sol, cset2, eps):
    # eta <= C eps^(1/3) exp((1 - r^2) / (4 eps^(2/3))) for r >= 1, with a
    # single moderate C; the ratio peaks near r = 1 where it approaches nu0(0)
    gs = solve_ground_state(eps, 2, painleve_sol=sol, correction_set=cset2)
    r = gs.grid.nodes
    mask = r >= 1.0
    envelope = eps ** (1.0 / 3.0) * np.exp((1.0 - r[mask] ** 2) / (4.0 * eps ** (2.0 / 3.0)))
    ratio = gs.eta[mask] / envelope
    assert 0.0 < ratio.max() <= 1.0


@pytest.mark.parametrize("eps", [0.1, 0.05, 0.025])
def test_bulk_depletion_bound(sol, cset2, eps):
    # 0 <= TF - eta <= C eps^(1/3) TF for r <= 1 - eps^(1/3)
    gs = solve_ground_state(eps, 2, painleve_sol=sol, correction_set=cset2)
    r = gs.grid.nodes
    mask = r <= 1.0 - eps ** (1.0 / 3.0)
    diff = thomas_fermi(r[mask]) - gs.eta[mask]
    assert diff.min() >= -1e-12
    assert np.max(diff / (eps ** (1.0 / 3.0) * thomas_fermi(r[mask]))) <= 0.2


def test_interior_convergence_rate(sol, cset2):
    # sup over [0, 0.8] of |eta - TF| shrinks at an empirical order near 2;
    # the coarsest pair is still pre-asymptotic, so the finest pair decides
    sups = []
    eps_list = (0.1, 0.05, 0.025)
    for eps in eps_list:
        gs = solve_ground_state(eps, 2, painleve_sol=sol, correction_set=cset2)
        mask = gs.grid.nodes <= 0.8
        sups.append(np.abs(gs.eta[mask] - thomas_fermi(gs.grid.nodes[mask])).max())
    assert sups[0] > sups[1] > sups[2]
    order = np.log(sups[1] / sups[2]) / np.log(2.0)
    assert order == pytest.approx(2.0, abs=0.3)


def test_composite_seed_beats_smoothed_guess_error(sol, cset1):
    order1 = build_corrections(sol, 1, order=1)
    gs = solve_ground_state(0.05, 1, painleve_sol=sol, correction_set=cset1,
                            nodes_per_layer=80, tol=1e-10)
    err2 = np.abs(gs.eta - composite_eta(sol, cset1, 0.05, gs.grid.nodes)).max()
    err1 = np.abs(gs.eta - composite_eta(sol, order1, 0.05, gs.grid.nodes)).max()
    assert err2 < err1


def test_composite_eta_pieces(sol, cset1):
    eps = 0.1
    r = np.array([0.9, 1.0, 1.5, 2.3])
    y = to_boundary_layer(r, eps)
    inside = y >= sol.grid.a
    vals = composite_eta(sol, cset1, eps, r)
    expect = np.where(
        inside,
        eps ** (1.0 / 3.0) * composite_nu(sol, cset1, eps, np.clip(y, sol.grid.a, None)),
        eps ** (1.0 / 3.0) * tail_minus(np.minimum(y, -1.0)),
    )
    np.testing.assert_allclose(vals, expect, rtol=1e-12, atol=1e-300)
    beyond = composite_eta(sol, cset1, eps, 2.42)
    assert beyond == pytest.approx(eps ** (1.0 / 3.0) * tail_minus(to_boundary_layer(2.42, eps)))


def test_composite_eta_rejects_coordinates_beyond_profile_grid(sol, cset1):
    with pytest.raises(ValueError, match="beyond the profile grid"):
        composite_eta(sol, cset1, 0.003, 0.0)


def test_solve_validation(sol, cset1):
    with pytest.raises(ValueError):
        solve_ground_state(0.0, 1)
    with pytest.raises(ValueError):
        solve_ground_state(0.6, 1)
    with pytest.raises(ValueError):
        solve_ground_state(0.1, 4)
    # grid must start at r = 0
    shifted = uniform_grid(0.1, 2.5, 3001)
    with pytest.raises(ValueError, match="start at r = 0"):
        solve_ground_state(0.1, 1, grid=shifted)
    # too-coarse grid for the layer width
    coarse = uniform_grid(0.0, 2.5, 201)
    with pytest.raises(ValueError, match="too coarse"):
        solve_ground_state(0.1, 1, grid=coarse)
    # domain must reach past the bulk
    short = uniform_grid(0.0, 1.5, 2001)
    with pytest.raises(ValueError, match="too small"):
        solve_ground_state(0.1, 1, grid=short)
    with pytest.raises(ValueError, match="guess shape"):
        solve_ground_state(0.1, 1, guess=np.zeros(7))


def test_default_grid_resolves_layer():
    grid = default_grid(0.1)
    assert grid.a == 0.0
    assert grid.spacing <= 0.1 ** (2.0 / 3.0) / 20.0


def test_failed_direct_solve_engages_continuation():
    # starved of iterations, the solve falls back to the eps ladder, whose
    # first rung sits at eps = 0.3 and fails with the same budget
    with pytest.raises(ConvergenceError, match="eps=0.3"):
        solve_ground_state(0.1, 1, max_iterations=1)


def test_explicit_guess_failure_does_not_continue(sol):
    grid = default_grid(0.1)
    bad = 0.5 * thomas_fermi(grid.nodes)
    with pytest.raises(ConvergenceError, match="eps=0.1"):
        solve_ground_state(0.1, 1, grid=grid, guess=bad, max_iterations=1)


def test_remainder_table_fields(sol, cset1):
    table = remainder_study(sol, cset1, (0.1, 0.05), 1)
    assert table.dimension == 1 and table.order == 2
    np.testing.assert_allclose(table.eps, [0.1, 0.05])
    assert np.isnan(table.pair_order[0])
    assert table.pair_order[1] == pytest.approx(table.fit_order, abs=1e-9)
    assert np.all(table.err > 0.0)
    assert table.err[1] < table.err[0]


def test_remainder_study_needs_two_eps(sol, cset1):
    with pytest.raises(ValueError):
        remainder_study(sol, cset1, (0.1,), 1)


def test_ground_state_csv(gs1_eps01, sol, cset1, tmp_path):
    path = tmp_path / "gs.csv"
    comp = composite_eta(sol, cset1, 0.1, gs1_eps01.grid.nodes)
    gs1_eps01.to_csv(path, composite=comp)
    header = path.read_text().splitlines()[0]
    assert header == "r,eta,composite,abs_diff"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_allclose(data[:, 3], np.abs(gs1_eps01.eta - comp), atol=1e-15)
