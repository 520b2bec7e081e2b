"""Spectra of the layer operator M0 and the trap linearization L+.

M0 = -4 d^2/dy^2 + W0(y) acts on the layer coordinate; its eigenvalues mu_n
are the eps^(2/3)-scaled limits of the trap linearization

    L+ = -eps^2 d^2/dx^2 + 3 eta^2 - 1 + x^2,

a double-well operator whose spectrum splits into even / odd sectors solved on
the half line with a Neumann / Dirichlet condition at the origin.  Eigenvalues
come from Sturm-count bisection refined by inverse iteration with a
Rayleigh-quotient update; the scaling study tabulates lambda / eps^(2/3)
against mu_n, and decay certificates bound |u_m(y)| by C_m exp(-|y|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._io import parallel_map, write_csv
from .corrections import CorrectionSet
from .grids import (
    SingularPivotError,
    TridiagonalOperator,
    first_difference,
    from_boundary_layer,
    make_operator,
    solve_tridiagonal,
    uniform_grid,
)
from .groundstate import GroundState, solve_ground_state
from .painleve import ConvergenceError, PainleveSolution

_BOUNDARY_TAGS = ("Neumann", "Dirichlet", "FullLine")
_POSITIVE_TAGS = ("M0", "LplusNeumann", "LplusDirichlet", "LplusFullLine")
_VECTOR_SEED = 20240917


@dataclass(frozen=True)
class SpectrumReport:
    """Smallest eigenvalues of one operator, optionally with eigenvectors.

    ``eigenvectors`` holds one column per eigenvalue, unit discrete l2 norm;
    ``nodes`` are the coordinates the unknowns live on; ``scaled`` is
    eigenvalues / eps^(2/3) when an eps is attached.
    """

    operator: str
    eigenvalues: np.ndarray
    eps: float | None = None
    scaled: np.ndarray | None = None
    eigenvectors: np.ndarray | None = None
    nodes: np.ndarray | None = None

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if np.any(np.diff(ev) <= 0.0):
            raise ValueError("eigenvalues must be strictly increasing (simple spectrum)")
        if self.operator in _POSITIVE_TAGS and ev[0] <= 0.0:
            raise ValueError(f"{self.operator} must be positive definite, got lambda_1 = {ev[0]:.3e}")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        for name in ("scaled", "eigenvectors", "nodes"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)


def assemble_M0(sol: PainleveSolution) -> TridiagonalOperator:
    """Dirichlet discretization of -4 d^2/dy^2 + W0 on the interior layer nodes."""
    h = sol.grid.require_uniform("M0 assembly")
    diag = 8.0 / h**2 + sol.w0[1:-1]
    off = np.full(diag.size - 1, -4.0 / h**2)
    return make_operator(off, diag, off)


def m0_nodes(sol: PainleveSolution) -> np.ndarray:
    """Coordinates of the M0 unknowns (interior nodes of the layer grid)."""
    return sol.grid.nodes[1:-1]


def assemble_Lplus(gs: GroundState, bc: str) -> TridiagonalOperator:
    """FD matrix for -eps^2 d^2/dx^2 + 3 eta^2 - 1 + x^2 with the requested condition.

    Neumann / Dirichlet at the origin select the even / odd sector of the full
    line; FullLine assembles on the mirrored interval as a cross-check.  The
    Neumann ghost row is symmetrized by scaling the origin unknown by sqrt(2),
    which leaves the spectrum unchanged and makes the even sector match the
    full-line assembly exactly.
    """
    if gs.dimension != 1:
        raise ValueError(f"L+ assembly needs a d=1 profile, got d={gs.dimension}")
    if bc not in _BOUNDARY_TAGS:
        raise ValueError(f"unknown boundary tag {bc!r}")
    h = gs.grid.require_uniform("L+ assembly")
    r = gs.grid.nodes
    v = 3.0 * gs.eta**2 - 1.0 + r * r
    c = gs.eps**2 / h**2
    if bc == "Neumann":
        diag = 2.0 * c + v[:-1]
        off = np.full(diag.size - 1, -c)
        off[0] = -math.sqrt(2.0) * c
    elif bc == "Dirichlet":
        diag = 2.0 * c + v[1:-1]
        off = np.full(diag.size - 1, -c)
    else:
        vfull = np.concatenate([v[-2:0:-1], v[:-1]])
        diag = 2.0 * c + vfull
        off = np.full(diag.size - 1, -c)
    return make_operator(off, diag, off)


def operator_nodes(gs: GroundState, bc: str) -> np.ndarray:
    """Coordinates matching the unknown ordering of assemble_Lplus."""
    if bc not in _BOUNDARY_TAGS:
        raise ValueError(f"unknown boundary tag {bc!r}")
    r = gs.grid.nodes
    if bc == "Neumann":
        return r[:-1].copy()
    if bc == "Dirichlet":
        return r[1:-1].copy()
    return np.concatenate([-r[-2:0:-1], r[:-1]])


def _sturm_count(diag, b2, shifts, pivmin):
    """Number of eigenvalues below each shift (negative-pivot count)."""
    q = diag[0] - shifts
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0.0).astype(np.int64)
    for i in range(1, diag.size):
        q = diag[i] - shifts - b2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0.0
    return count


def eig_smallest(
    op: TridiagonalOperator,
    k: int,
    want_vectors: bool = False,
    label: str = "generic",
    eps: float | None = None,
    nodes: np.ndarray | None = None,
    tol: float = 1e-10,
) -> SpectrumReport:
    """k smallest eigenvalues by Sturm bisection plus Rayleigh refinement.

    Bisection brackets each eigenvalue inside the Gershgorin interval to an
    absolute width of tol times the interval scale; inverse iteration from the
    bracket midpoint then supplies the eigenvector whose Rayleigh quotient is
    the reported eigenvalue.  Iterates are orthogonalized against previously
    converged vectors of near-degenerate clusters, so exponentially close
    double-well pairs are still resolved.
    """
    if not op.symmetric:
        raise ValueError("eig_smallest needs a symmetric operator")
    n = op.n
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} out of range for operator size {n}")
    diag = op.diag
    b2 = op.sub * op.sub
    rad = np.zeros(n)
    rad[:-1] += np.abs(op.sub)
    rad[1:] += np.abs(op.sub)
    lo0 = float(np.min(diag - rad))
    hi0 = float(np.max(diag + rad))
    scale = max(abs(lo0), abs(hi0))
    if scale == 0.0:
        raise ValueError("zero operator")
    gap_tol = tol * scale
    pivmin = np.finfo(float).tiny * max(float(b2.max()), 1.0)

    lo = np.full(k, lo0)
    hi = np.full(k, hi0)
    target = np.arange(1, k + 1)
    steps = max(int(math.ceil(math.log2(max((hi0 - lo0) / gap_tol, 2.0)))) + 2, 8)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        above = _sturm_count(diag, b2, mid, pivmin) >= target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if float(np.max(hi - lo)) <= gap_tol:
            break
    else:
        raise ConvergenceError("Sturm bisection failed to shrink its brackets")
    approx = 0.5 * (lo + hi)

    # refinement: inverse iteration + Rayleigh quotient
    spread = hi0 - lo0
    cluster_tol = 100.0 * gap_tol
    res_tol = 64.0 * np.finfo(float).eps * scale
    rng = np.random.default_rng(_VECTOR_SEED)
    evals = np.empty(k)
    vecs = np.empty((n, k))
    for j in range(k):
        mates = [jj for jj in range(j) if abs(approx[j] - evals[jj]) < cluster_tol]
        sigma = approx[j]
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        rq = approx[j]
        for _ in range(50):
            shifted = make_operator(op.sub, diag - sigma, op.sup)
            try:
                v = solve_tridiagonal(shifted, u)
            except SingularPivotError:
                sigma += 1e-8 * spread
                continue
            if not np.all(np.isfinite(v)):
                sigma += 1e-8 * spread
                continue
            for jj in mates:  # deflate the converged cluster mates
                v -= (vecs[:, jj] @ v) * vecs[:, jj]
            nv = np.linalg.norm(v)
            if nv == 0.0:
                sigma += 1e-8 * spread
                continue
            v /= nv
            tv = op.apply(v)
            rq = float(v @ tv)
            u = v
            if np.linalg.norm(tv - rq * v) <= res_tol:
                break
        else:
            raise ConvergenceError(f"inverse iteration stagnated for eigenvalue {j + 1}")
        if abs(rq - approx[j]) > max(100.0 * gap_tol, 1e-8 * scale):
            raise ConvergenceError(
                f"Rayleigh refinement drifted from its bracket for eigenvalue {j + 1}"
            )
        imax = int(np.argmax(np.abs(u)))
        if u[imax] < 0.0:
            u = -u
        evals[j] = rq
        vecs[:, j] = u

    return SpectrumReport(
        operator=label,
        eigenvalues=evals,
        eps=eps,
        scaled=None if eps is None else evals / eps ** (2.0 / 3.0),
        eigenvectors=vecs if want_vectors else None,
        nodes=None if nodes is None else np.asarray(nodes, dtype=float),
    )


@dataclass(frozen=True)
class ScalingTable:
    """Half-line eigenvalue pairs over an eps ladder against the M0 limits.

    Row order: eps descending, pair index n = 1..n_pairs within each eps.
    lambda_odd / lambda_even are the odd- / even-indexed full-line eigenvalues
    lambda_{2n-1} (Neumann sector) and lambda_{2n} (Dirichlet sector);
    pair_gap is the relative split (lambda_even - lambda_odd) / lambda_even.
    """

    eps: np.ndarray
    n: np.ndarray
    lambda_odd: np.ndarray
    lambda_even: np.ndarray
    scaled_odd: np.ndarray
    scaled_even: np.ndarray
    mu: np.ndarray
    pair_gap: np.ndarray

    def to_csv(self, path) -> None:
        write_csv(
            path,
            ["eps", "n", "lambda_odd", "lambda_even", "scaled_odd", "scaled_even", "mu_n", "pair_gap"],
            [
                self.eps,
                self.n,
                self.lambda_odd,
                self.lambda_even,
                self.scaled_odd,
                self.scaled_even,
                self.mu,
                self.pair_gap,
            ],
        )


def scaling_study(
    sol: PainleveSolution,
    cset: CorrectionSet,
    eps_list,
    n_pairs: int = 3,
    nodes_per_layer: int = 40,
    gs_tol: float = 1e-8,
    eig_tol: float = 1e-10,
) -> ScalingTable:
    """Tabulate lambda_{2n-1}, lambda_{2n} and their eps^(2/3) scalings vs mu_n.

    Ground states are seeded with the composite approximation; eps values are
    processed concurrently (worker cap TFP_THREADS) and assembled in
    descending eps order regardless of completion order.
    """
    if cset.dimension != 1:
        raise ValueError(f"scaling study needs d=1 corrections, got d={cset.dimension}")
    eps_arr = np.asarray(sorted(set(float(e) for e in eps_list), reverse=True))
    if eps_arr.size == 0:
        raise ValueError("empty eps list")
    mu = eig_smallest(assemble_M0(sol), n_pairs, label="M0", tol=eig_tol).eigenvalues

    def one(eps: float):
        gs = solve_ground_state(
            eps, 1, nodes_per_layer=nodes_per_layer, tol=gs_tol,
            painleve_sol=sol, correction_set=cset,
        )
        lam_n = eig_smallest(
            assemble_Lplus(gs, "Neumann"), n_pairs, label="LplusNeumann", eps=eps, tol=eig_tol
        ).eigenvalues
        lam_d = eig_smallest(
            assemble_Lplus(gs, "Dirichlet"), n_pairs, label="LplusDirichlet", eps=eps, tol=eig_tol
        ).eigenvalues
        return lam_n, lam_d

    results = parallel_map(one, eps_arr)
    rows_eps, rows_n = [], []
    l_odd, l_even, s_odd, s_even, mus, gaps = [], [], [], [], [], []
    for eps, (lam_n, lam_d) in zip(eps_arr, results):
        s = eps ** (2.0 / 3.0)
        for i in range(n_pairs):
            rows_eps.append(eps)
            rows_n.append(i + 1)
            l_odd.append(lam_n[i])
            l_even.append(lam_d[i])
            s_odd.append(lam_n[i] / s)
            s_even.append(lam_d[i] / s)
            mus.append(mu[i])
            gaps.append((lam_d[i] - lam_n[i]) / lam_d[i])
    return ScalingTable(
        eps=np.asarray(rows_eps),
        n=np.asarray(rows_n, dtype=float),
        lambda_odd=np.asarray(l_odd),
        lambda_even=np.asarray(l_even),
        scaled_odd=np.asarray(s_odd),
        scaled_even=np.asarray(s_even),
        mu=np.asarray(mus),
        pair_gap=np.asarray(gaps),
    )


@dataclass(frozen=True)
class DecayCertificate:
    """Smallest constants bounding an M0 eigenfunction by C exp(-|y|).

    c_bound is max |u_m| e^{|y|} over the grid; c_deriv is the analogous
    constant for the derivative envelope (|y|+1) e^{-|y|}; within_bound
    records c_bound <= the requested cap.
    """

    m: int
    c_bound: float
    c_deriv: float
    within_bound: bool


def decay_check(report: SpectrumReport, cap: float = 100.0):
    """Decay certificates for every eigenvector in an M0 report."""
    if report.operator != "M0":
        raise ValueError(f"decay certificates apply to M0 reports, got {report.operator!r}")
    if report.eigenvectors is None or report.nodes is None:
        raise ValueError("decay_check needs eigenvectors and their nodes")
    y = report.nodes
    grid = uniform_grid(y[0], y[-1], y.size)
    growth = np.exp(np.abs(y))
    deriv_growth = growth / (np.abs(y) + 1.0)
    certs = []
    for j in range(report.eigenvalues.size):
        u = report.eigenvectors[:, j]
        c = float(np.max(np.abs(u) * growth))
        du = first_difference(u, grid)
        cd = float(np.max(np.abs(du) * deriv_growth))
        certs.append(DecayCertificate(m=j + 1, c_bound=c, c_deriv=cd, within_bound=c <= cap))
    return tuple(certs)


def w_eps(gs: GroundState, y):
    """Scaled layer potential W_eps(y) = 3 nu_eps(y)^2 - y from a d=1 profile.

    nu_eps(y) = eps^(-1/3) eta(x(y)) with x(y) the inverse layer map; satisfies
    V_eps(x) = eps^(2/3) W_eps(y(x)) with V_eps = 3 eta^2 - 1 + x^2.
    """
    if gs.dimension != 1:
        raise ValueError(f"layer potential needs a d=1 profile, got d={gs.dimension}")
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x = from_boundary_layer(y, gs.eps)
    if np.any(x > gs.grid.b + 1e-12):
        raise ValueError(f"y = {y.min():.3f} maps to x = {x.max():.3f} outside the radial grid")
    eta = gs.interp(x)
    out = 3.0 * eta * eta / gs.eps ** (2.0 / 3.0) - y
    return float(out[0]) if scalar else out
