"""Grids, tridiagonal operators, and the trap-to-layer coordinate map."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack


class SingularPivotError(ValueError):
    """Raised when tridiagonal elimination hits an exactly singular pivot."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"singular pivot at elimination index {index}")


@dataclass(frozen=True)
class Grid1D:
    """One-dimensional grid, uniform or graded, with nodes in increasing order.

    ``spacing`` is the scalar step for uniform grids and the array of interval
    widths for graded ones.  Instances are immutable after construction.
    """

    nodes: np.ndarray
    kind: str
    spacing: object = field(default=None)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3:
            raise ValueError(f"need at least 3 nodes in one dimension, got shape {nodes.shape}")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("grid nodes must be strictly increasing")
        if self.kind not in ("uniform", "graded"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if self.kind == "uniform":
            object.__setattr__(self, "spacing", float(nodes[1] - nodes[0]))
        else:
            widths = np.diff(nodes)
            widths.setflags(write=False)
            object.__setattr__(self, "spacing", widths)

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    def require_uniform(self, what: str) -> float:
        if self.kind != "uniform":
            raise ValueError(f"{what} requires a uniform grid")
        return self.spacing


def uniform_grid(a: float, b: float, n: int) -> Grid1D:
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    return Grid1D(np.linspace(a, b, n), "uniform")


def graded_grid(a: float, b: float, n: int, focus: float = 0.0, strength: float = 2.0) -> Grid1D:
    """Grid clustered around ``focus`` by a sinh stretch of a uniform parameter.

    ``strength`` = 0 recovers the uniform grid; larger values concentrate more
    nodes near the focus.  Endpoints are preserved exactly.
    """
    if not a <= focus <= b:
        raise ValueError(f"focus {focus} outside [{a}, {b}]")
    if strength < 0.0:
        raise ValueError(f"strength must be nonnegative, got {strength}")
    t = np.linspace(-1.0, 1.0, n)
    if strength == 0.0:
        s = t
    else:
        # sinh warp: ds/dt is smallest at t=0, so nodes bunch at the focus
        s = np.sinh(strength * t) / np.sinh(strength)
    # map [-1, 0] onto [a, focus] and [0, 1] onto [focus, b]
    nodes = np.where(s < 0.0, focus + s * (focus - a), focus + s * (b - focus))
    nodes[0], nodes[-1] = a, b
    return Grid1D(nodes, "graded")


@dataclass(frozen=True)
class TridiagonalOperator:
    """Tridiagonal matrix stored by bands; ``symmetric`` records sub == super."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        sub = np.asarray(self.sub, dtype=float)
        diag = np.asarray(self.diag, dtype=float)
        sup = np.asarray(self.sup, dtype=float)
        n = diag.size
        if sub.size != n - 1 or sup.size != n - 1:
            raise ValueError(
                f"band lengths {sub.size}/{diag.size}/{sup.size} do not form a tridiagonal matrix"
            )
        for arr in (sub, diag, sup):
            arr.setflags(write=False)
        object.__setattr__(self, "sub", sub)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "sup", sup)

    @property
    def n(self) -> int:
        return self.diag.size

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"vector of shape {v.shape} does not match operator size {self.n}")
        out = self.diag * v
        out[:-1] += self.sup * v[1:]
        out[1:] += self.sub * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        a += np.diag(self.sub, -1)
        a += np.diag(self.sup, 1)
        return a


def make_operator(sub, diag, sup) -> TridiagonalOperator:
    sub = np.asarray(sub, dtype=float)
    sup = np.asarray(sup, dtype=float)
    symmetric = bool(sub.shape == sup.shape and np.array_equal(sub, sup))
    return TridiagonalOperator(sub, diag, sup, symmetric)


def solve_tridiagonal(op: TridiagonalOperator, rhs: np.ndarray) -> np.ndarray:
    """Solve op x = rhs by elimination with partial pivoting (LAPACK dgtsv)."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (op.n,):
        raise ValueError(f"rhs of shape {rhs.shape} does not match operator size {op.n}")
    _, _, _, x, info = lapack.dgtsv(op.sub.copy(), op.diag.copy(), op.sup.copy(), rhs)
    if info > 0:
        raise SingularPivotError(info - 1)
    if info < 0:
        raise ValueError(f"illegal dgtsv argument {-info}")
    return x


def _fd_weights(xs: np.ndarray, x0: float, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at ``x0``.

    Solves the small Vandermonde moment system; adequate for the short
    stencils used here.
    """
    m = xs.size
    A = np.vander(xs - x0, m, increasing=True).T
    b = np.zeros(m)
    fact = 1.0
    for k in range(2, order + 1):
        fact *= k
    b[order] = fact
    return np.linalg.solve(A, b)


def second_difference(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Discrete second derivative: 3-point interior, one-sided 4-point ends.

    Interior stencil is the standard nonuniform 3-point formula, exact on
    quadratics; endpoint stencils are one-sided second order (exact on cubics).
    """
    v = np.asarray(values, dtype=float)
    x = grid.nodes
    if v.shape != x.shape:
        raise ValueError(f"values shape {v.shape} does not match grid size {x.size}")
    out = np.empty_like(v)
    hl = x[1:-1] - x[:-2]
    hr = x[2:] - x[1:-1]
    out[1:-1] = 2.0 * (hl * v[2:] - (hl + hr) * v[1:-1] + hr * v[:-2]) / (hl * hr * (hl + hr))
    wl = _fd_weights(x[:4], x[0], 2)
    wr = _fd_weights(x[-4:], x[-1], 2)
    out[0] = wl @ v[:4]
    out[-1] = wr @ v[-4:]
    return out


def first_difference(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Discrete first derivative.

    Uniform grids get the 5-point fourth-order interior stencil; graded grids
    and the near-boundary nodes fall back to the centered / one-sided
    second-order formulas.
    """
    v = np.asarray(values, dtype=float)
    x = grid.nodes
    if v.shape != x.shape:
        raise ValueError(f"values shape {v.shape} does not match grid size {x.size}")
    out = np.empty_like(v)
    if grid.kind == "uniform" and x.size >= 5:
        h = grid.spacing
        out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
        out[1] = (v[2] - v[0]) / (2.0 * h)
        out[-2] = (v[-1] - v[-3]) / (2.0 * h)
    else:
        hl = x[1:-1] - x[:-2]
        hr = x[2:] - x[1:-1]
        out[1:-1] = (hl**2 * v[2:] - hr**2 * v[:-2] + (hr**2 - hl**2) * v[1:-1]) / (
            hl * hr * (hl + hr)
        )
    out[0] = _fd_weights(x[:3], x[0], 1) @ v[:3]
    out[-1] = _fd_weights(x[-3:], x[-1], 1) @ v[-3:]
    return out


def to_boundary_layer(x, eps: float):
    """Map trap coordinate x to the stretched layer coordinate y = (1 - x^2) / eps^(2/3)."""
    if not 0.0 < eps:
        raise ValueError(f"eps must be positive, got {eps}")
    x = np.asarray(x, dtype=float)
    y = (1.0 - x * x) / eps ** (2.0 / 3.0)
    return y if y.ndim else float(y)


def from_boundary_layer(y, eps: float):
    """Inverse layer map x = sqrt(1 - eps^(2/3) y) for y <= eps^(-2/3)."""
    if not 0.0 < eps:
        raise ValueError(f"eps must be positive, got {eps}")
    y = np.asarray(y, dtype=float)
    arg = 1.0 - eps ** (2.0 / 3.0) * y
    if np.any(arg < 0.0):
        bad = float(np.asarray(y).reshape(-1)[np.argmin(arg)])
        raise ValueError(f"y = {bad} exceeds eps^(-2/3) = {eps ** (-2.0 / 3.0)}")
    x = np.sqrt(arg)
    return x if x.ndim else float(x)
