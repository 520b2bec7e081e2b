"""Bohr-Sommerfeld quadrature for single-well potentials.

The quantization rule int sqrt(mu - W(y)) dy = pi (2n - 1) over the classically
allowed region predicts the large-n eigenvalues of -4 d^2/dy^2 + W.  The action
integral is split at the well bottom and each monotone branch is computed with
the substitution mu - W = (T sin phi)^2, which removes the square-root turning
point singularity and leaves a smooth integrand for Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_legendre

from .groundstate import GroundState
from .painleve import ConvergenceError, PainleveSolution

_GL_NODES = 200
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PotentialProfile:
    """Single-well potential certified monotone on each side of its minimum."""

    evaluator: object
    derivative: object
    well_location: float
    well_value: float
    y_left: float
    y_right: float
    monotone_left: bool = True
    monotone_right: bool = True

    def __call__(self, y):
        return self.evaluator(y)

    def dW(self, y):
        if self.derivative is not None:
            return self.derivative(y)
        y = np.asarray(y, dtype=float)
        h = 1e-6 * (1.0 + np.abs(y))
        # keep the difference stencil inside the certified range
        lo = np.maximum(y - h, self.y_left)
        hi = np.minimum(y + h, self.y_right)
        return (self.evaluator(hi) - self.evaluator(lo)) / (hi - lo)


def _golden_min(f, a: float, b: float, tol: float = 1e-13):
    """Golden-section minimizer on [a, b] for the well-bottom refinement."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol * (1.0 + abs(a) + abs(b)):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def from_function(
    f,
    y_left: float,
    y_right: float,
    derivative=None,
    samples: int = 4001,
) -> PotentialProfile:
    """Certify a callable as single-well by scanning, then refine the bottom.

    Plateaus in the scan are tolerated (broken toward the well); any strict
    rise left of the minimum or fall right of it rejects the potential.
    """
    if not y_right > y_left:
        raise ValueError(f"empty certification range [{y_left}, {y_right}]")
    ys = np.linspace(y_left, y_right, samples)
    w = np.asarray(f(ys), dtype=float)
    i = int(np.argmin(w))
    if i == 0 or i == samples - 1:
        raise ValueError("potential has no interior minimum on the certified range")
    slack = 1e-12 * (float(np.max(np.abs(w))) + 1.0)
    if np.any(np.diff(w[: i + 1]) > slack):
        raise ValueError("potential rises left of its minimum: not single-well")
    if np.any(np.diff(w[i:]) < -slack):
        raise ValueError("potential falls right of its minimum: not single-well")
    loc, val = _golden_min(lambda t: float(f(t)), float(ys[i - 1]), float(ys[i + 1]))
    return PotentialProfile(
        evaluator=f,
        derivative=derivative,
        well_location=loc,
        well_value=val,
        y_left=float(y_left),
        y_right=float(y_right),
    )


def from_solution(sol: PainleveSolution) -> PotentialProfile:
    """Profile of W0 = 3 nu0^2 - y over the layer grid."""
    spline = CubicSpline(sol.grid.nodes, sol.w0)
    return from_function(spline, sol.grid.a, sol.grid.b, derivative=spline.derivative())


def simplified(y_left: float = -60.0, y_right: float = 30.0) -> PotentialProfile:
    """Piecewise-linear surrogate 2y for y >= 0, -y for y <= 0."""

    def w(y):
        y = np.asarray(y, dtype=float)
        out = np.where(y >= 0.0, 2.0 * y, -y)
        return out if out.ndim else float(out)

    def dw(y):
        y = np.asarray(y, dtype=float)
        out = np.where(y >= 0.0, 2.0, -1.0)
        return out if out.ndim else float(out)

    return PotentialProfile(w, dw, 0.0, 0.0, float(y_left), float(y_right))


def harmonic(y_left: float = -50.0, y_right: float = 50.0) -> PotentialProfile:
    """Harmonic surrogate W = y^2 with the closed-form action pi mu / 2."""

    def w(y):
        y = np.asarray(y, dtype=float)
        out = y * y
        return out if out.ndim else float(out)

    def dw(y):
        y = np.asarray(y, dtype=float)
        out = 2.0 * y
        return out if out.ndim else float(out)

    return PotentialProfile(w, dw, 0.0, 0.0, float(y_left), float(y_right))


def turning_points(W: PotentialProfile, mu: float):
    """Roots y_minus < y_plus of W(y) = mu, one per monotone branch."""
    if not mu > W.well_value:
        raise ValueError(f"mu = {mu:g} is not above the well bottom {W.well_value:g}")
    if float(W(W.y_left)) < mu:
        raise ValueError(f"mu = {mu:g} exceeds the certified range on the left")
    if float(W(W.y_right)) < mu:
        raise ValueError(f"mu = {mu:g} exceeds the certified range on the right")

    def bisect(a, b, decreasing):
        # W - mu changes sign once on the branch
        while b - a > 1e-12 * (1.0 + abs(a) + abs(b)):
            mid = 0.5 * (a + b)
            if (float(W(mid)) > mu) == decreasing:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    y_minus = bisect(W.y_left, W.well_location, decreasing=True)
    y_plus = bisect(W.well_location, W.y_right, decreasing=False)
    return y_minus, y_plus


def _branch_positions(W: PotentialProfile, targets, inner: float, outer: float):
    """Solve W(y) = target on one monotone branch, vectorized bisection.

    ``inner`` is the well-side end, ``outer`` the turning-point side; targets
    must lie between W(inner) and W(outer).
    """
    a = np.full(targets.size, inner)
    b = np.full(targets.size, outer)
    increasing = float(W(outer)) >= float(W(inner))
    for _ in range(80):
        mid = 0.5 * (a + b)
        wm = np.asarray(W(mid), dtype=float)
        toward_outer = (wm < targets) if increasing else (wm > targets)
        a = np.where(toward_outer, mid, a)
        b = np.where(toward_outer, b, mid)
    return 0.5 * (a + b)


def action(W: PotentialProfile, mu: float) -> float:
    """Classically allowed action int sqrt(mu - W) dy between the turning points.

    Split at the well bottom; on each branch substitute mu - W = (T sin phi)^2
    with T^2 = mu - W(bottom), giving the smooth integrand
    2 T^3 sin^2(phi) cos(phi) / |W'| on [0, pi/2].
    """
    y_minus, y_plus = turning_points(W, mu)
    xg, wg = roots_legendre(_GL_NODES)
    phi = 0.25 * math.pi * (xg + 1.0)
    weights = 0.25 * math.pi * wg
    sin_phi = np.sin(phi)
    base = float(W(W.well_location))
    t2 = mu - base
    if t2 <= 0.0:
        return 0.0
    targets = mu - t2 * sin_phi**2
    total = 0.0
    for outer in (y_minus, y_plus):
        y = _branch_positions(W, targets, W.well_location, outer)
        slope = np.abs(np.asarray(W.dW(y), dtype=float))
        f = 2.0 * t2**1.5 * sin_phi**2 * np.cos(phi) / slope
        total += float(weights @ f)
    return total


def bs_eigenvalue(W: PotentialProfile, n: int, action_tol: float = 1e-9) -> float:
    """Energy mu_n solving action(W, mu) = pi (2n - 1)."""
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    target = math.pi * (2 * n - 1)

    lo = W.well_value
    span = 1.0
    try:
        while action(W, W.well_value + span) < target:
            lo = W.well_value + span
            span *= 2.0
            if span > 1e6:
                raise ConvergenceError("Bohr-Sommerfeld bracket failure: action never reaches target")
    except ValueError as exc:
        raise ConvergenceError(f"Bohr-Sommerfeld bracket failure: {exc}") from exc
    hi = W.well_value + span

    # bisection with a secant candidate each step
    f_lo = (action(W, lo) if lo > W.well_value else 0.0) - target
    f_hi = action(W, hi) - target
    mu = 0.5 * (lo + hi)
    for _ in range(200):
        if f_hi != f_lo:
            mu = hi - f_hi * (hi - lo) / (f_hi - f_lo)
        if not lo < mu < hi:
            mu = 0.5 * (lo + hi)
        f_mu = action(W, mu) - target
        if abs(f_mu) <= action_tol:
            return mu
        if f_mu > 0.0:
            hi, f_hi = mu, f_mu
        else:
            lo, f_lo = mu, f_mu
    raise ConvergenceError(f"Bohr-Sommerfeld iteration stalled at level {n}")


def bs_rule_x(gs: GroundState, n: int):
    """Trap-coordinate rule int sqrt(lambda - V_eps) dx = eps pi (n - 1/2).

    Diagnostic only: solved on the half-line branch of the double well
    (turning points 0 < x_minus < 1 < x_plus).  Returns (lambda, lambda /
    eps^(2/3)); the scaled value stays O(1) but does not converge to mu_n.
    """
    if gs.dimension != 1:
        raise ValueError(f"trap-coordinate rule needs a d=1 profile, got d={gs.dimension}")
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    r = gs.grid.nodes
    v = 3.0 * gs.eta**2 - 1.0 + r * r
    spline = CubicSpline(r, v)
    profile = from_function(spline, gs.grid.a, gs.grid.b, derivative=spline.derivative())
    target = gs.eps * math.pi * (n - 0.5)

    lo, hi = profile.well_value, profile.well_value + 1.0
    try:
        while action(profile, hi) < target:
            lo, hi = hi, profile.well_value + 2.0 * (hi - profile.well_value)
    except ValueError as exc:
        raise ConvergenceError(f"trap-coordinate bracket failure: {exc}") from exc
    f_lo = (action(profile, lo) if lo > profile.well_value else 0.0) - target
    f_hi = action(profile, hi) - target
    lam = 0.5 * (lo + hi)
    for _ in range(200):
        if f_hi != f_lo:
            lam = hi - f_hi * (hi - lo) / (f_hi - f_lo)
        if not lo < lam < hi:
            lam = 0.5 * (lo + hi)
        f_mid = action(profile, lam) - target
        if abs(f_mid) <= 1e-12:
            break
        if f_mid > 0.0:
            hi, f_hi = lam, f_mid
        else:
            lo, f_lo = lam, f_mid
    return lam, lam / gs.eps ** (2.0 / 3.0)
