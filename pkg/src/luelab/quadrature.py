"""Quadrature rules, 2-D tensor integration, principal values, tail truncation.

Every integral in the package routes through here.  Three conventions hold
throughout: sums that feed an acceptance tolerance use error-free summation
(math.fsum), 2-D grids that must avoid the diagonal use coprime point counts
so nodes never coincide, and integrands with inverse-square-root endpoint
behaviour are fed through the substitution x = c - c*cos(theta) which removes
the singularity analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .asymptotics import gamma_decay, gamma_decay_prime

__all__ = [
    "QuadratureRule",
    "TensorGrid2D",
    "gauss_legendre",
    "gauss_chebyshev_w",
    "theta_rule",
    "offset_tensor_grid",
    "quad",
    "integrate_2d",
    "principal_value",
    "pv_interval",
    "tail_cutoff",
    "fsum",
]

fsum = math.fsum


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights for a one-dimensional rule."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must have equal length")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")

    def __len__(self) -> int:
        return self.nodes.size


@dataclass(frozen=True)
class TensorGrid2D:
    """Tensor-product grid; offset point counts keep it off the diagonal."""

    rule_x: QuadratureRule
    rule_y: QuadratureRule
    diagonal_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.diagonal_offset > 0.0:
            gap = np.min(np.abs(self.rule_x.nodes[:, None] - self.rule_y.nodes[None, :]))
            scale = max(np.max(np.abs(self.rule_x.nodes)), np.max(np.abs(self.rule_y.nodes)), 1.0)
            if gap < self.diagonal_offset * np.finfo(float).eps * scale:
                raise ValueError("grid nodes collide with the diagonal")


def gauss_legendre(points: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule on [a, b], exact for degree <= 2*points - 1."""
    if not 1 <= points <= 10_000:
        raise ValueError("points must lie in [1, 1e4]")
    if not a < b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    x, w = np.polynomial.legendre.leggauss(points)
    nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w
    return QuadratureRule(nodes, weights, "gauss-legendre")


def gauss_chebyshev_w(points: int) -> QuadratureRule:
    """Rule for the weight 1/(pi sqrt(4 - x^2)) on [-2, 2]; weights are 1/points."""
    if points < 1:
        raise ValueError("points must be >= 1")
    k = np.arange(points, 0, -1)  # descending k gives increasing nodes
    nodes = 2.0 * np.cos((2 * k - 1) * math.pi / (2 * points))
    weights = np.full(points, 1.0 / points)
    return QuadratureRule(nodes, weights, "gauss-chebyshev-first-kind")


def theta_rule(points: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre in theta under x = a + (b-a)(1 - cos theta)/2.

    Clusters nodes quadratically at both endpoints, which absorbs 1/sqrt
    endpoint singularities and matches the sqrt-type phase of the Laguerre
    functions at the hard edge.
    """
    if not a < b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    base = gauss_legendre(points, 0.0, math.pi)
    half = 0.5 * (b - a)
    nodes = a + half * (1.0 - np.cos(base.nodes))
    weights = half * np.sin(base.nodes) * base.weights
    return QuadratureRule(nodes, weights, "theta-substituted")


def offset_tensor_grid(points: int, a: float, b: float, kind: str = "gauss-legendre",
                       diagonal_offset: float = 1.0) -> TensorGrid2D:
    """Square-domain tensor grid with coprime sizes (points, points + 1)."""
    maker = theta_rule if kind == "theta-substituted" else gauss_legendre
    return TensorGrid2D(maker(points, a, b), maker(points + 1, a, b), diagonal_offset)


def quad(rule: QuadratureRule, integrand: Callable) -> float:
    """Error-free-summed quadrature of a vectorizable integrand."""
    vals = _eval_grid(integrand, rule.nodes)
    return fsum((rule.weights * vals).tolist())


def _eval_grid(integrand: Callable, *coords: np.ndarray) -> np.ndarray:
    """Evaluate on arrays, falling back to scalar loops for plain functions."""
    try:
        vals = np.asarray(integrand(*coords), dtype=float)
        if vals.shape != coords[0].shape:
            raise TypeError
        return vals
    except (TypeError, ValueError):
        it = np.nditer(coords[0], flags=["multi_index"])
        out = np.empty_like(coords[0])
        for _ in it:
            idx = it.multi_index
            out[idx] = integrand(*(c[idx] for c in coords))
        return out


def integrate_2d(grid: TensorGrid2D, integrand: Callable) -> float:
    """sum_ij wx_i wy_j g(x_i, y_j), row-major with error-free summation."""
    X, Y = np.meshgrid(grid.rule_x.nodes, grid.rule_y.nodes, indexing="ij")
    vals = _eval_grid(integrand, X, Y)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"integrand non-finite at node pair (x={grid.rule_x.nodes[i]!r}, "
            f"y={grid.rule_y.nodes[j]!r})"
        )
    w2 = grid.rule_x.weights[:, None] * grid.rule_y.weights[None, :]
    return fsum((w2 * vals).ravel().tolist())


def principal_value(center: float, halfwidth: float, points: int,
                    integrand: Callable) -> float:
    """PV integral over [center-halfwidth, center+halfwidth] of a simple-pole integrand.

    Nodes come in symmetric pairs center +- u with u > 0, so the 1/(x-center)
    part cancels pairwise; converges for Holder-continuous numerators.
    """
    if halfwidth <= 0:
        raise ValueError("halfwidth must be positive")
    rule = gauss_legendre(points, 0.0, halfwidth)
    up = _eval_grid(integrand, center + rule.nodes)
    dn = _eval_grid(integrand, center - rule.nodes)
    vals = up + dn
    if not np.all(np.isfinite(vals)):
        k = int(np.argwhere(~np.isfinite(vals))[0])
        raise ValueError(f"pole-on-node: integrand non-finite at offset {rule.nodes[k]!r}")
    return fsum((rule.weights * vals).tolist())


def pv_interval(integrand: Callable, a: float, b: float, center: float,
                points: int) -> float:
    """PV integral over [a, b] with the pole at an interior point."""
    if not a < center < b:
        raise ValueError("pole must lie strictly inside the interval")
    h = min(center - a, b - center)
    total = principal_value(center, h, points, integrand)
    if center - a > h:
        total += quad(gauss_legendre(points, a, center - h), integrand)
    if b - center > h:
        total += quad(gauss_legendre(points, center + h, b), integrand)
    return total


def tail_cutoff(n: int, alpha: int, tol: float) -> float:
    """Smallest grid cutoff x_max > 4 with sum-tail mass below tol.

    Guarantees int_{x_max}^inf n psi_nt(n x)^2 dx < tol for nt in {n-2,..,n},
    using the beyond-edge bound n psi^2 <= exp(-2 nu gamma(t)) / sqrt(x(t-1))
    and the tangent-line lower bound on the (convex) decay map gamma.
    """
    if n < 10:
        raise ValueError("tail bound is contracted for n >= 10")
    return _cutoff_any_n(n, alpha, tol)


def _cutoff_any_n(n: int, alpha: int, tol: float) -> float:
    """tail_cutoff body without the small-n gate; valid for n >= 3."""
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    if n < 3:
        # psi_k, k < 3, decays like exp(-u/2) (times a polynomial): crude cutoff
        return (60.0 + 20.0 * alpha) / n
    nu_min = 4 * (n - 2) + 2 * alpha + 2
    nu_max = 4 * n + 2 * alpha + 2

    def log_tail(x0: float) -> float:
        t0 = n * x0 / nu_max  # smallest t over the nt range, conservative
        if t0 <= 1.0 + 1e-9:
            return math.inf
        g0 = gamma_decay(t0)
        slope = gamma_decay_prime(t0)
        depth = x0 * (t0 - 1.0)
        # int exp(-2 nu_min [g0 + slope*(t(x)-t0)]) dx / sqrt(depth)
        return (-2.0 * nu_min * g0 - 0.5 * math.log(depth)
                + math.log(nu_max / (2.0 * nu_min * slope * n)))

    lo = nu_max / n * (1.0 + 1e-3)
    hi = max(lo + 0.5, 8.0)
    while log_tail(hi) > math.log(tol):
        hi += 4.0
        if hi > 400.0:
            raise RuntimeError("tail bound failed to close; tol too small")
    if log_tail(lo) <= math.log(tol):
        return max(lo, 4.0 + 1.0 / n)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if log_tail(mid) > math.log(tol):
            lo = mid
        else:
            hi = mid
    return max(hi, 4.0 + 1.0 / n)
