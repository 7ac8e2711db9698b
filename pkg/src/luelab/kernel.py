"""Finite-n Christoffel-Darboux kernel and exact mean/variance of spectral sums.

Scaling convention: cd_kernel(x, y) is the two-term ratio

    sqrt(n(n+alpha)) [psi_{n-1}(nx) psi_n(ny) - psi_n(nx) psi_{n-1}(ny)] / (x - y)

so that Var(sum f(lambda_j)) = (1/2) iint (f(x)-f(y))^2 K^2 dx dy holds
verbatim; the diagonal (one-point density) then equals n * sum_{k<n}
psi_k(nx)^2 and integrates to n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature as quadr
from .functions import TestFunction
from .specfun import LaguerreIndex, psi_triple

__all__ = ["KernelContext", "VarianceReport", "TestFunction", "cd_kernel",
           "kernel_diagonal", "phi", "lss_mean", "lss_variance"]

_TAIL_TOL = 1e-12


@dataclass
class VarianceReport:
    """Finite-n variance/mean of a linear spectral statistic, plus context."""

    n: int
    alpha: int
    finite_n_variance: float
    mean: float
    quad_points: int
    truncation: float
    limiting_variance: float | None = None


@dataclass
class KernelContext:
    """Holds (n, alpha) plus write-once caches of scaled psi evaluations."""

    idx: LaguerreIndex
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def create(cls, n: int, alpha: int) -> "KernelContext":
        return cls(LaguerreIndex(n, alpha))

    @property
    def x_max(self) -> float:
        """Grid truncation point with psi tail mass below 1e-12."""
        if "x_max" not in self._cache:
            self._cache["x_max"] = quadr._cutoff_any_n(self.idx.n, self.idx.alpha,
                                                       _TAIL_TOL)
        return self._cache["x_max"]

    def psi_at(self, x: float) -> tuple[float, float, float]:
        """(psi_{n-2}, psi_{n-1}, psi_n) at the scaled argument n*x, memoized."""
        key = float(x)
        hit = self._cache.get(key)
        if hit is None:
            trip = psi_triple(self.idx.n, self.idx.alpha, np.array([self.idx.n * key]))
            hit = (float(trip[0][0]), float(trip[1][0]), float(trip[2][0]))
            self._cache[key] = hit
        return hit


def cd_kernel(ctx: KernelContext, x: float, y: float) -> float:
    """K_n(x, y) in scaled variables; use kernel_diagonal on the diagonal."""
    if x < 0 or y < 0:
        raise ValueError("kernel arguments must be nonnegative")
    if x == y:
        raise ValueError("diagonal point: use kernel_diagonal")
    n, a = ctx.idx.n, ctx.idx.alpha
    _, pm1x, pnx = ctx.psi_at(x)
    _, pm1y, pny = ctx.psi_at(y)
    return math.sqrt(n * (n + a)) * (pm1x * pny - pnx * pm1y) / (x - y)


def kernel_diagonal(ctx: KernelContext, x: float) -> float:
    """lim_{y->x} cd_kernel(x, y) = n * sum_{k<n} psi_k(nx)^2, for x > 0."""
    if x <= 0:
        raise ValueError("kernel diagonal needs x > 0")
    pm2, pm1, pn = ctx.psi_at(x)
    return _diagonal_from_triple(ctx.idx.n, ctx.idx.alpha, ctx.idx.n * x, pm2, pm1, pn)


def _diagonal_from_triple(n: int, a: int, u, pm2, pm1, pn):
    # Wronskian-like combination of the derivative recurrence, cancellation-free:
    # psi'_{n-1} psi_n - psi'_n psi_{n-1}
    #   = [sqrt(n(n+a)) psi_{n-1}^2 - psi_{n-1} psi_n
    #      - sqrt((n-1)(n-1+a)) psi_{n-2} psi_n] / u
    w = (math.sqrt(n * (n + a)) * pm1 * pm1 - pm1 * pn
         - math.sqrt((n - 1) * (n - 1 + a)) * pm2 * pn) / u
    return math.sqrt(n * (n + a)) * n * w


def phi(ctx: KernelContext, x: float, y: float) -> float:
    """The square-minus-cross product combination whose F-integral is the variance."""
    if x < 0 or y < 0:
        raise ValueError("phi arguments must be nonnegative")
    n, a = ctx.idx.n, ctx.idx.alpha
    _, pm1x, pnx = ctx.psi_at(x)
    _, pm1y, pny = ctx.psi_at(y)
    return n * (n + a) * (pm1x**2 * pny**2 - pnx * pm1x * pny * pm1y)


def _panel_edges(f: TestFunction | None, lo: float, hi: float) -> list[float]:
    edges = [lo, hi]
    if f is not None and hasattr(f, "breakpoints"):
        edges.extend(b for b in f.breakpoints if lo < b < hi)
    return sorted(set(edges))


def _panel_rules(f, lo: float, hi: float, points: int,
                 bump: int = 0) -> list[quadr.QuadratureRule]:
    """Theta-substituted panels split at the breakpoints of f.

    bump=1 builds the companion grid with one extra node per panel, so the
    two grids of a tensor product never share a node (coprime counts).
    """
    edges = _panel_edges(f if isinstance(f, TestFunction) else None, lo, hi)
    rules = []
    for a, b in zip(edges[:-1], edges[1:]):
        share = max(32, int(round(points * (b - a) / (hi - lo)))) + bump
        rules.append(quadr.theta_rule(share, a, b))
    return rules


def _mean_once(ctx: KernelContext, f, points: int) -> float:
    n, a = ctx.idx.n, ctx.idx.alpha
    pieces = []
    for rule in _panel_rules(f, 0.0, ctx.x_max, points):
        u = n * rule.nodes
        pm2, pm1, pn = psi_triple(n, a, u)
        dens = _diagonal_from_triple(n, a, u, pm2, pm1, pn)
        vals = np.asarray(f(rule.nodes), dtype=float)
        pieces.append(quadr.fsum((rule.weights * vals * dens).tolist()))
    return quadr.fsum(pieces)


def lss_mean(ctx: KernelContext, f, points: int | None = None, rtol: float = 1e-8) -> float:
    """E[sum f(lambda_j)] = int f * density over [0, x_max], refined to rtol."""
    p = points if points is not None else max(800, 4 * ctx.idx.n)
    val = _mean_once(ctx, f, p)
    for _ in range(4):
        p = int(p * 1.4)
        new = _mean_once(ctx, f, p)
        if abs(new - val) <= rtol * (1.0 + abs(new)):
            return new
        val = new
    raise RuntimeError("lss_mean did not reach the requested refinement agreement")


def _variance_once(ctx: KernelContext, f, points: int) -> float:
    n, a = ctx.idx.n, ctx.idx.alpha
    pref = n * (n + a)
    rules_x = _panel_rules(f, 0.0, ctx.x_max, points)
    rules_y = _panel_rules(f, 0.0, ctx.x_max, points, bump=1)
    pieces = []
    for rx in rules_x:
        ux = n * rx.nodes
        _, ax, bx = psi_triple(n, a, ux)
        fx = np.asarray(f(rx.nodes), dtype=float)
        for ry in rules_y:
            uy = n * ry.nodes
            _, ay, by = psi_triple(n, a, uy)
            fy = np.asarray(f(ry.nodes), dtype=float)
            num = ax[:, None] * by[None, :] - bx[:, None] * ay[None, :]
            dx = rx.nodes[:, None] - ry.nodes[None, :]
            dd = (fx[:, None] - fy[None, :]) / dx
            w2 = rx.weights[:, None] * ry.weights[None, :]
            pieces.append(quadr.fsum((w2 * (dd * num) ** 2).ravel().tolist()))
    return 0.5 * pref * quadr.fsum(pieces)


def lss_variance(ctx: KernelContext, f, points: int | None = None, rtol: float = 1e-7,
                 limiting: float | None = None) -> VarianceReport:
    """Var(sum f(lambda_j)) by the kernel double integral on offset grids."""
    if isinstance(f, TestFunction) and f.kind == "const":
        mean = f.params[0] * ctx.idx.n
        return VarianceReport(ctx.idx.n, ctx.idx.alpha, 0.0, mean, 0, ctx.x_max, limiting)
    p = points if points is not None else max(400, 3 * ctx.idx.n)
    val = _variance_once(ctx, f, p)
    for _ in range(4):
        p = int(p * 1.4)
        new = _variance_once(ctx, f, p)
        if abs(new - val) <= rtol * (1.0 + abs(new)):
            return VarianceReport(ctx.idx.n, ctx.idx.alpha, new, lss_mean(ctx, f),
                                  p, ctx.x_max, limiting)
        val = new
    raise RuntimeError("lss_variance did not reach the requested refinement agreement")
