"""Chebyshev calculus on the shifted spectrum: coefficients, the H^1/2-type
seminorm, the halved-degree multiplier operator and its heat kernel, and the
constructive approximation that controls the limiting variance.

Conventions: P_n(x) = T_n(x/2) on [-2, 2].  An expansion stores (c0, a_1,
..., a_N) where c0 is the weighted mean (the constant term never enters any
seminorm or variance) and a_n for n >= 1 matches the cosine-transform
normalization a_n = (2/pi) int_0^pi f(2 cos t) cos(n t) dt.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import quadrature as quadr
from .functions import TestFunction

__all__ = [
    "ChebyshevExpansion",
    "p_n",
    "expand",
    "expand_shifted",
    "seminorm_h_half",
    "apply_k",
    "kt_kernel",
    "kt_kernel_series",
    "i_t",
    "i_t_zero_limit",
    "approximate_for_lue",
]


@dataclass(frozen=True)
class ChebyshevExpansion:
    """Coefficients (c0, a_1..a_N) of a function on the fixed domain [-2, 2]."""

    coeffs: tuple[float, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        out = np.polynomial.chebyshev.chebval(xs / 2.0, np.asarray(self.coeffs))
        return float(out) if np.isscalar(x) else out

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(list(self.coeffs)) + "\n")

    @classmethod
    def load_json(cls, path: str | Path) -> "ChebyshevExpansion":
        return cls(tuple(float(v) for v in json.loads(Path(path).read_text())))


def p_n(n: int, x) -> float:
    """P_n(x) = T_n(x/2) by the three-term recurrence; domain |x| <= 2."""
    xs = np.asarray(x, dtype=float)
    if np.any(np.abs(xs) > 2.0):
        raise ValueError("P_n is contracted for |x| <= 2")
    if n < 0:
        raise ValueError("degree must be nonnegative")
    h = xs / 2.0
    prev = np.ones_like(h)
    if n == 0:
        return float(prev) if np.isscalar(x) else prev
    cur = h.copy()
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * h * cur - prev
    return float(cur) if np.isscalar(x) else cur


def expand(f, order: int, nodes: int | None = None) -> ChebyshevExpansion:
    """Cosine-transform coefficients of f on [-2, 2] at >= 4*order angle nodes."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    m = nodes if nodes is not None else max(8 * order, 64)
    if m < 4 * order:
        raise ValueError("need at least 4*order transform nodes")
    theta = (np.arange(m) + 0.5) * math.pi / m
    vals = np.asarray(f(2.0 * np.cos(theta)), dtype=float)
    ns = np.arange(1, order + 1)
    a = (2.0 / m) * (np.cos(np.outer(ns, theta)) @ vals)
    c0 = float(np.mean(vals))
    return ChebyshevExpansion((c0, *map(float, a)))


def expand_shifted(f, order: int, nodes: int | None = None) -> ChebyshevExpansion:
    """Expansion of x -> f(x + 2), i.e. of a hard-edge-frame function recentered."""
    return expand(lambda u: f(u + 2.0), order, nodes)


def seminorm_h_half(e: ChebyshevExpansion) -> float:
    """sum_{n>=1} n a_n^2 (equals 4x the centered-frame limiting variance)."""
    a = np.asarray(e.coeffs[1:])
    return quadr.fsum((np.arange(1, a.size + 1) * a * a).tolist())


def apply_k(e: ChebyshevExpansion) -> ChebyshevExpansion:
    """The multiplier a_n -> (n/2) a_n (the singular-integral operator's action)."""
    a = np.asarray(e.coeffs[1:])
    return ChebyshevExpansion((0.0, *map(float, 0.5 * np.arange(1, a.size + 1) * a)))


def _kt_theta(t: float, theta, phi):
    q = math.exp(-0.5 * t)
    one = 1.0 + q * q
    return ((1.0 - q * q) / (one - 2.0 * np.cos(theta + phi) * q)
            + (1.0 - q * q) / (one - 2.0 * np.cos(theta - phi) * q))


def kt_kernel(t: float, x, y) -> float:
    """Closed-form heat kernel of the halved-degree multiplier semigroup."""
    if t <= 0:
        raise ValueError("kt_kernel needs t > 0")
    xs, ys = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any(np.abs(xs) >= 2) or np.any(np.abs(ys) >= 2):
        raise ValueError("kt_kernel is contracted for |x|, |y| < 2")
    out = _kt_theta(t, np.arccos(xs / 2.0), np.arccos(ys / 2.0))
    return float(out) if np.isscalar(x) and np.isscalar(y) else out


def kt_kernel_series(t: float, x: float, y: float, terms: int = 200) -> float:
    """Truncated eigen-series 2 + 4 sum e^{-tn/2} P_n(x) P_n(y) (test oracle)."""
    theta, phi = math.acos(x / 2.0), math.acos(y / 2.0)
    ns = np.arange(1, terms + 1)
    terms_v = np.exp(-0.5 * t * ns) * np.cos(ns * theta) * np.cos(ns * phi)
    return 2.0 + 4.0 * quadr.fsum(terms_v.tolist())


def i_t(f, t: float, points: int = 400) -> float:
    """(1/2) iint [K_t/t] (f(x)-f(y))^2 / (kappa2(x) kappa2(y)) dx dy."""
    if t <= 0:
        raise ValueError("i_t needs t > 0")
    rx = quadr.gauss_legendre(points, 0.0, math.pi)
    ry = quadr.gauss_legendre(points + 1, 0.0, math.pi)
    fx = np.asarray(f(2.0 * np.cos(rx.nodes)), dtype=float)
    fy = np.asarray(f(2.0 * np.cos(ry.nodes)), dtype=float)
    kt = _kt_theta(t, rx.nodes[:, None], ry.nodes[None, :])
    diff2 = (fx[:, None] - fy[None, :]) ** 2
    w2 = rx.weights[:, None] * ry.weights[None, :]
    vals = kt * diff2 / t
    return quadr.fsum((w2 * vals).ravel().tolist()) / (8.0 * math.pi**2)


def i_t_zero_limit(f, h: float = 0.2, points: int = 800) -> float:
    """Two-level Richardson extrapolation of i_t to t -> 0 (the supremum)."""
    i1, i2, i3 = (i_t(f, h, points), i_t(f, h / 2, points), i_t(f, h / 4, points))
    j1, j2 = 2.0 * i2 - i1, 2.0 * i3 - i2
    return (4.0 * j2 - j1) / 3.0


def approximate_for_lue(f, order: int, tail_eps: float,
                        nodes: int | None = None) -> TestFunction:
    """Degree-`order` shifted-Chebyshev approximant of f, extended past the
    soft edge by a C^1 cubic blend to a constant.

    The discarded coefficient tail controls the limiting-variance error:
    V_lue[f - result] = (1/4) sum_{n > order} n a_n^2.
    """
    if tail_eps <= 0:
        raise ValueError("tail_eps must be positive")
    # 8*order transform nodes leave aliasing bias comparable to the discarded
    # tail itself for kinked f; a 2048-node floor keeps the tail law clean
    m = nodes if nodes is not None else max(8 * order, 2048)
    e = expand_shifted(f, order, m)
    return TestFunction("cheb", tuple(e.coeffs), support_hint=(0.0, 4.0),
                        tail_eps=tail_eps)
