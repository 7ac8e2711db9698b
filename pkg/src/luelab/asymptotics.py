"""Bulk, soft-edge, and hard-edge asymptotics for the scaled Laguerre functions.

All three regimes approximate psi_{nt}(n x) where nt = n - ntilde_shift for a
small fixed shift, in terms of the ratio t = n x / (4 nt + 2 alpha + 2): a
trigonometric density in the bulk, an Airy form at the soft edge (x near 4),
and a Bessel form at the hard edge (x near 0).  The change-of-variable maps
zeta, eta, gamma are exposed on their own since the tail-truncation logic and
the tests use them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun

__all__ = [
    "zeta",
    "zeta_over_one_minus_t",
    "eta",
    "gamma_decay",
    "gamma_decay_prime",
    "bulk_approx_density",
    "soft_edge_approx",
    "soft_edge_error_scale",
    "hard_edge_approx",
    "AsymptoticReport",
    "asymptotic_report",
]

# Below this distance from t = 1 the bracket arccos(sqrt t) - sqrt(t - t^2)
# (and its t > 1 mirror) is evaluated by series: the direct form cancels.
_BRANCH_EPS = 1e-4


def _bracket_series(s: np.ndarray, sign: float) -> np.ndarray:
    # int_0^s sqrt(u)/sqrt(1 -+ u) du = (2/3) s^(3/2) (1 +- 3s/10 + 9s^2/56 ...)
    return (2.0 / 3.0) * s ** 1.5 * (1.0 + sign * 0.3 * s + (9.0 / 56.0) * s * s)


def zeta(t) -> np.ndarray | float:
    """Soft-edge map: positive for t < 1, zero at 1, negative beyond."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("zeta needs t > 0")
    out = np.empty_like(ts)
    lo = ts <= 1.0 - _BRANCH_EPS
    hi = ts >= 1.0 + _BRANCH_EPS
    mid = ~(lo | hi)
    out[lo] = (0.75 * (np.arccos(np.sqrt(ts[lo])) - np.sqrt(ts[lo] - ts[lo] ** 2))) ** (2.0 / 3.0)
    th = ts[hi]
    out[hi] = -(0.75 * (np.sqrt(th * th - th) - np.arccosh(np.sqrt(th)))) ** (2.0 / 3.0)
    s = 1.0 - ts[mid]
    out[mid] = np.sign(s) * (0.75 * _bracket_series(np.abs(s), np.sign(s))) ** (2.0 / 3.0)
    return float(out[0]) if np.isscalar(t) else out


def zeta_over_one_minus_t(t) -> np.ndarray | float:
    """zeta(t)/(1 - t), continued through the branch point (value 2**(-2/3) at 1)."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    z = np.atleast_1d(zeta(ts))
    out = np.empty_like(ts)
    mid = np.abs(ts - 1.0) < _BRANCH_EPS
    out[~mid] = z[~mid] / (1.0 - ts[~mid])
    s = 1.0 - ts[mid]
    out[mid] = 2.0 ** (-2.0 / 3.0) * (1.0 + np.sign(s) * 0.3 * np.abs(s) + (9.0 / 56.0) * s * s) ** (2.0 / 3.0)
    return float(out[0]) if np.isscalar(t) else out


def eta(t) -> np.ndarray | float:
    """Hard-edge map (1/2)sqrt(t - t^2) + (1/2)arcsin(sqrt t) on [0, 1]."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any((ts < 0) | (ts > 1)):
        raise ValueError("eta needs 0 <= t <= 1")
    out = 0.5 * np.sqrt(ts - ts * ts) + 0.5 * np.arcsin(np.sqrt(ts))
    return float(out[0]) if np.isscalar(t) else out


def gamma_decay(t) -> np.ndarray | float:
    """Beyond-edge decay rate (1/2)[sqrt(t^2 - t) - arccosh(sqrt t)] for t >= 1."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 1):
        raise ValueError("gamma_decay needs t >= 1")
    out = np.empty_like(ts)
    near = ts < 1.0 + _BRANCH_EPS
    s = ts[near] - 1.0
    out[near] = 0.5 * _bracket_series(s, -1.0)
    tf = ts[~near]
    out[~near] = 0.5 * (np.sqrt(tf * tf - tf) - np.arccosh(np.sqrt(tf)))
    return float(out[0]) if np.isscalar(t) else out


def gamma_decay_prime(t) -> np.ndarray | float:
    """d/dt gamma_decay = (1/2) sqrt((t - 1)/t), increasing on t > 1."""
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 1):
        raise ValueError("gamma_decay_prime needs t >= 1")
    out = 0.5 * np.sqrt((ts - 1.0) / ts)
    return float(out) if np.isscalar(t) else out


def _nu(n: int, alpha: int, ntilde_shift: int) -> tuple[int, float]:
    nt = n - ntilde_shift
    if nt < 1:
        raise ValueError("ntilde_shift leaves no degree")
    return nt, float(4 * nt + 2 * alpha + 2)


def bulk_approx_density(n: int, alpha: int, x, ntilde_shift: int = 0) -> np.ndarray | float:
    """Leading oscillatory approximation to n * psi_nt(n x)^2 for x in [0.1, 3.9]."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xs < 0.1) | (xs > 3.9)):
        raise ValueError("bulk approximation is contracted for 0.1 <= x <= 3.9")
    nt, nu = _nu(n, alpha, ntilde_shift)
    ratio = n * xs / nu
    if np.any(ratio >= 1.0):
        raise ValueError("bulk window requires n*x < 4*nt + 2*alpha + 2")
    phi = np.arccos(np.sqrt(ratio))
    phase = (2 * nt + alpha + 1) * (np.sin(2 * phi) - 2 * phi) + 1.5 * math.pi
    out = (1.0 - np.cos(phase)) / (2.0 * math.pi * np.sqrt(xs) * np.sin(phi))
    return float(out[0]) if np.isscalar(x) else out


def soft_edge_approx(n: int, alpha: int, x, ntilde_shift: int = 0) -> np.ndarray | float:
    """Airy-form approximation to sqrt(n) * psi_nt(n x) for x >= 2, sign included."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 2):
        raise ValueError("soft-edge approximation is contracted for x >= 2")
    nt, nu = _nu(n, alpha, ntilde_shift)
    t = n * xs / nu
    z = np.atleast_1d(zeta(t))
    pref = (-1.0) ** nt * nu ** (1.0 / 6.0) * np.abs(zeta_over_one_minus_t(t)) ** 0.25 / xs ** 0.25
    out = pref * specfun.airy_ai(-(nu ** (2.0 / 3.0)) * z)
    return float(out[0]) if np.isscalar(x) else out


def soft_edge_error_scale(n: int, alpha: int, x, ntilde_shift: int = 0) -> np.ndarray | float:
    """The Airy-envelope error term of the soft-edge form, O(1/n) on bounded x."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    nt, nu = _nu(n, alpha, ntilde_shift)
    t = n * xs / nu
    z = np.atleast_1d(zeta(t))
    arg = -(nu ** (2.0 / 3.0)) * z
    env = np.where(z > 0, specfun.airy_modulus(np.minimum(arg, 0.0)),
                   specfun.airy_ai(np.maximum(arg, 0.0)))
    out = env / (n * xs)
    return float(out[0]) if np.isscalar(x) else out


def hard_edge_approx(n: int, alpha: int, x, ntilde_shift: int = 0) -> np.ndarray | float:
    """Bessel-form approximation to sqrt(n) * psi_nt(n x) for 0 < x <= 2."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xs <= 0) | (xs > 2)):
        raise ValueError("hard-edge approximation is contracted for 0 < x <= 2")
    nt, nu = _nu(n, alpha, ntilde_shift)
    t = n * xs / nu
    e = np.atleast_1d(eta(t))
    # prefactor carries 1/sqrt(2), not 1/2: fixed by the small-x Bessel limit
    # psi_n(u) -> J_alpha(2 sqrt(n u)) and confirmed against the recurrence
    pref = math.sqrt(nu) * np.sqrt(e) * (1.0 - t) ** -0.25 / (math.sqrt(2.0) * xs ** 0.25)
    out = pref * specfun.bessel_j(alpha, nu * e)
    return float(out[0]) if np.isscalar(x) else out


@dataclass
class AsymptoticReport:
    """Direct-vs-approximate comparison over a grid, one regime at a time.

    For the bulk the compared quantity is the density-like n psi^2; at the
    edges it is sqrt(n) psi itself.  max_rel_err is measured against the
    largest direct value on the grid so oscillation zeros do not blow it up.
    """

    regime: str
    n: int
    alpha: int
    grid: np.ndarray
    direct: np.ndarray = field(repr=False)
    approx: np.ndarray = field(repr=False)
    max_abs_err: float = 0.0
    max_rel_err: float = 0.0


def asymptotic_report(regime: str, n: int, alpha: int, grid,
                      ntilde_shift: int = 0) -> AsymptoticReport:
    """Evaluate one regime's approximation against the recurrence on a grid."""
    xs = np.asarray(grid, dtype=float)
    nt = n - ntilde_shift
    _, pm1, pn = specfun.psi_triple(nt, alpha, n * xs)
    if regime == "bulk":
        direct = n * pn**2
        approx = np.atleast_1d(bulk_approx_density(n, alpha, xs, ntilde_shift))
    elif regime == "soft":
        direct = math.sqrt(n) * pn
        approx = np.atleast_1d(soft_edge_approx(n, alpha, xs, ntilde_shift))
    elif regime == "hard":
        direct = math.sqrt(n) * pn
        approx = np.atleast_1d(hard_edge_approx(n, alpha, xs, ntilde_shift))
    else:
        raise ValueError(f"unknown regime {regime!r}")
    err = np.abs(direct - approx)
    scale = np.max(np.abs(direct))
    return AsymptoticReport(
        regime=regime, n=n, alpha=alpha, grid=xs, direct=direct, approx=approx,
        max_abs_err=float(np.max(err)), max_rel_err=float(np.max(err) / max(scale, 1e-300)),
    )
