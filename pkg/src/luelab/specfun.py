"""Normalized Laguerre functions, their derivatives, and Airy/Bessel helpers.

The central object is the weighted, L2-normalized Laguerre function

    psi_n(x; alpha) = sqrt(n! / Gamma(n + alpha + 1)) * exp(-x/2) * x**(alpha/2)
                      * L_n^{(alpha)}(x),

evaluated by a forward three-term recurrence carried in mantissa/exponent
form so that the exponential under/overflow outside the oscillatory region
never poisons the recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

__all__ = [
    "LaguerreIndex",
    "ScaledReal",
    "eval_psi",
    "eval_psi_scaled",
    "eval_psi_sequence",
    "psi_table",
    "psi_triple",
    "psi_derivative",
    "airy_ai",
    "airy_bi",
    "airy_ai_prime",
    "airy_modulus",
    "bessel_j",
    "bessel_j_prime",
]

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class LaguerreIndex:
    """Degree/offset pair (n, alpha); the matrix dimension is m = n + alpha."""

    n: int
    alpha: int

    def __post_init__(self) -> None:
        if self.n < 0 or self.alpha < 0:
            raise ValueError(f"need n >= 0 and alpha >= 0, got {self}")

    @property
    def m(self) -> int:
        return self.n + self.alpha


@dataclass(frozen=True)
class ScaledReal:
    """A real carried as mantissa * 2**exponent with mantissa in [1/2, 2) or 0.

    Covers magnitudes far beyond double range (exp(+-1e6) and more), which the
    psi recurrence needs outside the oscillatory region.
    """

    mantissa: float
    exponent: int

    @classmethod
    def from_float(cls, value: float) -> "ScaledReal":
        if value == 0.0:
            return cls(0.0, 0)
        m, e = math.frexp(value)  # m in [0.5, 1)
        return cls(m, e)

    @classmethod
    def from_log(cls, log_abs: float, sign: float = 1.0) -> "ScaledReal":
        """Build from the natural log of |value| (log_abs may be far below -745)."""
        if sign == 0.0 or log_abs == -math.inf:
            return cls(0.0, 0)
        t = log_abs / _LOG2
        e = math.floor(t)
        return cls(math.copysign(2.0 ** (t - e), sign), e)

    @property
    def value(self) -> float:
        """Nearest double; underflows to 0 and overflows to inf gracefully."""
        if self.mantissa == 0.0:
            return 0.0
        if self.exponent < -1200:
            return math.copysign(0.0, self.mantissa)
        if self.exponent > 1100:
            return math.copysign(math.inf, self.mantissa)
        return math.ldexp(self.mantissa, self.exponent)

    @property
    def log_abs(self) -> float:
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent * _LOG2


def _validate(n: int, alpha: int, x) -> None:
    if n < 0 or alpha < 0:
        raise ValueError(f"need n >= 0 and alpha >= 0, got n={n}, alpha={alpha}")
    if np.any(np.asarray(x) < 0):
        raise ValueError("psi is only defined for x >= 0")


def _seed_scaled(alpha: int, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mantissa/exponent pairs for psi_0 and psi_1 at the points u >= 0."""
    m0 = np.zeros_like(u)
    e = np.zeros(u.shape, dtype=np.int64)
    pos = u > 0
    # log psi_0 = -u/2 + (alpha/2) log u - lgamma(alpha+1)/2, exact at u > 0
    with np.errstate(divide="ignore"):
        log0 = -0.5 * u[pos] + 0.5 * alpha * np.log(u[pos]) - 0.5 * math.lgamma(alpha + 1)
    t = log0 / _LOG2
    ef = np.floor(t)
    m0[pos] = np.exp2(t - ef)
    e[pos] = ef.astype(np.int64)
    # u == 0: psi_0 = 1 for alpha = 0 (Gamma(1) = 1), else 0 from the x^(alpha/2) factor
    if alpha == 0:
        m0[~pos] = 1.0
    # psi_1 = psi_0 * (1 + alpha - u) / sqrt(1 + alpha), same shared exponent
    m1 = m0 * (1.0 + alpha - u) / math.sqrt(1.0 + alpha)
    return m0, m1, e


def _renormalize(ma: np.ndarray, mb: np.ndarray, e: np.ndarray) -> None:
    """Rescale the pair (ma, mb) in place so max(|ma|,|mb|) sits in [1/2, 1)."""
    big = np.maximum(np.abs(ma), np.abs(mb))
    _, shift = np.frexp(big)  # big = frac * 2**shift, frac in [0.5, 1); frexp(0) -> (0, 0)
    scale = np.exp2(-shift.astype(float))
    ma *= scale
    mb *= scale
    e += shift.astype(np.int64)


def _to_float(m: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Collapse mantissa/exponent to doubles; out-of-range exponents saturate."""
    ecl = np.clip(e, -2000, 2000).astype(np.int32)
    with np.errstate(over="ignore", under="ignore"):
        return np.ldexp(m, ecl)


def _psi_scan(n_max: int, alpha: int, u: np.ndarray, keep_all: bool) -> np.ndarray:
    """Forward recurrence over k = 0..n_max at the (unscaled) arguments u.

    Returns the full (n_max+1, len(u)) table when keep_all, otherwise the last
    three rows (psi_{n-2}, psi_{n-1}, psi_n) so the kernel diagonal can form
    derivatives without the table.  Both paths run the identical step, so the
    table entries and the pair values agree bit for bit.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    m_prev, m_cur, e = _seed_scaled(alpha, u)
    _renormalize(m_prev, m_cur, e)
    if keep_all:
        out = np.empty((n_max + 1, u.size))
        out[0] = _to_float(m_prev, e)
        if n_max >= 1:
            out[1] = _to_float(m_cur, e)
    else:
        rows = [np.zeros(u.size), _to_float(m_prev, e), _to_float(m_cur, e)]
    for k in range(1, n_max):
        a = (2.0 * k + alpha + 1.0 - u) * m_cur - math.sqrt(k * (k + alpha)) * m_prev
        m_prev = m_cur
        m_cur = a / math.sqrt((k + 1.0) * (k + 1.0 + alpha))
        _renormalize(m_prev, m_cur, e)
        if keep_all:
            out[k + 1] = _to_float(m_cur, e)
        else:
            rows = [rows[1], rows[2], _to_float(m_cur, e)]
    if keep_all:
        return out[: n_max + 1]
    if n_max == 0:
        return np.vstack([np.zeros(u.size), np.zeros(u.size), _to_float(m_prev, e)])
    return np.vstack(rows)


def psi_table(n_max: int, alpha: int, x) -> np.ndarray:
    """Table psi_k(x) for k = 0..n_max, shape (n_max+1, len(x))."""
    _validate(n_max, alpha, x)
    return _psi_scan(n_max, alpha, x, keep_all=True)


def psi_triple(n: int, alpha: int, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(psi_{n-2}, psi_{n-1}, psi_n) at the points x, without storing the table."""
    _validate(n, alpha, x)
    if n < 2:
        t = _psi_scan(max(n, 1), alpha, x, keep_all=True)
        zero = np.zeros(t.shape[1])
        if n == 0:
            return zero, zero, t[0]
        return zero, t[0], t[1]
    rows = _psi_scan(n, alpha, x, keep_all=False)
    return rows[0], rows[1], rows[2]


def eval_psi_sequence(n_max: int, alpha: int, x: float) -> np.ndarray:
    """(psi_0(x), ..., psi_{n_max}(x)) from a single recurrence pass."""
    return psi_table(n_max, alpha, np.array([float(x)]))[:, 0].copy()


def eval_psi(n: int, alpha: int, x: float) -> float:
    """psi_n(x; alpha) as a double (0.0 once the true value underflows)."""
    return float(eval_psi_sequence(n, alpha, x)[n])


def eval_psi_scaled(n: int, alpha: int, x: float) -> ScaledReal:
    """psi_n(x; alpha) with its true binary exponent, however small the value."""
    _validate(n, alpha, x)
    u = np.array([float(x)])
    m_prev, m_cur, e = _seed_scaled(alpha, u)
    _renormalize(m_prev, m_cur, e)
    for k in range(1, n):
        a = (2.0 * k + alpha + 1.0 - u) * m_cur - math.sqrt(k * (k + alpha)) * m_prev
        m_prev = m_cur
        m_cur = a / math.sqrt((k + 1.0) * (k + 1.0 + alpha))
        _renormalize(m_prev, m_cur, e)
    m = m_prev if n == 0 else m_cur
    return ScaledReal(*_normalize_scalar(float(m[0]), int(e[0])))


def _normalize_scalar(m: float, e: int) -> tuple[float, int]:
    if m == 0.0:
        return 0.0, 0
    frac, sh = math.frexp(m)
    return frac, e + sh


def psi_derivative(n: int, alpha: int, x) -> np.ndarray | float:
    """d/dx psi_n(x; alpha) via the first-derivative recurrence; needs x > 0, n >= 1."""
    _validate(n, alpha, x)
    if n < 1:
        raise ValueError("derivative recurrence needs n >= 1")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs == 0):
        raise ValueError("derivative recurrence is singular at x = 0")
    _, pm1, pn = psi_triple(n, alpha, xs)
    out = (2.0 * n + alpha - xs) / (2.0 * xs) * pn - math.sqrt(n * (n + alpha)) / xs * pm1
    return float(out[0]) if np.isscalar(x) else out


# -- Airy and Bessel helpers ------------------------------------------------
#
# Backed by scipy.special (series + asymptotic switchover internally, well
# past the 1e-10 relative target); the wrappers pin the domain contracts and
# expose the modulus sqrt(Ai^2 + Bi^2) used by the soft-edge error term.


def airy_ai(x) -> np.ndarray | float:
    """Airy Ai(x) for |x| <= 1e3."""
    _check_airy_domain(x)
    return _sp.airy(x)[0]


def airy_bi(x) -> np.ndarray | float:
    """Airy Bi(x) for |x| <= 1e3."""
    _check_airy_domain(x)
    return _sp.airy(x)[2]


def airy_ai_prime(x) -> np.ndarray | float:
    """Airy Ai'(x) for |x| <= 1e3."""
    _check_airy_domain(x)
    return _sp.airy(x)[1]


def airy_modulus(x) -> np.ndarray | float:
    """sqrt(Ai(x)^2 + Bi(x)^2), the oscillatory-side error envelope."""
    _check_airy_domain(x)
    ai, _, bi, _ = _sp.airy(x)
    return np.hypot(ai, bi)


def _check_airy_domain(x) -> None:
    if np.any(np.abs(np.asarray(x, dtype=float)) > 1e3):
        raise ValueError("Airy helpers are contracted for |x| <= 1e3")


def bessel_j(order: int, x) -> np.ndarray | float:
    """Bessel J_order(x) for integer 0 <= order <= 20 and x >= 0."""
    _check_bessel_domain(order, x)
    return _sp.jv(order, x)


def bessel_j_prime(order: int, x) -> np.ndarray | float:
    """J'_order(x) from the two-sided recurrence (J_{a-1} - J_{a+1})/2; J_0' = -J_1."""
    _check_bessel_domain(order, x)
    if order == 0:
        return -_sp.jv(1, x)
    return 0.5 * (_sp.jv(order - 1, x) - _sp.jv(order + 1, x))


def _check_bessel_domain(order: int, x) -> None:
    if not 0 <= order <= 20:
        raise ValueError("Bessel helpers are contracted for integer order in [0, 20]")
    if np.any(np.asarray(x, dtype=float) < 0):
        raise ValueError("Bessel helpers are contracted for x >= 0")
