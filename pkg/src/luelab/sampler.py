"""Monte Carlo spectra of the square-case complex Wishart ensemble and the
empirical central-limit experiment for its linear spectral statistics.

Sampling uses the bidiagonal model: for m = n + alpha the matrix B B^T with
independent Gamma-squared entries (shape m-i+1 on the diagonal, n-i below)
has the same eigenvalue law as X*X with X an m-by-n standard complex Gaussian
matrix; dividing by n gives the sample-covariance normalization.  Each sample
draws from its own counter-based stream, Philox(key=[seed, index]), so runs
are reproducible bit for bit and embarrassingly parallel.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from . import limitvar

__all__ = [
    "SpectrumSample",
    "CltReport",
    "sample_tridiagonal",
    "sample_spectrum",
    "lss_of_sample",
    "sturm_count",
    "clt_experiment",
    "mp_histogram_gap",
    "worker_count",
]

KS_1PCT = 1.6276  # asymptotic 1% critical coefficient: threshold = KS_1PCT/sqrt(N)


@dataclass(frozen=True)
class SpectrumSample:
    """One sorted spectrum of the n-by-n normalized covariance matrix."""

    eigenvalues: np.ndarray
    n: int
    alpha: int
    seed: int
    trace: float  # diagonal sum of the sampled tridiagonal matrix, for checks

    def __post_init__(self) -> None:
        ev = self.eigenvalues
        if ev.size != self.n or np.any(np.diff(ev) < 0) or np.any(ev < 0):
            raise ValueError("eigenvalues must be n sorted nonnegative reals")


@dataclass
class CltReport:
    """Empirical law of the centered spectral sum against its Gaussian limit."""

    n: int
    alpha: int
    num_samples: int
    empirical_mean: float
    empirical_variance: float
    target_variance: float
    ks_statistic: float
    ks_threshold_1pct: float
    degenerate: bool = False
    statistics: np.ndarray | None = field(default=None, repr=False)


def _stream(seed: int, index: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_tridiagonal(n: int, alpha: int, seed: int,
                       index: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of B B^T / n for one bidiagonal draw."""
    if n < 1 or alpha < 0:
        raise ValueError("need n >= 1 and alpha >= 0")
    m = n + alpha
    rng = _stream(seed, index)
    g = rng.gamma(shape=np.arange(m, m - n, -1, dtype=float))       # d_i^2
    h = rng.gamma(shape=np.arange(n - 1, 0, -1, dtype=float))       # s_i^2
    diag = g.copy()
    diag[1:] += h
    off = np.sqrt(g[:-1] * h)
    return diag / n, off / n


def sample_spectrum(n: int, alpha: int, seed: int, index: int = 0) -> SpectrumSample:
    """One exact-in-law spectrum draw (eigenvalues sorted ascending)."""
    diag, off = sample_tridiagonal(n, alpha, seed, index)
    if n == 1:
        ev = diag.copy()
    else:
        ev = eigvalsh_tridiagonal(diag, off)
    ev = np.maximum(np.sort(ev), 0.0)
    return SpectrumSample(ev, n, alpha, seed, float(diag.sum()))


def lss_of_sample(f, sample: SpectrumSample) -> float:
    """sum_j f(lambda_j) over one spectrum."""
    return float(np.sum(np.asarray(f(sample.eigenvalues), dtype=float)))


def sturm_count(diag: np.ndarray, off: np.ndarray, lam: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below lam."""
    count = 0
    d = diag[0] - lam
    if d < 0:
        count += 1
    tiny = np.finfo(float).tiny
    for k in range(1, diag.size):
        denom = d if d != 0.0 else -tiny
        d = (diag[k] - lam) - off[k - 1] ** 2 / denom
        if d < 0:
            count += 1
    return count


def worker_count() -> int:
    """Worker cap from LUE_LSS_THREADS (default 1); result order is fixed."""
    try:
        return max(1, int(os.environ.get("LUE_LSS_THREADS", "1")))
    except ValueError:
        return 1


def _statistics(f, n: int, alpha: int, num_samples: int, seed: int) -> np.ndarray:
    def chunk(bounds: tuple[int, int]) -> list[float]:
        lo, hi = bounds
        return [lss_of_sample(f, sample_spectrum(n, alpha, seed, i))
                for i in range(lo, hi)]

    workers = worker_count()
    if workers == 1:
        return np.array(chunk((0, num_samples)))
    step = -(-num_samples // (workers * 4))
    spans = [(lo, min(lo + step, num_samples)) for lo in range(0, num_samples, step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(chunk, spans))
    return np.array([v for part in parts for v in part])


def _normal_cdf(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.vectorize(math.erf)(z / math.sqrt(2.0)))


def clt_experiment(f, n: int, alpha: int, num_samples: int, seed: int,
                   target_variance: float | None = None,
                   keep_statistics: bool = False) -> CltReport:
    """Monte Carlo law of the centered spectral sum vs its Gaussian limit.

    Centers by the empirical mean; the Kolmogorov-Smirnov statistic compares
    against the centered Gaussian whose variance is the limiting functional
    (or target_variance when supplied).
    """
    if num_samples < 100:
        raise ValueError("need at least 100 samples")
    stats = _statistics(f, n, alpha, num_samples, seed)
    mean = float(np.mean(stats))
    centered = stats - mean
    emp_var = float(np.sum(centered**2) / (num_samples - 1))
    target = limitvar.v_lue(f) if target_variance is None else float(target_variance)
    threshold = KS_1PCT / math.sqrt(num_samples)
    degenerate = bool(target <= 0.0 or np.ptp(stats) == 0.0)
    if degenerate:
        ks = 0.0 if np.ptp(stats) == 0.0 and target <= 0.0 else 1.0
    else:
        z = np.sort(centered) / math.sqrt(target)
        cdf = _normal_cdf(z)
        k = np.arange(1, num_samples + 1)
        ks = float(np.max(np.maximum(k / num_samples - cdf,
                                     cdf - (k - 1) / num_samples)))
    return CltReport(n, alpha, num_samples, mean, emp_var, target, ks, threshold,
                     degenerate, stats if keep_statistics else None)


def mp_histogram_gap(samples: list[SpectrumSample], bins: int = 40) -> float:
    """Sup over bins of |empirical density - bin-averaged limit density| on [0, 4]."""
    edges = np.linspace(0.0, 4.0, bins + 1)
    all_ev = np.concatenate([s.eigenvalues for s in samples])
    counts, _ = np.histogram(all_ev, bins=edges)
    width = edges[1] - edges[0]
    emp = counts / (all_ev.size * width)
    ref = np.diff(limitvar.mp_cdf(edges)) / width
    return float(np.max(np.abs(emp - ref)))
