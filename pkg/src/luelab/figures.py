"""Figure rendering for the CLI report paths (written alongside data output)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import limitvar  # noqa: E402

__all__ = ["render_sweep", "render_asymp", "render_clt", "render_sample"]


def _finish(fig, path: str | Path) -> str:
    out = Path(path)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return str(out)


def render_sweep(rows: list[dict], limit: float, path: str | Path) -> str:
    """Log-log finite-size error of the variance against its limit."""
    ns = [r["n"] for r in rows]
    errs = [max(r["abs_error"], 1e-16) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.loglog(ns, errs, "o-", color="tab:blue")
    ax.set_xlabel("matrix size n")
    ax.set_ylabel(f"|Var_n - {limit:.6g}|")
    ax.set_title("variance convergence")
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)


def render_asymp(report, path: str | Path) -> str:
    """Direct recurrence values vs regime approximation, with the error below."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5.5, 4.6), sharex=True,
                                   height_ratios=[2, 1])
    ax1.plot(report.grid, report.direct, lw=1.0, label="recurrence")
    ax1.plot(report.grid, report.approx, "--", lw=1.0, label="asymptotic")
    ax1.set_ylabel("value")
    ax1.legend(fontsize=8)
    ax1.set_title(f"{report.regime} regime, n={report.n}, alpha={report.alpha}")
    ax2.semilogy(report.grid, np.abs(report.direct - report.approx) + 1e-300, lw=1.0)
    ax2.set_xlabel("x")
    ax2.set_ylabel("|error|")
    return _finish(fig, path)


def render_clt(report, path: str | Path) -> str:
    """Histogram of centered statistics with the limiting Gaussian density."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    if report.statistics is not None and not report.degenerate:
        centered = report.statistics - report.empirical_mean
        ax.hist(centered, bins=60, density=True, alpha=0.6, color="tab:blue")
        s = math.sqrt(report.target_variance)
        z = np.linspace(centered.min(), centered.max(), 400)
        ax.plot(z, np.exp(-z**2 / (2 * s * s)) / (s * math.sqrt(2 * math.pi)),
                "k-", lw=1.2, label="Gaussian limit")
        ax.legend(fontsize=8)
    ax.set_xlabel("centered spectral sum")
    ax.set_ylabel("density")
    ax.set_title(f"n={report.n}, {report.num_samples} samples, "
                 f"KS={report.ks_statistic:.4f}")
    return _finish(fig, path)


def render_sample(samples, path: str | Path) -> str:
    """Pooled eigenvalue histogram against the limiting spectral density."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ev = np.concatenate([s.eigenvalues for s in samples])
    ax.hist(ev, bins=60, range=(0.0, 4.2), density=True, alpha=0.6, color="tab:blue")
    x = np.linspace(1e-3, 4.0, 600)
    ax.plot(x, limitvar.mp_density(x), "k-", lw=1.2, label="limit density")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.legend(fontsize=8)
    ax.set_title(f"n={samples[0].n}, {len(samples)} spectra")
    return _finish(fig, path)
