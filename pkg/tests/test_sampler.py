import math

import numpy as np
import pytest

from luelab import kernel as ker
from luelab import sampler as smp
from luelab.functions import parse_test_function as parse


def test_determinism():
    a = smp.sample_spectrum(50, 2, 123, 5)
    b = smp.sample_spectrum(50, 2, 123, 5)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    c = smp.sample_spectrum(50, 2, 124, 5)
    assert not np.array_equal(a.eigenvalues, c.eigenvalues)


def test_single_eigenvalue_is_exponential():
    vals = np.array([smp.sample_spectrum(1, 0, 42, i).eigenvalues[0]
                     for i in range(100_000)])
    assert abs(vals.mean() - 1.0) <= 3.0 / math.sqrt(100_000)
    assert abs(np.mean(vals**2) - 2.0) <= 0.1  # second moment of Exp(1)


def test_two_by_two_trace_mean():
    vals = np.array([smp.sample_spectrum(2, 0, 7, i).eigenvalues.sum()
                     for i in range(40_000)])
    assert vals.mean() == pytest.approx(2.0, abs=4 * math.sqrt(2.0 / 40_000) + 0.02)


def test_trace_consistency():
    s = smp.sample_spectrum(200, 1, 99)
    assert s.eigenvalues.sum() == pytest.approx(s.trace, abs=1e-9 * max(1.0, s.trace))


def test_sturm_count_matches_solver():
    d, o = smp.sample_tridiagonal(150, 1, 11)
    full = np.diag(d) + np.diag(o, 1) + np.diag(o, -1)
    ev = np.sort(np.linalg.eigvalsh(full))
    rng = np.random.default_rng(0)
    for lam in rng.uniform(-1.0, 6.0, 100):
        assert smp.sturm_count(d, o, lam) == int(np.searchsorted(ev, lam))


def test_lss_of_sample():
    s = smp.sample_spectrum(40, 0, 3)
    assert smp.lss_of_sample(parse("const 1"), s) == 40.0
    assert smp.lss_of_sample(parse("identity"), s) == pytest.approx(s.trace, rel=1e-9)
    inside = smp.lss_of_sample(parse("indicator 0 4"), s)
    assert inside == np.count_nonzero((s.eigenvalues >= 0) & (s.eigenvalues <= 4))


def test_clt_degenerate_constant():
    rep = smp.clt_experiment(parse("const 2"), 10, 0, 200, 1)
    assert rep.degenerate and rep.empirical_variance == 0.0


def test_clt_trace_variance():
    rep = smp.clt_experiment(parse("identity"), 50, 2, 5000, 11, target_variance=1.04)
    assert rep.empirical_variance == pytest.approx(1.04, rel=0.10)
    assert rep.ks_statistic < rep.ks_threshold_1pct
    assert rep.ks_threshold_1pct == pytest.approx(1.6276 / math.sqrt(5000), rel=1e-12)


@pytest.mark.parametrize("text,n", [("identity", 25), ("identity", 50),
                                    ("poly 0 0 1", 25), ("poly 0 0 1", 50)])
def test_empirical_variance_matches_kernel(text, n):
    f = parse(text)
    num = 3000
    rep = smp.clt_experiment(f, n, 0, num, 5, target_variance=1.0)
    exact = ker.lss_variance(ker.KernelContext.create(n, 0), f).finite_n_variance
    # variance-of-variance for near-Gaussian statistics: var * sqrt(2/(N-1))
    mc_err = exact * math.sqrt(2.0 / (num - 1))
    assert abs(rep.empirical_variance - exact) <= 4.0 * mc_err


def test_truncated_series_statistic_matches_kernel():
    from luelab import chebyshev
    f = chebyshev.approximate_for_lue(parse("poly -1 0 0.5").shift(-2.0), 6, 0.5)
    n, num = 25, 3000
    rep = smp.clt_experiment(f, n, 0, num, 9, target_variance=1.0)
    exact = ker.lss_variance(ker.KernelContext.create(n, 0), f).finite_n_variance
    mc_err = exact * math.sqrt(2.0 / (num - 1))
    assert abs(rep.empirical_variance - exact) <= 4.0 * mc_err


def test_mp_histogram():
    samples = [smp.sample_spectrum(200, 0, 7, i) for i in range(200)]
    assert smp.mp_histogram_gap(samples, bins=40) <= 0.03


def test_threaded_statistics_identical(monkeypatch):
    f = parse("identity")
    base = smp.clt_experiment(f, 20, 0, 300, 3, target_variance=1.0)
    monkeypatch.setenv("LUE_LSS_THREADS", "4")
    threaded = smp.clt_experiment(f, 20, 0, 300, 3, target_variance=1.0)
    assert threaded.empirical_variance == base.empirical_variance
    assert threaded.ks_statistic == base.ks_statistic


def test_sampler_guards():
    with pytest.raises(ValueError):
        smp.sample_tridiagonal(0, 0, 1)
    with pytest.raises(ValueError):
        smp.clt_experiment(parse("identity"), 10, 0, 50, 1)
