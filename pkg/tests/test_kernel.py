import math

import numpy as np
import pytest

from luelab import kernel as ker
from luelab import quadrature as quadr
from luelab import specfun as sf
from luelab.functions import parse_test_function as parse


def test_cd_symmetry():
    ctx = ker.KernelContext.create(15, 2)
    for x, y in [(0.7, 2.9), (1.1, 1.2), (3.8, 0.2)]:
        assert ker.cd_kernel(ctx, x, y) == ker.cd_kernel(ctx, y, x)


def test_cd_identity_direct_sum():
    n, alpha = 20, 1
    ctx = ker.KernelContext.create(n, alpha)
    x, y = 1.3, 2.1
    tx = sf.psi_table(n - 1, alpha, np.array([n * x]))[:, 0]
    ty = sf.psi_table(n - 1, alpha, np.array([n * y]))[:, 0]
    direct = n * float(tx @ ty)
    assert ker.cd_kernel(ctx, x, y) == pytest.approx(direct, rel=1e-9)


def test_cd_identity_grid():
    for n, alpha in [(5, 0), (20, 2), (50, 1)]:
        ctx = ker.KernelContext.create(n, alpha)
        xs = np.linspace(0.15, 4.3, 20)
        ys = xs + 0.037  # off the diagonal
        tx = sf.psi_table(n - 1, alpha, n * xs)
        ty = sf.psi_table(n - 1, alpha, n * ys)
        direct = n * (tx.T @ ty)
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                v = ker.cd_kernel(ctx, x, y)
                assert abs(v - direct[i, j]) <= 1e-9 * (1 + abs(v))


def test_cd_closed_form_n1():
    # two-term case collapses to exp(-(x+y)/2)
    ctx = ker.KernelContext.create(1, 0)
    for x, y in [(0.5, 1.7), (2.0, 3.1)]:
        assert ker.cd_kernel(ctx, x, y) == pytest.approx(math.exp(-(x + y) / 2), rel=1e-12)


def test_cd_diagonal_error():
    ctx = ker.KernelContext.create(5, 0)
    with pytest.raises(ValueError):
        ker.cd_kernel(ctx, 1.0, 1.0)
    with pytest.raises(ValueError):
        ker.kernel_diagonal(ctx, 0.0)


def test_kernel_diagonal_positive_and_direct():
    ctx = ker.KernelContext.create(30, 0)
    tbl = sf.psi_table(29, 0, np.array([30 * 2.5]))[:, 0]
    dsum = 30 * float(tbl @ tbl)
    assert ker.kernel_diagonal(ctx, 2.5) == pytest.approx(dsum, rel=1e-10)
    for n in (5, 40, 100):
        c = ker.KernelContext.create(n, 1)
        assert all(ker.kernel_diagonal(c, x) > 0 for x in np.linspace(0.1, 3.9, 9))


@pytest.mark.parametrize("n", [5, 20, 100])
def test_kernel_diagonal_integrates_to_n(n):
    ctx = ker.KernelContext.create(n, 0)
    assert ker.lss_mean(ctx, parse("const 1")) == pytest.approx(n, abs=n * 1e-8)


def test_phi_symmetrized_identity():
    # symmetrized phi times F equals (1/2)(f(x)-f(y))^2 K^2 for f = identity
    ctx = ker.KernelContext.create(20, 0)
    for x, y in [(0.9, 2.3), (1.1, 3.7), (0.4, 0.8)]:
        lhs = 0.5 * (ker.phi(ctx, x, y) + ker.phi(ctx, y, x))
        rhs = 0.5 * (x - y) ** 2 * ker.cd_kernel(ctx, x, y) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-9)
        assert lhs >= 0.0


def test_phi_diagonal_vanishes_n1():
    ctx = ker.KernelContext.create(1, 0)
    assert ker.phi(ctx, 1.3, 1.3) == pytest.approx(0.0, abs=1e-15)


def test_lss_mean_trace():
    ctx = ker.KernelContext.create(10, 3)
    assert ker.lss_mean(ctx, parse("identity")) == pytest.approx(13.0, rel=1e-6)


def test_lss_mean_indicator_bulk_mass():
    ctx = ker.KernelContext.create(100, 0)
    m = ker.lss_mean(ctx, parse("indicator 0 4"))
    assert m > 99.0


def test_lss_variance_constant_is_zero():
    ctx = ker.KernelContext.create(25, 0)
    rep = ker.lss_variance(ctx, parse("const 3"))
    assert rep.finite_n_variance == 0.0


@pytest.mark.parametrize("n,alpha", [(5, 0), (25, 2), (100, 0)])
def test_lss_variance_trace_law(n, alpha):
    rep = ker.lss_variance(ker.KernelContext.create(n, alpha), parse("identity"))
    assert rep.finite_n_variance == pytest.approx((n + alpha) / n, rel=1e-6)
    assert rep.finite_n_variance >= 0.0


def test_lss_variance_square_near_limit():
    rep = ker.lss_variance(ker.KernelContext.create(200, 0), parse("poly 0 0 1"))
    assert rep.finite_n_variance == pytest.approx(18.0, rel=0.05)


def test_lss_variance_shift_invariance():
    # adding a constant shifts nothing (floating-point-level equality)
    ctx = ker.KernelContext.create(20, 1)
    a = ker.lss_variance(ctx, parse("poly 0 1")).finite_n_variance
    b = ker.lss_variance(ctx, parse("poly 5 1")).finite_n_variance
    assert b == pytest.approx(a, rel=1e-12)


def test_reproducing_property():
    for n in (5, 20):
        ctx = ker.KernelContext.create(n, 0)
        x, y = 1.3, 2.6
        rule = quadr.theta_rule(1200, 0.0, ctx.x_max)
        _, pm1, pn = sf.psi_triple(n, 0, n * rule.nodes)
        _, pm1x, pnx = sf.psi_triple(n, 0, np.array([n * x]))
        _, pm1y, pny = sf.psi_triple(n, 0, np.array([n * y]))
        pref = math.sqrt(n * n)
        kxz = pref * (pm1x[0] * pn - pnx[0] * pm1) / (x - rule.nodes)
        kzy = pref * (pm1 * pny[0] - pn * pm1y[0]) / (rule.nodes - y)
        val = quadr.fsum((rule.weights * kxz * kzy).tolist())
        assert val == pytest.approx(ker.cd_kernel(ctx, x, y), abs=1e-6)


def test_psi_cache_consistency():
    ctx = ker.KernelContext.create(12, 2)
    ctx.psi_at(1.7)
    trip = sf.psi_triple(12, 2, np.array([12 * 1.7]))
    assert ctx.psi_at(1.7) == (trip[0][0], trip[1][0], trip[2][0])
