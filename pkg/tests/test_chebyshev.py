import json
import math

import numpy as np
import pytest

from luelab import chebyshev as ch
from luelab import limitvar as lv
from luelab import quadrature as quadr
from luelab.functions import parse_test_function as parse


def test_p_n_values():
    xs = np.linspace(-2.0, 2.0, 9)
    np.testing.assert_allclose(ch.p_n(2, xs), xs**2 / 2 - 1, rtol=0, atol=1e-14)
    np.testing.assert_allclose(ch.p_n(0, xs), 1.0)
    for n, theta in [(1, 0.3), (5, 1.1), (12, 2.9)]:
        assert ch.p_n(n, 2 * math.cos(theta)) == pytest.approx(math.cos(n * theta), abs=1e-12)


def test_p_n_domain():
    with pytest.raises(ValueError):
        ch.p_n(3, 2.5)


def test_expand_polynomials():
    e = ch.expand(lambda x: ch.p_n(3, x), 8)
    expected = np.zeros(9)
    expected[3] = 1.0
    np.testing.assert_allclose(e.coeffs, expected, atol=1e-12)
    e = ch.expand(lambda x: x, 8)
    assert e.coeffs[1] == pytest.approx(2.0, abs=1e-13)
    assert max(abs(c) for c in e.coeffs[2:]) < 1e-13
    e = ch.expand(lambda x: np.full_like(x, 3.3), 8)
    assert max(abs(c) for c in e.coeffs[1:]) < 1e-14


def test_seminorm():
    assert ch.seminorm_h_half(ch.expand(lambda x: x, 16)) == pytest.approx(4.0, abs=1e-12)
    assert ch.seminorm_h_half(ch.expand(lambda x: ch.p_n(2, x), 16)) == pytest.approx(2.0, abs=1e-12)
    assert ch.seminorm_h_half(ch.expand(lambda x: np.ones_like(x), 16)) == pytest.approx(0.0, abs=1e-28)


def test_apply_k_eigenfunctions():
    e1 = ch.apply_k(ch.expand(lambda x: ch.p_n(1, x), 6))
    assert e1.coeffs[1] == pytest.approx(0.5, abs=1e-13)
    assert e1.coeffs[0] == 0.0
    e0 = ch.apply_k(ch.expand(lambda x: np.ones_like(x), 6))
    assert max(abs(c) for c in e0.coeffs) < 1e-14


def test_apply_k_quadratic_form_vs_pv():
    # <f, Kf>_w for f = P_2 + P_3 must equal (1/2) V_gue[f] = 5/8; the left
    # side is an independent principal-value quadrature of the operator
    f = lambda x: ch.p_n(2, x) + ch.p_n(3, x)

    def kf(x):
        phi0 = math.acos(x / 2.0)

        def g(p):
            y = 2.0 * np.cos(p)
            return (f(x) - f(y)) * (4.0 - x * y) / ((x - y) ** 2 * 2.0 * math.pi)

        return quadr.pv_interval(g, 0.0, math.pi, phi0, 400)

    rule = quadr.gauss_chebyshev_w(24)
    vals = np.array([f(x) * kf(x) for x in rule.nodes])
    inner = quadr.fsum((rule.weights * vals).tolist()) / 2.0
    assert inner == pytest.approx(5.0 / 8.0, abs=1e-6)
    # coefficient route agrees: <P_n, P_m>_w = delta/4 for n, m >= 1
    e = ch.expand(f, 8)
    ke = ch.apply_k(e)
    coef_inner = quadr.fsum(
        (0.25 * np.asarray(e.coeffs[1:]) * np.asarray(ke.coeffs[1:])).tolist())
    assert coef_inner == pytest.approx(5.0 / 8.0, abs=1e-12)


def test_kt_closed_form_vs_series():
    for x, y in [(0.3, -1.1), (1.7, 1.9), (-0.4, 0.2)]:
        assert ch.kt_kernel(1.0, x, y) == pytest.approx(
            ch.kt_kernel_series(1.0, x, y), abs=1e-10)


def test_kt_long_time_limit():
    assert ch.kt_kernel(50.0, 0.3, -1.1) == pytest.approx(2.0, abs=1e-10)


def test_kt_mass():
    rule = quadr.gauss_legendre(400, 0.0, math.pi)
    for t, theta in [(0.3, 0.9), (1.0, 2.2), (5.0, 0.4)]:
        mass = quadr.fsum((rule.weights * ch._kt_theta(t, theta, rule.nodes)).tolist())
        assert mass / (2.0 * math.pi) == pytest.approx(1.0, abs=1e-8)


def test_kt_over_t_strictly_decreasing():
    ts = np.logspace(math.log10(0.1), 1.0, 20)
    xs = np.linspace(-1.8, 1.8, 10)
    for x in xs:
        for y in xs:
            vals = np.array([ch.kt_kernel(t, x, y) / t for t in ts])
            assert np.all(np.diff(vals) < 0)


def test_kt_semigroup():
    rule = quadr.gauss_legendre(500, 0.0, math.pi)
    s, t = 0.7, 1.3
    for x, y in [(0.5, -0.9), (1.5, 1.1)]:
        th, ph = math.acos(x / 2), math.acos(y / 2)
        conv = quadr.fsum((rule.weights * ch._kt_theta(s, th, rule.nodes)
                           * ch._kt_theta(t, rule.nodes, ph)).tolist()) / (2 * math.pi)
        assert conv == pytest.approx(ch.kt_kernel(s + t, x, y), abs=1e-7)


def test_i_t_constant_zero():
    assert ch.i_t(lambda x: np.ones_like(x), 1.0) == pytest.approx(0.0, abs=1e-30)


def test_i_t_monotone():
    f = lambda x: ch.p_n(2, x)
    v = [ch.i_t(f, t) for t in (0.5, 1.0, 2.0)]
    assert v[0] >= v[1] >= v[2]


def test_i_t_zero_limit_p1():
    val = ch.i_t_zero_limit(lambda x: ch.p_n(1, x))
    assert val == pytest.approx(0.125, abs=1e-4)  # (1/2) V_gue[P_1]


def test_approximate_polynomial_exact():
    f = parse("poly -1 0 0.5").shift(-2.0)  # P_2(x-2) as an LUE-frame poly
    approx = ch.approximate_for_lue(f, 8, tail_eps=0.5)
    g = lambda x: f(x) - approx(x)
    assert lv.v_lue(g, points=120, rtol=1e-6, breakpoints=()) == pytest.approx(0.0, abs=1e-10)


def _abs_shift_tail(order: int) -> float:
    # telescoping: sum_{n>order} n a_n^2 = (128/pi^2)(1/8)/(2K-1)^2, K = order//2+1
    k = order // 2 + 1
    return (128.0 / math.pi**2) * 0.125 / (2 * k - 1) ** 2


@pytest.mark.parametrize("order", [16, 32, 64])
def test_tail_law(order):
    f = parse("abs-shift")
    approx = ch.approximate_for_lue(f, order, tail_eps=0.5)
    g = lambda x: f(x) - approx(x)
    direct = lv.v_lue(g, points=360, rtol=5e-6, breakpoints=(2.0,))
    assert direct == pytest.approx(_abs_shift_tail(order) / 4.0, rel=1e-4)


def test_tail_monotone_in_order():
    f = parse("abs-shift")
    vals = []
    for order in (16, 32, 64):
        approx = ch.approximate_for_lue(f, order, tail_eps=0.5)
        g = lambda x: f(x) - approx(x)
        vals.append(lv.v_lue(g, points=240, rtol=1e-4, breakpoints=(2.0,)))
    assert vals[0] > vals[1] > vals[2]


def test_expansion_json_round_trip(tmp_path):
    e = ch.expand(lambda x: np.sin(x), 12)
    path = tmp_path / "exp.json"
    e.save_json(path)
    loaded = ch.ChebyshevExpansion.load_json(path)
    assert loaded.coeffs == e.coeffs
    assert json.loads(path.read_text()) == list(e.coeffs)


def test_seminorm_equivalence_smooth():
    # 4 V_gue == sum n a_n^2 for an analytic function (negligible tail)
    f = lambda x: np.exp(0.4 * x)
    s = ch.seminorm_h_half(ch.expand(f, 48))
    v = 4.0 * lv.v_gue(f, points=160, rtol=1e-10, breakpoints=())
    assert abs(v - s) <= 1e-6 * (1.0 + s)
