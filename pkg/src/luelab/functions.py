"""Test functions for spectral statistics, described by a small text DSL.

Grammar (whitespace separated, locale-independent floats):

    identity
    const <c>
    power <k>
    poly <c0> <c1> ...
    cheb <a1> <a2> ...          shifted-Chebyshev series around x = 2
    cheb-ext <c0> <tail_eps> <a1> ...
    indicator <a> <b>
    abs [<c>]                   |x - c|, default c = 0
    abs-shift                   alias for abs 2
    hat [<c>]                   max(0, 1 - |x - c|)

The cheb kind evaluates its series exactly on [0, 4 + tail_eps], then blends
with a C^1 cubic to a constant over one further tail_eps, so values stay
defined and finite on all of [0, infinity).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = ["TestFunction", "parse_test_function"]


@dataclass(frozen=True)
class TestFunction:
    """A scalar function on [0, inf) (or [-2, 2] for spectrum-centered use)."""

    __test__ = False  # not a pytest class, despite the name

    kind: str
    params: tuple[float, ...] = ()
    support_hint: tuple[float, float] = (0.0, 4.0)
    lipschitz_hint: float | None = None
    tail_eps: float = 0.5

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        out = self._evaluate(xs)
        return float(out) if np.isscalar(x) else out

    def _evaluate(self, xs: np.ndarray) -> np.ndarray:
        k, p = self.kind, self.params
        if k == "identity":
            return xs + 0.0
        if k == "const":
            return np.full_like(xs, p[0])
        if k == "power":
            return xs ** p[0]
        if k == "poly":
            return np.polynomial.polynomial.polyval(xs, np.asarray(p))
        if k == "indicator":
            return ((xs >= p[0]) & (xs <= p[1])).astype(float)
        if k == "abs":
            return np.abs(xs - p[0])
        if k == "hat":
            return np.maximum(0.0, 1.0 - np.abs(xs - p[0]))
        if k == "cheb":
            return self._evaluate_cheb(xs)
        raise ValueError(f"unknown test-function kind {self.kind!r}")

    def _evaluate_cheb(self, xs: np.ndarray) -> np.ndarray:
        c0, coeffs = self.params[0], np.asarray(self.params[1:])
        x0 = 4.0 + self.tail_eps
        x1 = 4.0 + 2.0 * self.tail_eps

        def series(v):
            u = np.asarray(v, dtype=float) - 2.0
            full = np.concatenate([[c0], coeffs])
            return np.polynomial.chebyshev.chebval(u / 2.0, full)

        out = np.empty_like(xs)
        inside = xs <= x0
        out[inside] = series(xs[inside])
        beyond = xs >= x1
        g0 = float(series(x0))
        out[beyond] = g0
        mid = ~(inside | beyond)
        if np.any(mid):
            full = np.concatenate([[c0], coeffs])
            d0 = 0.5 * float(np.polynomial.chebyshev.chebval(
                (x0 - 2.0) / 2.0, np.polynomial.chebyshev.chebder(full)))
            s = (xs[mid] - x0) / (x1 - x0)
            # Hermite cubic: value g0/slope d0 at x0, value g0/slope 0 at x1
            out[mid] = g0 + d0 * (x1 - x0) * s * (1.0 - s) ** 2
        return out

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Kink/jump locations, used to align quadrature panels."""
        if self.kind == "indicator":
            return self.params
        if self.kind == "abs":
            return (self.params[0],)
        if self.kind == "hat":
            c = self.params[0]
            return (c - 1.0, c, c + 1.0)
        if self.kind == "cheb":
            return (4.0 + self.tail_eps, 4.0 + 2.0 * self.tail_eps)
        return ()

    def shift(self, delta: float) -> "TestFunction":
        """The function x -> f(x + delta), re-expressed in the DSL."""
        k, p = self.kind, self.params
        lo, hi = self.support_hint
        hint = (lo - delta, hi - delta)
        if k in ("const",):
            return replace(self, support_hint=hint)
        if k == "identity":
            return TestFunction("poly", (delta, 1.0), hint, self.lipschitz_hint)
        if k in ("power", "poly"):
            if k == "poly":
                coefs = np.asarray(p)
            else:
                coefs = np.zeros(int(p[0]) + 1)
                coefs[-1] = 1.0
            poly = np.polynomial.Polynomial(coefs)(np.polynomial.Polynomial([delta, 1.0]))
            return TestFunction("poly", tuple(poly.coef), hint, self.lipschitz_hint)
        if k in ("indicator",):
            return TestFunction(k, (p[0] - delta, p[1] - delta), hint, self.lipschitz_hint)
        if k in ("abs", "hat"):
            return TestFunction(k, (p[0] - delta,), hint, self.lipschitz_hint)
        raise ValueError(f"cannot shift kind {self.kind!r} within the DSL")

    def to_text(self) -> str:
        k, p = self.kind, self.params
        if k == "identity":
            return "identity"
        if k == "abs" and p == (2.0,):
            return "abs-shift"
        if k == "cheb":
            if p[0] == 0.0 and self.tail_eps == 0.5:
                return "cheb " + " ".join(repr(float(a)) for a in p[1:])
            return ("cheb-ext " + repr(float(p[0])) + " " + repr(float(self.tail_eps))
                    + " " + " ".join(repr(float(a)) for a in p[1:]))
        return k + "".join(" " + repr(float(v)) for v in p)


def parse_test_function(text: str) -> TestFunction:
    """Parse the DSL; raises ValueError with a usable message on bad input."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty test-function descriptor")
    head, args = tokens[0], tokens[1:]
    try:
        vals = tuple(float(t) for t in args)
    except ValueError as exc:
        raise ValueError(f"bad number in descriptor {text!r}") from exc
    if head == "identity":
        _need(len(vals) == 0, text)
        return TestFunction("identity")
    if head == "const":
        _need(len(vals) == 1, text)
        return TestFunction("const", vals)
    if head == "power":
        _need(len(vals) == 1 and vals[0] == int(vals[0]) and vals[0] >= 0, text)
        return TestFunction("power", vals)
    if head == "poly":
        _need(len(vals) >= 1, text)
        return TestFunction("poly", vals)
    if head == "cheb":
        _need(len(vals) >= 1, text)
        return TestFunction("cheb", (0.0,) + vals)
    if head == "cheb-ext":
        _need(len(vals) >= 3, text)
        return TestFunction("cheb", (vals[0],) + vals[2:], tail_eps=vals[1])
    if head == "indicator":
        _need(len(vals) == 2 and vals[0] < vals[1], text)
        return TestFunction("indicator", vals)
    if head == "abs":
        _need(len(vals) <= 1, text)
        return TestFunction("abs", vals or (0.0,))
    if head == "abs-shift":
        _need(len(vals) == 0, text)
        return TestFunction("abs", (2.0,))
    if head == "hat":
        _need(len(vals) <= 1, text)
        return TestFunction("hat", vals or (0.0,))
    raise ValueError(f"unknown test-function kind {head!r}")


def _need(ok: bool, text: str) -> None:
    if not ok:
        raise ValueError(f"malformed test-function descriptor {text!r}")
