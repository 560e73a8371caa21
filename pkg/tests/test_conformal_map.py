import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from borelsum import (
    ConformalMap,
    ConformalSeries,
    PowerSeries,
    Rational,
    convergence_compare,
    evaluate_conformal,
    map_u,
    map_w,
    recompose,
)
from borelsum.errors import BranchError, ParameterError, RangeError

from oracles import cauchy_coefficients, conformal_w

CMAP = ConformalMap()
finite = dict(allow_nan=False, allow_infinity=False)


def cut_plane_points():
    return st.complex_numbers(max_magnitude=20, **finite).filter(lambda u: not CMAP.on_cut(u))


def test_fixed_points():
    assert map_w(0.0) == 0.0
    assert map_w(2.0) == pytest.approx(1.0)
    assert map_w(-1.0) == pytest.approx(-1.0)
    assert map_w(2.0 - 1e-12).real == pytest.approx(1.0, abs=2e-6)
    assert map_w(-1.0 + 1e-12).real == pytest.approx(-1.0, abs=2e-6)


def test_matches_oracle():
    for u in (0.3, -0.7 + 0.2j, 5 + 5j, -30 - 1j):
        assert abs(map_w(u) - conformal_w(u)) < 1e-15


def test_cut_contract():
    with pytest.raises(BranchError):
        map_w(3.0)
    with pytest.raises(BranchError):
        map_w(np.array([0.0, -5.0]))
    with pytest.raises(RangeError):
        map_u(1.0)
    with pytest.raises(ParameterError):
        ConformalMap(-1.0, -2.0)


@settings(max_examples=300)
@given(cut_plane_points())
def test_roundtrip_and_unit_disc(u):
    w = map_w(u)
    assert abs(w) < 1.0 or math.isclose(abs(w), 1.0, abs_tol=1e-8)
    assume(abs(w) < 1.0)
    assert abs(map_u(w) - u) < 1e-12 * max(1.0, abs(u))


@given(st.complex_numbers(max_magnitude=0.999, **finite))
def test_inverse_roundtrip(w):
    assert abs(map_w(map_u(w)) - w) < 1e-11


def test_cut_edges_have_unit_modulus():
    k = np.arange(1, 101)
    for edge in (2 + 0.48 * k, -1 - 0.49 * k):
        for sgn in (1, -1):
            w = CMAP.w(edge + sgn * 1e-8j)
            assert np.all(np.abs(np.abs(w) - 1) < 1e-6)


def test_real_segment_is_real_and_increasing():
    u = np.linspace(-0.999, 1.999, 400)
    w = map_w(u)
    assert np.all(w.imag == 0)
    assert np.all(np.diff(w.real) > 0)


@pytest.mark.parametrize("u", [0.5, 1.0, 1.5, 1.9])
def test_schwarz_ordering(u):
    assert abs(map_w(u)) < u


def test_taylor_series_of_maps():
    N = 20
    ref_u = cauchy_coefficients(CMAP.u, N, 0.5)
    np.testing.assert_allclose(CMAP.u_taylor(N), ref_u, atol=1e-12)
    ref_w = cauchy_coefficients(conformal_w, N, 0.5)
    np.testing.assert_allclose(CMAP.w_taylor(N), ref_w, atol=1e-12)


class TestRecompose:
    def test_constant(self):
        c = recompose(PowerSeries([1.0] + [0.0] * 10, 0), CMAP)
        np.testing.assert_array_equal(c.coeffs, [1.0] + [0.0] * 10)

    def test_identity_gives_inverse_map_coefficients(self):
        N = 15
        b = PowerSeries([0.0, 1.0] + [0.0] * (N - 1), 0)
        c = recompose(b, CMAP, N)
        np.testing.assert_allclose(c.coeffs, cauchy_coefficients(CMAP.u, N, 0.5), atol=1e-12)

    def test_converges_to_function(self):
        f = Rational.from_poles([(3.0, -1.0), (-2.5, 1.0)])
        errs = []
        for N in (5, 10, 20, 30):
            c = recompose(PowerSeries(f.taylor(N), 0), CMAP, N)
            errs.append(abs(evaluate_conformal(c, 1.2 + 0.5j, CMAP) - f(1.2 + 0.5j)))
        assert errs == sorted(errs, reverse=True)
        assert errs[-1] < 1e-10

    def test_linear_and_causal(self):
        rng = np.random.default_rng(7)
        a = PowerSeries(rng.normal(size=12), 0)
        b = PowerSeries(rng.normal(size=12) + 1j * rng.normal(size=12), 0)
        lhs = recompose(a + 2.5 * b, CMAP).coeffs
        rhs = recompose(a, CMAP).coeffs + 2.5 * recompose(b, CMAP).coeffs
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)
        short = recompose(a, CMAP, 6).coeffs
        np.testing.assert_allclose(short, recompose(a, CMAP).coeffs[:7], rtol=1e-15)

    def test_order_check(self):
        with pytest.raises(RangeError):
            recompose(PowerSeries([1.0, 2.0], 0), CMAP, 3)

    def test_conformal_series_taylor_inverts(self):
        f = Rational.from_poles([(2.0, -1.0), (-1.0, 1.0)])
        N = 18
        b = PowerSeries(f.taylor(N), 0)
        back = ConformalSeries(recompose(b, CMAP, N), CMAP).taylor(N)
        np.testing.assert_allclose(back, b.coeffs, rtol=1e-9)


class TestConvergence:
    model = Rational.from_poles([(2.0, -1.0), (-1.0, 1.0)])

    def table(self, u, N=50):
        b = PowerSeries(self.model.taylor(N), 0)
        return convergence_compare(b, recompose(b, CMAP, N), u, range(N + 1), self.model, CMAP)

    def test_interior_probe(self):
        t = self.table(0.9)
        assert t.rate_u == pytest.approx(0.9, rel=0.02)
        assert t.rate_w < t.rate_u
        assert t.err_w[-1] < 1e-12

    def test_outside_u_disc(self):
        t = self.table(1.5)
        assert np.all(np.diff(t.err_u[10:]) > 0)
        assert t.rate_w == pytest.approx(abs(map_w(1.5)), rel=0.05)

    def test_origin(self):
        t = self.table(0.0, 10)
        np.testing.assert_allclose(t.err_u, 0.0, atol=1e-16)
        np.testing.assert_allclose(t.err_w, 0.0, atol=1e-16)
        assert math.isnan(t.rate_u)

    def test_rows(self):
        rows = self.table(0.5, 10).rows()
        assert rows[0][0] == 0 and len(rows) == 11
