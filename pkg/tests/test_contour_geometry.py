import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelsum import Contour, ContourValidation, Sector, derivative, point, sector_lambda, sector_z, validate
from borelsum.errors import ParameterError, RangeError, ValidationError

from oracles import central_difference

PI = math.pi


def ramp(g_end, r0=1.0, r1=5.0):
    return Contour(((0.0, 0.0), (r0, 0.0), (r1, g_end)), math.inf, r0)


def fake_validation(A, B):
    return ContourValidation(A, B, 1.0, 0.0, None, 0.0, PI / 2 - (B - A) / 2)


class TestContour:
    def test_construction_checks(self):
        with pytest.raises(ParameterError):
            Contour(((0.5, 0.0),))
        with pytest.raises(ParameterError):
            Contour(((0.0, 0.0), (1.0, 0.1), (1.0, 0.2)))
        with pytest.raises(ParameterError):
            Contour(((0.0, 0.0), (3.0, 0.1)), c=2.0)
        with pytest.raises(ParameterError):
            Contour(((0.0, 0.0),), c=2.0, r0=2.0)
        with pytest.raises(ParameterError):
            Contour(((0.0, math.nan),))

    def test_dict_roundtrip(self):
        for c in (ramp(0.7), Contour(((0.0, 0.1), (1.0, -0.3)), c=4.0, r0=0.5)):
            back = Contour.from_dict(c.to_dict())
            np.testing.assert_array_equal(back.phase_nodes, c.phase_nodes)
            assert back.c == c.c and back.r0 == c.r0

    def test_breakpoints(self):
        np.testing.assert_array_equal(ramp(0.5).breakpoints(), [0.0, 1.0, 5.0])
        np.testing.assert_array_equal(Contour.ray(0.0, c=3.0).breakpoints(), [0.0, 3.0])

    def test_distance(self):
        assert Contour.ray(0.3).distance_to(2.0) == pytest.approx(2 * math.sin(0.3), rel=1e-9)
        assert Contour.ray(0.0, c=1.0, r0=0.5).distance_to(3.0) == pytest.approx(2.0, rel=1e-9)
        # closest point on the ramp's tail
        c = ramp(PI / 2)
        assert c.distance_to(10j) == pytest.approx(0.0, abs=1e-9)


class TestPointDerivative:
    def test_straight(self):
        c = Contour.ray()
        assert point(c, 2.5) == 2.5
        assert derivative(c, 2.5) == 1.0

    @pytest.mark.parametrize("theta", [0.3, -1.1, PI / 4])
    def test_rotated(self, theta):
        c = Contour.ray(theta)
        e = complex(math.cos(theta), math.sin(theta))
        assert abs(point(c, 3.0) - 3.0 * e) < 1e-15
        assert abs(derivative(c, 3.0) - e) < 1e-15

    def test_linear_phase_speed(self):
        m = 0.4
        c = Contour(((0.0, 0.0), (10.0, 10 * m)))
        for r in (0.5, 2.0, 7.3):
            assert abs(derivative(c, r)) ** 2 == pytest.approx(1 + m * m * r * r, rel=1e-14)
            fd = central_difference(lambda x: point(c, x), r)
            assert abs(fd - derivative(c, r)) < 1e-8

    def test_out_of_range(self):
        c = Contour.ray(0.0, c=2.0)
        with pytest.raises(RangeError):
            point(c, 2.0)
        with pytest.raises(RangeError):
            derivative(c, -0.1)

    @given(st.floats(0.0, 50.0))
    def test_modulus_equals_radius(self, r):
        c = Contour(((0.0, 0.0), (1.0, 0.8), (3.0, -0.4), (6.0, 0.2)))
        assert abs(point(c, r)) == pytest.approx(r, rel=1e-14, abs=1e-300)

    @settings(max_examples=50)
    @given(st.floats(0.05, 9.9).filter(lambda r: min(abs(r - 1), abs(r - 3), abs(r - 6)) > 1e-3))
    def test_derivative_matches_finite_difference(self, r):
        c = Contour(((0.0, 0.0), (1.0, 0.8), (3.0, -0.4), (6.0, 0.2)))
        h = 1e-4
        fd = central_difference(lambda x: point(c, x), r, h)
        # O(h^2) truncation, h^2 |G'''| is tiny on piecewise-linear phases
        assert abs(fd - derivative(c, r)) < 1e-6


class TestValidate:
    def test_ray(self):
        v = validate(Contour.ray(), 0.1)
        assert (v.A, v.B) == (0.0, 0.0)
        assert v.epsilon_max == pytest.approx(PI / 2)
        assert v.K1 == pytest.approx(1.0)

    def test_rotation(self):
        v = validate(Contour.ray(PI / 4), 0.1)
        assert v.A == v.B == pytest.approx(PI / 4)

    def test_ramp_spread(self):
        # 3 pi / 4 against pi - 2 eps: admissible at eps = 0.3, rejected at eps = 0.4
        c = ramp(3 * PI / 4)
        v = validate(c, 0.3)
        assert v.B - v.A == pytest.approx(3 * PI / 4)
        assert v.epsilon_max == pytest.approx(PI / 2 - 3 * PI / 8)
        with pytest.raises(ValidationError, match="B - A < pi - 2 eps"):
            validate(c, 0.4)
        with pytest.raises(ValidationError):
            validate(ramp(0.95 * PI), 0.1)

    def test_extrema_ignore_inner_segment(self):
        # phase excursion below r0 does not count
        c = Contour(((0.0, 0.0), (0.5, 1.5), (1.0, 0.2)), r0=1.0)
        v = validate(c, 0.1)
        assert v.A == v.B == pytest.approx(0.2)

    def test_growth_constants(self):
        c = ramp(PI / 3, r1=2.0)
        v = validate(c, 0.1, f=lambda u: 1 / (1 + u), gamma1=1.0)
        slope = (PI / 3) / 1.0
        # hypot(1, m r)/r decreases, so the sup sits at r0 = 1
        assert v.K1 == pytest.approx(math.hypot(1.0, slope), rel=1e-12)
        assert v.K2 == pytest.approx(0.5, rel=1e-2)
        with pytest.raises(ValidationError):
            validate(Contour.ray(), 0.1, gamma1=-0.5)
        with pytest.raises(ValidationError):
            validate(Contour.ray(), 0.1, f=lambda u: np.exp(u))


class TestSectors:
    def test_watson_case(self):
        s = sector_lambda(fake_validation(0, 0), 0.1)
        assert (s.phi_min, s.phi_max) == pytest.approx((-PI / 2 + 0.1, PI / 2 - 0.1))
        z = sector_z(fake_validation(0, 0), 0.1)
        assert (z.phi_min, z.phi_max) == pytest.approx((-PI / 2 + 0.1, PI / 2 - 0.1))

    def test_rotated_case(self):
        v = fake_validation(PI / 4, PI / 4)
        s = sector_lambda(v, 0.1)
        assert (s.phi_min, s.phi_max) == pytest.approx((-3 * PI / 4 + 0.1, PI / 4 - 0.1))
        z = sector_z(v, 0.1)
        assert (z.phi_min, z.phi_max) == pytest.approx((-PI / 4 + 0.1, 3 * PI / 4 - 0.1))

    def test_quarter_spread(self):
        s = sector_lambda(fake_validation(0, PI / 2), 0.2)
        assert (s.phi_min, s.phi_max) == pytest.approx((-PI / 2 + 0.2, -0.2))

    def test_empty_sector(self):
        with pytest.raises(ValidationError):
            sector_lambda(fake_validation(0, PI - 0.1), 0.1)

    def test_sector_type(self):
        with pytest.raises(ValidationError):
            Sector(1.0, 0.5)
        with pytest.raises(ValidationError):
            Sector(0.0, 7.0)
        s = Sector(-0.5, 0.5)
        assert s.contains(0.0) and not s.contains(0.6)
        assert s.contains(2 * PI + 0.1)
        assert s.width == 1.0 and s.center == 0.0

    @given(st.floats(-1.5, 1.5), st.floats(0, 2.5), st.floats(0.01, 1.0), st.floats(-4, 4))
    def test_reflection(self, A, spread, eps, phi):
        B = A + spread
        v = fake_validation(A, B)
        if spread >= PI - 2 * eps:
            with pytest.raises(ValidationError):
                sector_lambda(v, eps)
            return
        lam, z = sector_lambda(v, eps), sector_z(v, eps)
        assert lam.width + z.width == pytest.approx(2 * (PI - spread - 2 * eps))
        assert z.phi_min == pytest.approx(-lam.phi_max) and z.phi_max == pytest.approx(-lam.phi_min)
        assert lam.reflected().phi_min == pytest.approx(z.phi_min)
        # skip angles within rounding of an edge
        if min(abs(phi - lam.phi_min), abs(phi - lam.phi_max)) > 1e-9:
            assert lam.contains(phi) == z.contains(-phi)
