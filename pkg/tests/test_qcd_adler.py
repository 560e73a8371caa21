import cmath
import math

import numpy as np
import pytest

from borelsum import (
    Contour,
    CouplingModel,
    PowerSeries,
    RenormalonModel,
    adler_asymptoticity,
    adler_resum,
    adler_series,
    ambiguity_scan,
    analyticity_probe,
    arc_path,
    borel_variable,
    laplace_derivatives,
    prescription_value,
    pv_resum,
    running_coupling,
    segment_path,
    stokes_jump,
)
from borelsum.errors import GeometryError, LandauPoleError, ParameterError

PI = math.pi
CP = CouplingModel(1.0, 1.0)
IR = RenormalonModel()  # 1/(2 - u)
ENTIRE = RenormalonModel(ir_poles=(), analytic_part=PowerSeries([1.0], 0))


def s_of(a, cp=CP):
    return cp.Lambda2 * math.exp(1.0 / (cp.beta0 * a))


class TestCoupling:
    def test_values(self):
        assert running_coupling(math.e, CP) == pytest.approx(1.0)
        assert running_coupling(math.e ** 2, CouplingModel(2.0, 1.0)) == pytest.approx(0.25)
        assert running_coupling(4 * math.e, CouplingModel(1.0, 4.0)) == pytest.approx(1.0)

    def test_asymptotic_freedom(self):
        s = np.geomspace(1.01, 1e8, 200)
        a = np.array([running_coupling(x, CP) for x in s])
        assert np.all(a > 0) and np.all(np.diff(a) < 0)

    def test_landau_pole_and_domain(self):
        with pytest.raises(LandauPoleError):
            running_coupling(1.0, CP)
        with pytest.raises(ParameterError):
            running_coupling(-2.0, CP)
        with pytest.raises(ParameterError):
            CouplingModel(0.0, 1.0)
        assert running_coupling(0.5, CP) < 0

    def test_complex_branch(self):
        s = 3.0 * cmath.exp(1j)
        assert borel_variable(s, CP) == pytest.approx(math.log(3.0) + 1j)
        assert running_coupling(s, CP) == pytest.approx(1 / (math.log(3.0) + 1j))


class TestModel:
    def test_default_is_leading_ir_pole(self):
        for u in (0.0, 0.5, -3.0, 1 + 1j):
            assert IR(u) == pytest.approx(1 / (2 - u))
        assert IR.rho == 2.0

    def test_singularities_on_rays_only(self):
        with pytest.raises(ParameterError):
            RenormalonModel(ir_poles=((1.5, 1.0),))
        with pytest.raises(ParameterError):
            RenormalonModel(uv_poles=((-0.5, 1.0),))
        with pytest.raises(ParameterError):
            RenormalonModel(branch_terms=((0.5, 0.5),))
        with pytest.raises(ParameterError):
            RenormalonModel(ir_poles=())
        m = RenormalonModel(((2.0, -1.0),), ((-1.0, 0.5),), ((3.0, 1.5),))
        assert m.rho == 1.0

    def test_series(self):
        D = adler_series(IR, 1.0, 4)
        # b_n = 2^-(n+1), D_{n+1} = n! / 2^(n+1)
        np.testing.assert_allclose(D.coeffs.real, [math.factorial(n) / 2 ** (n + 1) for n in range(5)])


class TestResum:
    @pytest.mark.parametrize("contour", [Contour.ray(), Contour.ray(0.5), Contour(((0.0, 0.0), (1.0, 0.6), (2.0, -0.2)))])
    def test_entire_model_reproduces_coupling(self, contour):
        for s in (5.0, 50.0, 1e4):
            q = adler_resum(s, CP, ENTIRE, contour)
            assert abs(q.value - running_coupling(s, CP)) <= q.abs_error_estimate + 1e-15

    def test_half_residue_imaginary_part(self):
        for a in (0.1, 0.2, 0.3):
            up = adler_resum(s_of(a), CP, IR, Contour.ray(0.3), tol=1e-13)
            dn = adler_resum(s_of(a), CP, IR, Contour.ray(-0.3), tol=1e-13)
            ref = PI * math.exp(-2 / a)
            assert up.value.imag == pytest.approx(ref, rel=1e-3)
            assert dn.value.imag == pytest.approx(-ref, rel=1e-3)
            assert up.value.real == pytest.approx(dn.value.real, rel=1e-12)

    def test_asymptoticity(self):
        rep = adler_asymptoticity(CP, IR, Contour.ray(0.3), np.geomspace(0.3, 0.03, 16), 6)
        assert rep.passed
        assert not any(rep.exact.values())


class TestPrincipalValue:
    @pytest.mark.parametrize("a", [0.05, 0.1, 0.2, 0.3])
    def test_real(self, a):
        assert abs(pv_resum(s_of(a), CP, IR).value.imag) < 1e-10

    @pytest.mark.parametrize("a", [0.1, 0.2, 0.3])
    def test_distance_to_single_contour(self, a):
        pv = pv_resum(s_of(a), CP, IR, tol=1e-13).value
        up = adler_resum(s_of(a), CP, IR, Contour.ray(0.3), tol=1e-13).value
        assert abs(pv - up) == pytest.approx(PI * math.exp(-2 / a), rel=0.01)

    def test_entire_model_has_no_ambiguity(self):
        s = s_of(0.2)
        pv = pv_resum(s, CP, ENTIRE)
        one = adler_resum(s, CP, ENTIRE, Contour.ray(0.3))
        assert abs(pv.value - one.value) <= pv.abs_error_estimate + one.abs_error_estimate + 1e-16

    def test_displacement_independent(self):
        s = s_of(0.15)
        a = pv_resum(s, CP, IR, 0.3)
        b = pv_resum(s, CP, IR, 0.15)
        assert abs(a.value - b.value) <= a.abs_error_estimate + b.abs_error_estimate + 1e-15

    def test_bad_displacement(self):
        with pytest.raises(ParameterError):
            pv_resum(10.0, CP, IR, 0.0)


def test_ambiguity_recovers_pole_location():
    model = RenormalonModel(ir_poles=((3.0, -1.0),))
    fit = ambiguity_scan(model, Contour.ray(0.3), Contour.ray(-0.3), np.geomspace(0.15, 0.6, 12), 1.0)
    assert fit.d == pytest.approx(3.0, rel=0.01)


@pytest.mark.parametrize("model", [
    IR,
    RenormalonModel(((2.0, -1.0), (3.0, 0.7)), branch_terms=((2.0, 1.5, 0.4),)),
])
def test_stokes_jump_matches_quadrature(model):
    lam = 1.3 - 0.4j
    up, _ = laplace_derivatives(model, Contour.ray(0.6), lam, 3, tol=1e-13)
    dn, _ = laplace_derivatives(model, Contour.ray(-0.3), lam, 3, tol=1e-13)
    np.testing.assert_allclose(up - dn, stokes_jump(model, lam, 3), atol=1e-12)


def test_prescription_values():
    lam = 5.0
    pv, _ = prescription_value(IR, lam, "pv")
    up, _ = prescription_value(IR, lam, "fixed_contour")
    sw, _ = prescription_value(IR, lam, "sign_switched")
    assert abs(pv.imag) < 1e-14
    assert up == sw
    with pytest.raises(ParameterError):
        prescription_value(IR, lam, "other")
    # beyond the imaginary lam axis the up value comes from the down ray plus the jump
    far = 0.5 * cmath.exp(2.2j)
    v, _ = prescription_value(IR, far, "fixed_contour")
    d, _ = prescription_value(IR, far, "sign_switched")
    assert abs(v - d - stokes_jump(IR, far)[0]) < 1e-10


class TestProbe:
    crossing = segment_path(cmath.exp(0.8 + 1j), cmath.exp(-0.8 + 1j), 41)

    def test_pv_continuous_across_switch(self):
        rep = analyticity_probe(CP, IR, "pv", self.crossing)
        assert rep.continuous
        assert rep.max_jump_ratio < 10

    def test_sign_switched_jumps(self):
        rep = analyticity_probe(CP, IR, "sign_switched", self.crossing)
        assert len(rep.discontinuities) == 1
        i = rep.discontinuities[0]
        lam_a, lam_b = (borel_variable(rep.s[j], CP) for j in (i, i + 1))
        assert lam_a.real * lam_b.real < 0
        assert rep.jumps[i] == pytest.approx(2 * PI, rel=0.3)
        assert rep.jumps[i] >= 100 * rep.local_errors[i]

    def test_single_region(self):
        path = arc_path(0.0, math.exp(1.5), 0.3, 2.0, 25)
        for p in ("pv", "fixed_contour", "sign_switched"):
            assert analyticity_probe(CP, IR, p, path).continuous

    def test_rows_schema(self):
        rep = analyticity_probe(CP, IR, "pv", segment_path(5 + 1j, 6 + 2j, 5))
        rows = rep.rows()
        assert [r[0] for r in rows] == list(range(5))
        assert rows[-1][5] == 0.0

    def test_path_checks(self):
        with pytest.raises(GeometryError):
            analyticity_probe(CP, IR, "pv", segment_path(0.5 + 0.5j, 1.5 - 0.5j, 3))
        with pytest.raises(GeometryError):
            analyticity_probe(CP, IR, "pv", segment_path(-2 + 1j, -2 - 1j, 3))
        with pytest.raises(ParameterError):
            analyticity_probe(CP, IR, "pv", [5.0])
