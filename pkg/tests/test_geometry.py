import math

import pytest

from tests.conftest import plane
from tools.errors import ChartDomainError, ImmersionError
from tools.expr import parse
from tools.gallery import gallery
from tools.geometry import (
    ParamSurface,
    alignment_defect,
    angle_data,
    christoffel,
    codazzi_residual,
    curvatures,
    excluded_angle,
    first_form,
    laplace_beltrami,
    second_form,
    shape_operator,
    u_alignment,
    unit_normal,
)
from tools.jet import Jet2
from tools.models import GridSpec, domain

WIDE = domain((-1.0, 1.0), (-1.0, 1.0))


def helicoid() -> ParamSurface:
    return gallery("helicoid", domain((-1.0, 2.0), (0.0, 2.0 * math.pi)))


def catenoid() -> ParamSurface:
    return gallery("catenoid", WIDE)


class TestFundamentalForms:
    def test_plane(self):
        S = plane()
        f = first_form(S, (0.2, 0.3))
        assert (f.E, f.F, f.G) == (1.0, 0.0, 1.0)
        assert unit_normal(S, (0.2, 0.3)) == (0.0, 0.0, 1.0)
        a = shape_operator(S, (0.2, 0.3))
        assert a.norm() == 0.0

    @pytest.mark.parametrize("u, v", [(0.0, 0.0), (0.5, 1.0), (1.7, 4.0)])
    def test_helicoid_metric(self, u, v):
        f = first_form(helicoid(), (u, v))
        assert f.E == pytest.approx(1.0)
        assert f.F == pytest.approx(0.0, abs=1e-15)
        assert f.G == pytest.approx(u * u + 1.0)

    @pytest.mark.parametrize("u", [-0.8, 0.0, 0.6])
    def test_catenoid_metric(self, u):
        f = first_form(catenoid(), (u, 0.4))
        assert f.E == pytest.approx(math.cosh(u) ** 2)
        assert f.G == pytest.approx(math.cosh(u) ** 2)
        assert f.F == pytest.approx(0.0, abs=1e-15)

    def test_enneper_metric(self):
        S = gallery("enneper", domain((0.5, 1.5), (0.0, 1.0)))
        f = first_form(S, (1.0, 0.0))
        assert (f.E, f.F, f.G) == pytest.approx((4.0, 0.0, 4.0))

    def test_catenoid_normal_at_origin(self):
        assert unit_normal(catenoid(), (0.0, 0.0)) == pytest.approx((-1.0, 0.0, 0.0))

    def test_second_form_of_catenoid(self):
        ii = second_form(catenoid(), (0.3, 0.0))
        assert (ii.e, ii.f, ii.g2) == pytest.approx((-1.0, 0.0, 1.0))

    def test_degenerate_metric(self):
        S = ParamSurface("line", WIDE, lambda x, y: (x, x, Jet2(0.0)))
        with pytest.raises(ImmersionError) as err:
            first_form(S, (0.1, 0.2))
        assert err.value.point == (0.1, 0.2)

    def test_outside_chart(self):
        with pytest.raises(ChartDomainError):
            first_form(plane(), (2.0, 0.0))


class TestCurvatures:
    def test_plane_is_flat_and_minimal(self):
        c = curvatures(plane(), (0.0, 0.0))
        assert (c.K, c.H) == (0.0, 0.0)

    @pytest.mark.parametrize("u", [0.0, 0.4, -0.9])
    def test_catenoid(self, u):
        c = curvatures(catenoid(), (u, 1.0))
        assert c.K == pytest.approx(-1.0 / math.cosh(u) ** 4)
        assert c.H == pytest.approx(0.0, abs=1e-12)
        assert c.kappa1 * c.kappa2 == pytest.approx(c.K)
        assert 0.5 * (c.kappa1 + c.kappa2) == pytest.approx(c.H, abs=1e-12)

    def test_shape_operator_self_adjoint(self):
        for S in (helicoid(), catenoid(), gallery("scherk")):
            for p in GridSpec(4, 4, margin=0.1).points(S.domain):
                a = shape_operator(S, p)
                f = first_form(S, p)
                assert f.E * a.a12 + f.F * a.a22 == pytest.approx(f.F * a.a11 + f.G * a.a21, abs=1e-8)

    def test_codazzi_residual_small(self):
        for S in (helicoid(), catenoid(), gallery("enneper")):
            for p in GridSpec(3, 3, margin=0.1).points(S.domain):
                assert codazzi_residual(S, p) < 1e-6


class TestAngle:
    def test_helicoid_angle(self):
        S = helicoid()
        assert angle_data(S, (0.0, 0.5)).theta == pytest.approx(math.pi / 2)
        assert angle_data(S, (1.0, 0.5)).theta == pytest.approx(math.pi / 4)

    def test_scherk_angle(self):
        ad = angle_data(gallery("scherk", domain((0.1, 1.2), (0.1, 1.2))), (math.pi / 4, math.pi / 4))
        assert ad.cos_theta == pytest.approx(1.0 / math.sqrt(3.0))

    def test_enneper_normal_is_horizontal(self):
        S = gallery("enneper", domain((0.5, 1.5), (0.0, 1.0)))
        assert angle_data(S, (1.0, 0.0)).cos_theta == pytest.approx(0.0, abs=1e-15)

    def test_unit_decomposition(self):
        for S in (helicoid(), catenoid(), gallery("enneper")):
            for p in GridSpec(3, 3, margin=0.1).points(S.domain):
                ad = angle_data(S, p)
                f = first_form(S, p)
                assert f.inner(ad.U, ad.U) + ad.cos_theta**2 == pytest.approx(1.0, abs=1e-9)

    def test_plane_angle_is_degenerate(self):
        ad = angle_data(plane(), (0.0, 0.0))
        assert ad.degenerate
        assert ad.theta == 0.0

    def test_u_collinear_with_dx_on_catenoid(self):
        assert u_alignment(catenoid(), (0.4, 1.0)) == pytest.approx(0.0, abs=1e-12)
        assert alignment_defect(catenoid(), (0.4, 1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_u_along_dy_on_helicoid(self):
        # the height of the helicoid is the second chart variable
        assert u_alignment(helicoid(), (0.5, 1.0)) == pytest.approx(1.0)

    def test_excluded_angles(self):
        assert excluded_angle(math.pi / 2 + 1e-8, 1e-6)
        assert excluded_angle(0.0, 1e-6)
        assert not excluded_angle(1.0, 1e-6)


class TestConnection:
    def test_plane_christoffel_vanish(self):
        assert all(g == 0.0 for g in christoffel(plane(), (0.3, -0.2)))

    def test_catenoid_christoffel(self):
        u = 0.7
        gam = christoffel(catenoid(), (u, 0.1))
        assert gam.x_xx == pytest.approx(math.tanh(u))
        assert gam.gamma(0, 0, 0) == gam.x_xx

    def test_helicoid_christoffel(self):
        u = 1.3
        gam = christoffel(helicoid(), (u, 0.2))
        assert gam.y_xy == pytest.approx(u / (u * u + 1.0))
        assert gam.x_yy == pytest.approx(-u)


class TestLaplaceBeltrami:
    def test_plane_paraboloid(self):
        assert laplace_beltrami(plane(), parse("x^2 + y^2"), (0.3, 0.2)) == pytest.approx(4.0)

    def test_catenoid_height_is_harmonic(self):
        S = catenoid()
        for p in GridSpec(3, 3).points(S.domain):
            assert laplace_beltrami(S, parse("-x"), p) == pytest.approx(0.0, abs=1e-12)

    def test_helicoid_log_tan_half_angle_is_harmonic(self):
        S = gallery("helicoid")
        f = parse("ln(sqrt(x^2 + 1) - x)")
        for p in GridSpec(4, 3).points(S.domain):
            assert laplace_beltrami(S, f, p) == pytest.approx(0.0, abs=1e-10)

    def test_accepts_scalar_field(self):
        value = laplace_beltrami(plane(), lambda x, y: x * x, (0.1, 0.1))
        assert value == pytest.approx(2.0)
