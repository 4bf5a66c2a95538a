import math

import numpy as np
import pytest

from tests.conftest import perturbed
from tools.cpd import (
    Case1Spec,
    Case2Spec,
    ExprProfile,
    TabulatedProfile,
    build_case1,
    build_case2,
    catenoid_cpd,
    cmc_profile,
    cmc_surface,
    is_cpd,
    sphere_center,
    sphere_cpd,
)
from tools.errors import (
    AngleDomainError,
    CmcSingularityError,
    ConstructionError,
    DegenerateImmersionError,
    ExprVariableError,
)
from tools.gallery import gallery, log_tan_half_harmonicity
from tools.geometry import CoordinateKind, angle_data, curvatures, first_form, shape_operator, unit_normal
from tools.jet import Jet2
from tools.models import GridSpec, Interval, domain

SAMPLE_POINTS = [(0.6, 0.2), (1.1, 2.5), (1.9, 5.0)]


class TestCase1:
    def test_reproduces_catenoid(self):
        dom = domain((0.5, 2.0), (0.0, 2.0 * math.pi))
        spec = Case1Spec.from_text("acos(x/sqrt(x^2 + 1))", "0", dom, x0=0.0, phi0=1.0)
        S = build_case1(spec)
        ref = catenoid_cpd(1.0, dom)
        for p in SAMPLE_POINTS:
            assert S.position(p) == pytest.approx(ref.position(p), abs=1e-8)

    def test_atan_profile_is_the_catenoid(self):
        dom = domain((0.5, 3.0), (0.0, 2.0 * math.pi))
        S = build_case1(Case1Spec.from_text("atan(1/x)", "0", dom, x0=0.0, phi0=1.0))
        ref = catenoid_cpd(1.0, dom)
        grid = GridSpec(11, 11)
        for p in grid.points(dom):
            assert S.position(p) == pytest.approx(ref.position(p), abs=1e-8)
            assert abs(shape_operator(S, p).trace) < 1e-9
        assert log_tan_half_harmonicity(S, grid) < 1e-6

    def test_base_point_is_origin(self, case1_surface):
        assert case1_surface.position((0.0, 0.0)) == pytest.approx((0.0, 0.0, 0.0), abs=1e-15)

    @pytest.mark.parametrize("p", [(-0.8, 0.3), (0.0, 1.5), (0.7, 2.9)])
    def test_canonical_metric(self, case1_surface, p):
        f = first_form(case1_surface, p)
        beta = math.log(math.cosh(p[0])) + 0.2
        assert f.E == pytest.approx(1.0, abs=1e-9)
        assert f.F == pytest.approx(0.0, abs=1e-9)
        assert f.G == pytest.approx(beta * beta, rel=1e-8)

    def test_claimed_beta_matches_metric(self, case1_surface):
        p = (0.4, 1.0)
        beta = case1_surface.beta(Jet2.var_x(p[0]), Jet2.var_y(p[1]))
        assert beta.val**2 == pytest.approx(first_form(case1_surface, p).G, rel=1e-8)

    def test_nonpositive_warping_raises(self):
        spec = Case1Spec.from_text("2*atan(exp(-x))", "-0.5", domain((-1.0, 1.0), (0.0, 1.0)))
        with pytest.raises(DegenerateImmersionError):
            build_case1(spec)

    def test_angle_leaving_open_interval_raises(self):
        spec = Case1Spec.from_text("x", "1", domain((-1.0, 1.0), (0.0, 1.0)))
        with pytest.raises(AngleDomainError) as err:
            build_case1(spec)
        assert err.value.x == pytest.approx(-1.0)

    def test_angle_profile_must_be_one_variable(self):
        with pytest.raises(ExprVariableError):
            ExprProfile.parse("x + y", "x")

    def test_tabulated_angle(self):
        xs = np.linspace(0.0, 1.0, 201)
        prof = TabulatedProfile(xs, 0.5 * xs + 0.6)
        j = prof(Jet2.var_x(0.37))
        assert (j.val, j.dx) == pytest.approx((0.5 * 0.37 + 0.6, 0.5))
        assert j.dxx == pytest.approx(0.0, abs=1e-9)


class TestCase2:
    @pytest.fixture(scope="class")
    def cylinder(self):
        return build_case2(Case2Spec.from_text("x + 0.3", 0.0, domain((0.2, 1.5), (-1.0, 1.0))))

    @pytest.mark.parametrize("p", [(0.3, -0.5), (1.0, 0.0), (1.4, 0.9)])
    def test_flat_with_half_unit_mean_curvature(self, cylinder, p):
        c = curvatures(cylinder, p)
        assert c.K == pytest.approx(0.0, abs=1e-9)
        assert c.H == pytest.approx(0.5, abs=1e-8)

    def test_rulings_are_straight(self, cylinder):
        a = cylinder.position((0.8, -0.5))
        b = cylinder.position((0.8, 0.5))
        assert (b[0] - a[0], b[1] - a[1], b[2] - a[2]) == pytest.approx((0.0, 1.0, 0.0), abs=1e-12)

    def test_kind(self, cylinder):
        assert cylinder.kind is CoordinateKind.CANONICAL


class TestClosedForms:
    def test_catenoid_base_circle(self):
        S = catenoid_cpd(1.0, domain((-1.0, 1.0), (0.0, 1.0)))
        assert S.position((0.0, 0.0)) == pytest.approx((1.0, 0.0, 0.0))
        rho = math.sqrt(2.0)
        assert S.position((1.0, 1.0)) == pytest.approx(
            (rho * math.cos(1.0), rho * math.sin(1.0), math.log(1.0 + rho))
        )

    def test_catenoid_is_minimal(self, catenoid_c1):
        for p in GridSpec(4, 4).points(catenoid_c1.domain):
            assert abs(shape_operator(catenoid_c1, p).trace) < 1e-9

    def test_negative_parameter_mirrors_catenoid(self, catenoid_c1):
        S = catenoid_cpd(-1.0, catenoid_c1.domain)
        for p in SAMPLE_POINTS:
            x, y, z = catenoid_c1.position(p)
            assert S.position(p) == pytest.approx((x, -y, z))
            theta = angle_data(S, p)
            assert theta.theta == pytest.approx(math.pi - math.atan(1.0 / p[0]))
            A = shape_operator(S, p)
            assert A.a11 == pytest.approx(theta.theta_x, abs=1e-9)
            assert A.a22 == pytest.approx(math.tan(theta.theta) * p[0] / (p[0] ** 2 + 1.0), abs=1e-9)

    def test_negative_parameter_through_waist(self):
        S = catenoid_cpd(-2.0, domain((-1.0, 1.0), (0.0, 1.0)))
        assert S.angle_text.startswith("acos(-x")
        for p in [(-0.7, 0.2), (0.4, 0.9)]:
            assert angle_data(S, p).theta == pytest.approx(S.angle(Jet2.var_x(p[0]), Jet2.var_y(p[1])).val)

    def test_catenoid_rejects_zero_parameter(self):
        with pytest.raises(ConstructionError):
            catenoid_cpd(0.0, domain((0.5, 1.0), (0.0, 1.0)))

    def test_unit_sphere(self):
        S = sphere_cpd(1.0, 0.0, domain((0.3, 2.5), (0.0, 2.0 * math.pi)))
        center = sphere_center(1.0, 0.0)
        assert center == (0.0, 0.0, 1.0)
        for p in GridSpec(4, 4).points(S.domain):
            assert math.dist(S.position(p), center) == pytest.approx(1.0, abs=1e-9)
            c = curvatures(S, p)
            assert c.umbilic
            assert abs(c.H) == pytest.approx(1.0, abs=1e-8)

    def test_sphere_of_radius_half(self):
        S = sphere_cpd(2.0, 0.1, domain((0.1, 1.2), (0.0, 1.0)))
        assert curvatures(S, (0.6, 0.5)).K == pytest.approx(4.0, rel=1e-8)

    @pytest.mark.parametrize(
        "a, b, x, y",
        [(1.0, 0.0, (0.3, 2.5), (0.0, 2.0 * math.pi)), (2.0, 0.1, (0.1, 1.2), (0.0, 1.0))],
    )
    def test_sphere_center_fitted_from_normals(self, a, b, x, y):
        S = sphere_cpd(a, b, domain(x, y))
        points = GridSpec(7, 7).points(S.domain)
        for p in points:
            c = curvatures(S, p)
            assert abs(c.kappa1 - c.kappa2) < 1e-8
        positions = np.array([S.position(p) for p in points])
        normals = np.array([unit_normal(S, p) for p in points])
        centers = positions + normals / a
        center = centers.mean(axis=0)
        assert np.max(np.linalg.norm(centers - center, axis=1)) < 1e-6
        assert np.linalg.norm(positions - center, axis=1) == pytest.approx(np.full(len(points), 1.0 / abs(a)), abs=1e-6)
        assert tuple(center) == pytest.approx(sphere_center(a, b), abs=1e-6)

    def test_sphere_rejects_zero_slope(self):
        with pytest.raises(ConstructionError):
            sphere_cpd(0.0, 1.0, domain((0.1, 1.0), (0.0, 1.0)))


class TestCmc:
    def test_minimal_profile_is_catenoid(self):
        prof = cmc_profile(0.0, 0.0, math.pi / 4, math.sqrt(2.0), Interval(1.0, 3.0), step=0.05)
        for x, theta, phi in prof.rows():
            assert theta == pytest.approx(math.atan(1.0 / x), abs=1e-7)
            assert phi == pytest.approx(math.sqrt(x * x + 1.0), abs=1e-7)
        assert prof.rows()[0][0] == 1.0
        assert prof.rows()[-1][0] == 3.0

    def test_surface_has_requested_mean_curvature(self):
        prof = cmc_profile(0.3, 0.2, 1.0, 1.0, Interval(0.0, 1.0))
        S = cmc_surface(prof, Interval(0.0, 1.0))
        for p in [(0.25, 0.5), (0.5, 0.1), (0.75, 0.9)]:
            assert curvatures(S, p).H == pytest.approx(0.3, abs=1e-4)

    def test_singular_start(self):
        with pytest.raises(CmcSingularityError):
            cmc_profile(0.5, 1.0, 1.0, -1.0, Interval(0.0, 1.0))

    def test_singularity_reached_inside_span(self):
        # the unit sphere profile theta = x + 1, phi = sin(x + 1) reaches the axis at x = pi - 1
        with pytest.raises(CmcSingularityError) as err:
            cmc_profile(1.0, 0.0, 1.0, math.sin(1.0), Interval(0.0, 3.0))
        assert 1.5 < err.value.location < 3.0

    @pytest.mark.parametrize("theta0", [0.0, math.pi, 4.0])
    def test_initial_angle_out_of_range(self, theta0):
        with pytest.raises(AngleDomainError):
            cmc_profile(0.1, 0.0, theta0, 1.0, Interval(0.0, 1.0))


class TestCpdCriterion:
    def test_case1_is_cpd(self, case1_surface, small_grid):
        report = is_cpd(case1_surface, small_grid)
        assert report.is_cpd
        assert report.status == "canonical principal direction"

    def test_catenoid_gallery_is_cpd(self, small_grid):
        assert is_cpd(gallery("catenoid"), small_grid).is_cpd

    def test_helicoid_chart_is_not_adapted(self, small_grid):
        report = is_cpd(gallery("helicoid"), small_grid)
        assert not report.adapted
        assert not report.is_cpd
        assert report.status == "not in adapted coordinates"

    def test_enneper_is_not_cpd(self, small_grid):
        assert not is_cpd(gallery("enneper"), small_grid).is_cpd

    def test_perturbation_breaks_cpd(self, case1_surface, small_grid):
        report = is_cpd(perturbed(case1_surface), small_grid)
        assert not report.is_cpd
        assert report.max_theta_y > 1e-6
        assert report.max_alignment > 1e-6

    def test_angle_masking_counts_points(self, case1_surface):
        # theta = pi/2 on the column x = 0
        report = is_cpd(case1_surface, GridSpec(5, 4))
        assert report.masked == 4

    def test_theta_y_and_alignment_agree_in_adapted_charts(self, case1_surface, catenoid_c1, small_grid):
        sphere = sphere_cpd(1.0, 0.0, domain((0.3, 2.5), (0.0, 2.0 * math.pi)))
        for S in (case1_surface, catenoid_c1, sphere, gallery("catenoid")):
            report = is_cpd(S, small_grid)
            assert report.adapted
            assert (report.max_theta_y < 1e-6) == (report.max_alignment < 1e-6)
