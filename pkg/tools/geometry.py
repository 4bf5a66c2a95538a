"""
Differential geometry of parametrized surfaces, evaluated with second-order jets.

Everything here is computed from a ``ParamSurface`` whose immersion is
evaluated on jets seeded at a chart point. Position jets give the first and
second derivatives of r; tangent vectors r_x, r_y are lifted to first-order
jets, so the metric, the unit normal, the angle function and the tangent part
U of the fixed direction all come with exact first partials. Quantities that
need one more derivative (derivatives of A, of beta, Hessians of theta) are
obtained by central differences of those jet-level first partials.

Orientation: N = (r_x x r_y) / |r_x x r_y|. The shape operator is A = -dN,
so A = I^-1 II with II_ij = <r_ij, N>.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        def __str__(self) -> str:
            return str(self.value)

        def __format__(self, format_spec: str) -> str:
            return str(self.value).__format__(format_spec)

from . import jet
from .errors import ChartDomainError, ImmersionError
from .expr import Expr, eval_jet
from .jet import Jet2, Vec3
from .models import (
    AngleData,
    Christoffel,
    CurvatureData,
    Domain,
    FirstForm,
    FixedDirection,
    Point,
    SecondForm,
    Sym2x2,
)
from .numerics import eig_sym_generalized

ScalarField = Callable[[Jet2, Jet2], Jet2]
Immersion = Callable[[Jet2, Jet2], Vec3]

DEFAULT_DIRECTION = FixedDirection()
JET_FD_STEP = 1e-5
DEGENERATE_ANGLE = 1e-9


class CoordinateKind(StrEnum):
    GENERIC = "generic"
    ADAPTED = "adapted"
    ISOTHERMAL_MINIMAL = "isothermal-minimal"
    CANONICAL = "canonical"


@dataclass(frozen=True)
class ParamSurface:
    """
    A chart domain plus an immersion (x, y) -> R^3 evaluated on jets.

    ``angle`` is the claimed angle function of the chart (exact jets) when one
    is known in closed form or by construction, ``beta`` the claimed warping
    function of a canonical chart (metric dx^2 + beta^2 dy^2). Both are
    checked against the geometry, never trusted by it.
    """

    name: str
    domain: Domain
    immersion: Immersion = field(repr=False)
    kind: CoordinateKind = CoordinateKind.GENERIC
    angle: ScalarField | None = field(default=None, repr=False)
    angle_text: str | None = None
    beta: ScalarField | None = field(default=None, repr=False)
    chained: bool = False

    def evaluate(self, p: Point, *, check_domain: bool = True) -> Vec3:
        if check_domain and not self.domain.contains(p):
            raise ChartDomainError(f"{p} lies outside the chart domain of {self.name}: {self.domain.to_dict()}")
        return self.immersion(Jet2.var_x(p[0]), Jet2.var_y(p[1]))

    def position(self, p: Point) -> tuple[float, float, float]:
        return jet.values(self.evaluate(p))


@dataclass(frozen=True)
class SurfaceFrame:
    """Jets of r and the first-order jets of r_x, r_y at one chart point."""

    point: Point
    r: Vec3
    rx: Vec3
    ry: Vec3


def surface_frame(S: ParamSurface, p: Point, *, check_domain: bool = True) -> SurfaceFrame:
    r = S.evaluate(p, check_domain=check_domain)
    rx = (r[0].diff_x(), r[1].diff_x(), r[2].diff_x())
    ry = (r[0].diff_y(), r[1].diff_y(), r[2].diff_y())
    return SurfaceFrame(p, r, rx, ry)


@dataclass(frozen=True)
class MetricJets:
    E: Jet2
    F: Jet2
    G: Jet2

    @property
    def det(self) -> Jet2:
        return self.E * self.G - self.F * self.F

    def form(self) -> FirstForm:
        return FirstForm(self.E.val, self.F.val, self.G.val)


def metric_jets(fr: SurfaceFrame) -> MetricJets:
    m = MetricJets(jet.dot(fr.rx, fr.rx), jet.dot(fr.rx, fr.ry), jet.dot(fr.ry, fr.ry))
    if not m.det.val > 1e-14 * max(m.E.val * m.G.val, 1e-300):
        raise ImmersionError(f"degenerate metric (EG - F^2 = {m.det.val:.3e})", fr.point)
    return m


def normal_jets(fr: SurfaceFrame) -> Vec3:
    n = jet.cross(fr.rx, fr.ry)
    norm2 = jet.dot(n, n)
    if not norm2.val > 0.0:
        raise ImmersionError("r_x and r_y are parallel", fr.point)
    norm = jet.sqrt(norm2)
    return (n[0] / norm, n[1] / norm, n[2] / norm)


def first_form(S: ParamSurface, p: Point) -> FirstForm:
    return metric_jets(surface_frame(S, p)).form()


def unit_normal(S: ParamSurface, p: Point) -> tuple[float, float, float]:
    return jet.values(normal_jets(surface_frame(S, p)))


def second_form_from_frame(fr: SurfaceFrame, n: Vec3) -> SecondForm:
    nv = jet.values(n)
    e = sum(fr.r[i].dxx * nv[i] for i in range(3))
    f = sum(fr.r[i].dxy * nv[i] for i in range(3))
    g2 = sum(fr.r[i].dyy * nv[i] for i in range(3))
    return SecondForm(e, f, g2)


def second_form(S: ParamSurface, p: Point) -> SecondForm:
    fr = surface_frame(S, p)
    return second_form_from_frame(fr, normal_jets(fr))


def shape_matrix(form: FirstForm, ii: SecondForm) -> Sym2x2:
    d = form.det
    return Sym2x2(
        (form.G * ii.e - form.F * ii.f) / d,
        (form.G * ii.f - form.F * ii.g2) / d,
        (form.E * ii.f - form.F * ii.e) / d,
        (form.E * ii.g2 - form.F * ii.f) / d,
    )


def shape_operator(S: ParamSurface, p: Point, *, check_domain: bool = True) -> Sym2x2:
    """Matrix of A in the coordinate basis (columns are A d/dx, A d/dy)."""
    fr = surface_frame(S, p, check_domain=check_domain)
    m = metric_jets(fr)
    return shape_matrix(m.form(), second_form_from_frame(fr, normal_jets(fr)))


def curvatures(S: ParamSurface, p: Point) -> CurvatureData:
    fr = surface_frame(S, p)
    form = metric_jets(fr).form()
    a = shape_matrix(form, second_form_from_frame(fr, normal_jets(fr)))
    eig = eig_sym_generalized(a, form)
    return CurvatureData(
        K=a.det,
        H=0.5 * a.trace,
        kappa1=eig.first.value,
        kappa2=eig.second.value,
        dir1=eig.first.vector,
        dir2=eig.second.vector,
        umbilic=eig.umbilic,
    )


@dataclass(frozen=True)
class AngleJets:
    """cos(theta), theta and the coordinates of U as first-order jets."""

    cos_theta: Jet2
    theta: Jet2
    u1: Jet2
    u2: Jet2
    degenerate: bool


def angle_jets(fr: SurfaceFrame, m: MetricJets, n: Vec3, k: FixedDirection) -> AngleJets:
    c = jet.dot_const(n, k.k)
    cv = min(1.0, max(-1.0, c.val))
    theta_val = math.acos(cv)
    s = math.sin(theta_val)
    degenerate = theta_val < DEGENERATE_ANGLE or math.pi - theta_val < DEGENERATE_ANGLE
    if degenerate:
        theta = Jet2(theta_val)
    else:
        theta = Jet2(theta_val, -c.dx / s, -c.dy / s)

    # U = k - cos(theta) N solved in the coordinate basis from the Gram system
    b1 = jet.dot_const(fr.rx, k.k)
    b2 = jet.dot_const(fr.ry, k.k)
    det = m.det
    u1 = (m.G * b1 - m.F * b2) / det
    u2 = (m.E * b2 - m.F * b1) / det
    return AngleJets(c, theta, u1, u2, degenerate)


def angle_data(S: ParamSurface, p: Point, k: FixedDirection = DEFAULT_DIRECTION) -> AngleData:
    fr = surface_frame(S, p)
    m = metric_jets(fr)
    aj = angle_jets(fr, m, normal_jets(fr), k)
    form = m.form()
    grad = form.raise_index((aj.theta.dx, aj.theta.dy))
    return AngleData(
        theta=aj.theta.val,
        cos_theta=aj.cos_theta.val,
        U=(aj.u1.val, aj.u2.val),
        grad_theta=grad,
        theta_x=aj.theta.dx,
        theta_y=aj.theta.dy,
        degenerate=aj.degenerate,
    )


def christoffel_from_metric(m: MetricJets) -> Christoffel:
    E, F, G = m.E, m.F, m.G
    d2 = 2.0 * m.det.val
    return Christoffel(
        x_xx=(G.val * E.dx - 2.0 * F.val * F.dx + F.val * E.dy) / d2,
        y_xx=(2.0 * E.val * F.dx - E.val * E.dy - F.val * E.dx) / d2,
        x_xy=(G.val * E.dy - F.val * G.dx) / d2,
        y_xy=(E.val * G.dx - F.val * E.dy) / d2,
        x_yy=(2.0 * G.val * F.dy - G.val * G.dx - F.val * G.dy) / d2,
        y_yy=(E.val * G.dy - 2.0 * F.val * F.dy + F.val * G.dx) / d2,
    )


def christoffel(S: ParamSurface, p: Point) -> Christoffel:
    return christoffel_from_metric(metric_jets(surface_frame(S, p)))


def _laplacian(form: FirstForm, gamma: Christoffel, grad: tuple[float, float], hess: Sym2x2) -> float:
    # Delta f = g^ij (f_ij - Gamma^k_ij f_k)
    d = form.det
    gi = ((form.G / d, -form.F / d), (-form.F / d, form.E / d))
    h = ((hess.a11, hess.a12), (hess.a21, hess.a22))
    total = 0.0
    for i in range(2):
        for j in range(2):
            cov = h[i][j] - gamma.gamma(0, i, j) * grad[0] - gamma.gamma(1, i, j) * grad[1]
            total += gi[i][j] * cov
    return total


def laplace_beltrami(S: ParamSurface, f: Expr | ScalarField, p: Point) -> float:
    """Laplace-Beltrami operator of a chart function, (1/sqrt g) d_i (sqrt g g^ij d_j f)."""
    m = metric_jets(surface_frame(S, p))
    fj = eval_jet(f, Jet2.var_x(p[0]), Jet2.var_y(p[1])) if not callable(f) else f(Jet2.var_x(p[0]), Jet2.var_y(p[1]))
    hess = Sym2x2(fj.dxx, fj.dxy, fj.dxy, fj.dyy)
    return _laplacian(m.form(), christoffel_from_metric(m), (fj.dx, fj.dy), hess)


# --- quantities needing one derivative beyond the jets -------------------------


def central_difference(
    fn: Callable[[Point], tuple[float, ...]], p: Point, h: float = JET_FD_STEP
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Central differences of a vector-valued chart function along x and along y."""
    xp, xm = fn((p[0] + h, p[1])), fn((p[0] - h, p[1]))
    yp, ym = fn((p[0], p[1] + h)), fn((p[0], p[1] - h))
    ddx = tuple((a - b) / (2.0 * h) for a, b in zip(xp, xm, strict=True))
    ddy = tuple((a - b) / (2.0 * h) for a, b in zip(yp, ym, strict=True))
    return ddx, ddy


def _shape_tuple(S: ParamSurface, p: Point) -> tuple[float, ...]:
    a = shape_operator(S, p, check_domain=False)
    return (a.a11, a.a12, a.a21, a.a22)


def codazzi_residual(S: ParamSurface, p: Point, h: float = JET_FD_STEP) -> float:
    """|(nabla_x A) d/dy - (nabla_y A) d/dx|_g from differenced jet-level A."""
    fr = surface_frame(S, p)
    m = metric_jets(fr)
    form = m.form()
    a = shape_matrix(form, second_form_from_frame(fr, normal_jets(fr)))
    gam = christoffel_from_metric(m)
    (ax11, ax12, ax21, ax22), (ay11, ay12, ay21, ay22) = central_difference(lambda q: _shape_tuple(S, q), p, h)
    mat = ((a.a11, a.a12), (a.a21, a.a22))
    d_x = ((ax11, ax12), (ax21, ax22))
    d_y = ((ay11, ay12), (ay21, ay22))

    res = [0.0, 0.0]
    for i in range(2):
        # d_x A^i_y - d_y A^i_x + Gamma^i_{xl} A^l_y - Gamma^i_{yl} A^l_x
        val = d_x[i][1] - d_y[i][0]
        for l_ in range(2):
            val += gam.gamma(i, 0, l_) * mat[l_][1] - gam.gamma(i, 1, l_) * mat[l_][0]
        res[i] = val
    return form.norm((res[0], res[1]))


def theta_gradient(S: ParamSurface, p: Point, k: FixedDirection = DEFAULT_DIRECTION) -> tuple[float, float]:
    fr = surface_frame(S, p, check_domain=False)
    m = metric_jets(fr)
    aj = angle_jets(fr, m, normal_jets(fr), k)
    return (aj.theta.dx, aj.theta.dy)


def theta_hessian(S: ParamSurface, p: Point, k: FixedDirection = DEFAULT_DIRECTION, h: float = JET_FD_STEP) -> Sym2x2:
    (txx, tyx), (txy, tyy) = central_difference(lambda q: theta_gradient(S, q, k), p, h)
    mixed = 0.5 * (tyx + txy)
    return Sym2x2(txx, mixed, mixed, tyy)


def _log_tan_half_gradient(S: ParamSurface, p: Point, k: FixedDirection) -> tuple[float, float]:
    fr = surface_frame(S, p, check_domain=False)
    m = metric_jets(fr)
    aj = angle_jets(fr, m, normal_jets(fr), k)
    s = math.sin(aj.theta.val)
    return (aj.theta.dx / s, aj.theta.dy / s)


def log_tan_half_laplacian(S: ParamSurface, p: Point, k: FixedDirection = DEFAULT_DIRECTION, h: float = JET_FD_STEP) -> float:
    """Delta log tan(theta/2) with the gradient from jets and the Hessian by differencing it."""
    fr = surface_frame(S, p)
    m = metric_jets(fr)
    grad = _log_tan_half_gradient(S, p, k)
    (lxx, lyx), (lxy, lyy) = central_difference(lambda q: _log_tan_half_gradient(S, q, k), p, h)
    mixed = 0.5 * (lyx + lxy)
    return _laplacian(m.form(), christoffel_from_metric(m), grad, Sym2x2(lxx, mixed, mixed, lyy))


def beta_jets(S: ParamSurface, p: Point) -> Jet2:
    """Geometric warping function sqrt(G) as a first-order jet."""
    m = metric_jets(surface_frame(S, p, check_domain=False))
    return jet.sqrt(m.G)


def beta_second_x(S: ParamSurface, p: Point, h: float = JET_FD_STEP) -> float:
    return (beta_jets(S, (p[0] + h, p[1])).dx - beta_jets(S, (p[0] - h, p[1])).dx) / (2.0 * h)


EXCLUDED_ANGLES = (0.0, 0.5 * math.pi, math.pi)


def excluded_angle(theta: float, radius: float) -> bool:
    """True when theta is within radius of 0, pi/2 or pi (the constant-angle and vertical cases)."""
    return any(abs(theta - t) < radius for t in EXCLUDED_ANGLES)


def alignment_defect(S: ParamSurface, p: Point, k: FixedDirection = DEFAULT_DIRECTION) -> float:
    """|AU ^ U|_g / |U|^2_g: the sine of the angle between AU and U, scaled by |AU|/|U|."""
    fr = surface_frame(S, p)
    m = metric_jets(fr)
    form = m.form()
    a = shape_matrix(form, second_form_from_frame(fr, normal_jets(fr)))
    aj = angle_jets(fr, m, normal_jets(fr), k)
    u = (aj.u1.val, aj.u2.val)
    au = a.apply(u)
    u2 = form.inner(u, u)
    if u2 <= 0.0:
        return 0.0
    return math.sqrt(form.det) * abs(au[0] * u[1] - au[1] * u[0]) / u2


def u_alignment(S: ParamSurface, p: Point, k: FixedDirection = DEFAULT_DIRECTION) -> float:
    """|U^y| sqrt(G) / |U|_g; zero exactly when U is collinear with d/dx."""
    fr = surface_frame(S, p)
    m = metric_jets(fr)
    aj = angle_jets(fr, m, normal_jets(fr), k)
    form = m.form()
    norm = form.norm((aj.u1.val, aj.u2.val))
    if norm == 0.0:
        return 0.0
    # component of U orthogonal to d/dx, measured in g
    perp = math.sqrt(form.det / form.E) * abs(aj.u2.val)
    return perp / norm
