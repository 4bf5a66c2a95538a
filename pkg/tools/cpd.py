"""
Constructors for surfaces with a canonical principal direction.

Case 1 surfaces are r(x, y) = (phi(x) cos y + g1(y), phi(x) sin y + g2(y), h(x)) with
phi' = cos(theta), h' = sin(theta), g' = psi(y) (-sin y, cos y). Case 2 surfaces
are the flat cylinders over the same profile curve. Integrals are evaluated by
adaptive quadrature; their jets come from the integrand (first partials exact,
second partials from the integrand's own jet).
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import CubicSpline

from . import jet
from .errors import AngleDomainError, CmcSingularityError, ConstructionError, DegenerateImmersionError, OdeIntegrationError
from .expr import Expr, eval_jet, parse, require_variables, to_text
from .geometry import (
    DEFAULT_DIRECTION,
    CoordinateKind,
    ParamSurface,
    alignment_defect,
    angle_data,
    excluded_angle,
    u_alignment,
)
from .jet import Jet2, Vec3
from .models import Domain, FixedDirection, GridSpec, Interval
from .numerics import Trajectory, ode_rk_adaptive, quad_adaptive

logger = logging.getLogger("cpd_surfaces.cpd")

DEFAULT_QUAD_TOL = 1e-10
THETA_SAMPLES = 101
ANGLE_WARN_RADIUS = 1e-6
CMC_SINGULAR_RADIUS = 1e-9


# --- one-variable profiles ------------------------------------------------------


@dataclass(frozen=True)
class ExprProfile:
    """A one-variable function given by an expression in ``var``."""

    expr: Expr
    var: str = "x"

    def __post_init__(self) -> None:
        require_variables(self.expr, {self.var})

    @classmethod
    def parse(cls, text: str, var: str = "x") -> "ExprProfile":
        return cls(parse(text), var)

    @classmethod
    def constant(cls, c: float, var: str = "x") -> "ExprProfile":
        return cls(parse(repr(float(c))), var)

    @property
    def text(self) -> str:
        return to_text(self.expr)

    def __call__(self, t: Jet2) -> Jet2:
        if self.var == "x":
            return eval_jet(self.expr, t, Jet2(0.0))
        return eval_jet(self.expr, Jet2(0.0), t)


@dataclass(frozen=True, eq=False)
class TabulatedProfile:
    """Cubic spline (not-a-knot ends) through tabulated samples."""

    knots: NDArray[np.float64] = field(repr=False)
    values: NDArray[np.float64] = field(repr=False)
    spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "spline", CubicSpline(self.knots, self.values, bc_type="not-a-knot"))

    @property
    def text(self) -> str:
        return f"<tabulated, {len(self.knots)} knots on [{self.knots[0]}, {self.knots[-1]}]>"

    def __call__(self, t: Jet2) -> Jet2:
        v = t.val
        return t.compose(float(self.spline(v)), float(self.spline(v, 1)), float(self.spline(v, 2)))


Profile = ExprProfile | TabulatedProfile


class Primitive:
    """
    P(t) = base_value + int_base^t g(s) ds for a one-variable integrand g on jets.

    Values are cached per abscissa; ``lru_cache`` is safe to call from several
    threads (at worst a value is computed twice).
    """

    def __init__(self, integrand: Callable[[Jet2], Jet2], base: float, base_value: float, tol: float):
        self.integrand = integrand
        self.base = base
        self.base_value = base_value
        self.tol = tol
        self.value = lru_cache(maxsize=4096)(self._value)

    def _value(self, t: float) -> float:
        if t == self.base:
            return self.base_value

        def g(s: float) -> float:
            return self.integrand(Jet2(s)).val

        lo, hi = (self.base, t) if t > self.base else (t, self.base)
        area = quad_adaptive(g, Interval(lo, hi), self.tol)
        return self.base_value + (area if t > self.base else -area)

    def __call__(self, t: Jet2) -> Jet2:
        g = self.integrand(Jet2.var_x(t.val))
        return t.compose(self.value(t.val), g.val, g.dx)


# --- Case 1 / Case 2 ----------------------------------------------------------


@dataclass(frozen=True)
class Case1Spec:
    """
    Inputs of a Case 1 surface.

    ``x0`` is the base point of the x-integrals and ``phi0`` the value of phi
    there; the defaults give phi(0) = 0.
    """

    theta: Profile
    psi: Profile
    domain: Domain
    quad_tol: float = DEFAULT_QUAD_TOL
    x0: float = 0.0
    phi0: float = 0.0
    theta_samples: int = THETA_SAMPLES

    @classmethod
    def from_text(cls, theta: str, psi: str, domain: Domain, **kwargs: Any) -> "Case1Spec":
        return cls(ExprProfile.parse(theta, "x"), ExprProfile.parse(psi, "y"), domain, **kwargs)


@dataclass(frozen=True)
class Case2Spec:
    theta: Profile
    y0: float
    domain: Domain
    quad_tol: float = DEFAULT_QUAD_TOL
    theta_samples: int = THETA_SAMPLES

    @classmethod
    def from_text(cls, theta: str, y0: float, domain: Domain, **kwargs: Any) -> "Case2Spec":
        return cls(ExprProfile.parse(theta, "x"), y0, domain, **kwargs)


def _validate_theta(theta: Profile, span: Interval, samples: int) -> None:
    xs = np.linspace(span.lo, span.hi, samples)
    suspicious: list[float] = []
    for x in xs:
        th = theta(Jet2(float(x))).val
        if not 0.0 < th < math.pi:
            raise AngleDomainError(float(x), th)
        if abs(th) < ANGLE_WARN_RADIUS or abs(th - 0.5 * math.pi) < ANGLE_WARN_RADIUS:
            suspicious.append(float(x))
    if suspicious:
        shown = ", ".join(f"{x:.6g}" for x in suspicious[:5])
        logger.warning(f"Angle function hits an excluded value at {len(suspicious)} sample(s): x = {shown}")


def _profile_curve(theta: Profile, x0: float, phi0: float, tol: float) -> tuple[Primitive, Primitive]:
    phi = Primitive(lambda t: jet.cos(theta(t)), x0, phi0, tol)
    height = Primitive(lambda t: jet.sin(theta(t)), x0, 0.0, tol)
    return phi, height


def build_case1(spec: Case1Spec) -> ParamSurface:
    """
    Build the Case 1 surface in canonical coordinates.

    Raises:
        AngleDomainError: theta leaves (0, pi) on a sample of the domain
        DegenerateImmersionError: beta = phi + psi is not positive somewhere
    """
    _validate_theta(spec.theta, spec.domain.x, spec.theta_samples)
    theta, psi = spec.theta, spec.psi
    phi, height = _profile_curve(theta, spec.x0, spec.phi0, spec.quad_tol)
    gamma1 = Primitive(lambda t: -psi(t) * jet.sin(t), 0.0, 0.0, spec.quad_tol)
    gamma2 = Primitive(lambda t: psi(t) * jet.cos(t), 0.0, 0.0, spec.quad_tol)

    xs = np.linspace(spec.domain.x.lo, spec.domain.x.hi, spec.theta_samples)
    ys = np.linspace(spec.domain.y.lo, spec.domain.y.hi, spec.theta_samples)
    phis = [phi.value(float(x)) for x in xs]
    psis = [psi(Jet2(float(y))).val for y in ys]
    i, j = int(np.argmin(phis)), int(np.argmin(psis))
    if phis[i] + psis[j] <= 0.0:
        raise DegenerateImmersionError(
            f"beta = phi + psi = {phis[i] + psis[j]:.6g} is not positive", (float(xs[i]), float(ys[j]))
        )

    def immersion(x: Jet2, y: Jet2) -> Vec3:
        p = phi(x)
        return (p * jet.cos(y) + gamma1(y), p * jet.sin(y) + gamma2(y), height(x))

    def angle(x: Jet2, y: Jet2) -> Jet2:
        return theta(x)

    def beta(x: Jet2, y: Jet2) -> Jet2:
        return phi(x) + psi(y)

    logger.debug(f"Case 1 surface: theta = {theta.text}, psi = {psi.text}")
    return ParamSurface(
        name="case1",
        domain=spec.domain,
        immersion=immersion,
        kind=CoordinateKind.CANONICAL,
        angle=angle,
        angle_text=theta.text,
        beta=beta,
    )


def build_case2(spec: Case2Spec) -> ParamSurface:
    """Build the flat cylinder over the profile curve, ruled along v0 = (-sin y0, cos y0, 0)."""
    _validate_theta(spec.theta, spec.domain.x, spec.theta_samples)
    theta = spec.theta
    phi, height = _profile_curve(theta, 0.0, 0.0, spec.quad_tol)
    c0, s0 = math.cos(spec.y0), math.sin(spec.y0)

    def immersion(x: Jet2, y: Jet2) -> Vec3:
        p = phi(x)
        return (p * c0 - y * s0, p * s0 + y * c0, height(x))

    def angle(x: Jet2, y: Jet2) -> Jet2:
        return theta(x)

    def beta(x: Jet2, y: Jet2) -> Jet2:
        return Jet2(1.0)

    return ParamSurface(
        name="case2",
        domain=spec.domain,
        immersion=immersion,
        kind=CoordinateKind.CANONICAL,
        angle=angle,
        angle_text=theta.text,
        beta=beta,
    )


# --- closed forms ----------------------------------------------------------------


def catenoid_cpd(c: float, domain: Domain) -> ParamSurface:
    """
    r = (rho cos y, sgn(c) rho sin y, |c| log(x + rho)) with rho = sqrt(x^2 + c^2).

    For c < 0 this is the |c| catenoid reflected in the xz-plane, so the normal
    flips and the angle is pi - theta_|c|, i.e. atan(c/x) read in (0, pi).
    """
    if c == 0.0:
        raise ConstructionError("catenoid parameter c must be nonzero (c = 0 degenerates to a plane)")

    c2 = c * c
    sign = 1.0 if c > 0.0 else -1.0

    def immersion(x: Jet2, y: Jet2) -> Vec3:
        rho = jet.sqrt(x * x + c2)
        return (rho * jet.cos(y), sign * rho * jet.sin(y), abs(c) * jet.log(x + rho))

    def beta(x: Jet2, y: Jet2) -> Jet2:
        return jet.sqrt(x * x + c2)

    if domain.x.lo > 0.0:
        angle_text = f"atan({c!r}/x)" if c > 0.0 else f"pi - atan({-c!r}/x)"
    else:
        angle_text = f"acos({'' if c > 0.0 else '-'}x/sqrt(x^2 + {c2!r}))"
    angle_expr = parse(angle_text)

    def angle(x: Jet2, y: Jet2) -> Jet2:
        return eval_jet(angle_expr, x, y)

    return ParamSurface(
        name=f"catenoid_cpd(c={c!r})",
        domain=domain,
        immersion=immersion,
        kind=CoordinateKind.CANONICAL,
        angle=angle,
        angle_text=angle_text,
        beta=beta,
    )


def sphere_cpd(a: float, b: float, domain: Domain, quad_tol: float = DEFAULT_QUAD_TOL) -> ParamSurface:
    """
    Umbilic Case 1 surface with theta = a x + b.

    Uses the primitive phi = sin(a x + b) / a and psi = 0, so that beta = sin(theta)/a
    and the surface is a piece of the sphere of radius 1/a.
    """
    if a == 0.0:
        raise ConstructionError("sphere_cpd needs a != 0 (a = 0 gives a constant angle)")
    spec = Case1Spec(
        theta=ExprProfile.parse(f"{a!r}*x + {b!r}", "x"),
        psi=ExprProfile.constant(0.0, "y"),
        domain=domain,
        quad_tol=quad_tol,
        phi0=math.sin(b) / a,
    )
    return replace(build_case1(spec), name=f"sphere_cpd(a={a!r}, b={b!r})")


def sphere_center(a: float, b: float) -> tuple[float, float, float]:
    """Center of the sphere_cpd(a, b) surface: r + N / a, constant over the chart."""
    return (0.0, 0.0, math.cos(b) / a)


# --- CMC profiles ----------------------------------------------------------------


@dataclass(frozen=True)
class CmcProfile:
    """Solution of theta' = 2H - sin(theta)/(phi + psi0), phi' = cos(theta)."""

    H: float
    psi0: float
    theta0: float
    phi0: float
    span: Interval
    table: NDArray[np.float64] = field(repr=False)
    trajectory: Trajectory = field(repr=False, compare=False)

    @property
    def theta(self) -> TabulatedProfile:
        return TabulatedProfile(self.table[:, 0], self.table[:, 1])

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(x), float(t), float(p)) for x, t, p in self.table]


def cmc_profile(
    H: float,
    psi0: float,
    theta0: float,
    phi0: float,
    span: Interval,
    tol: float = 1e-10,
    step: float = 1e-3,
) -> CmcProfile:
    """
    Integrate the angle profile of a constant-mean-curvature Case 1 surface.

    Args:
        H: Target mean curvature
        psi0: Constant value of psi
        theta0: theta at span.lo, in (0, pi)
        phi0: phi at span.lo; phi0 + psi0 must not vanish
        span: Integration interval in x
        tol: ODE tolerance
        step: Spacing of the returned table

    Returns:
        CmcProfile with the table (x, theta, phi) sampled every ``step``

    Raises:
        CmcSingularityError: phi + psi0 reached zero inside the span
    """
    if not 0.0 < theta0 < math.pi:
        raise AngleDomainError(span.lo, theta0)
    if phi0 + psi0 == 0.0:
        raise CmcSingularityError(span.lo)

    def rhs(t: float, y: NDArray[np.float64]) -> list[float]:
        th, ph = y
        return [2.0 * H - math.sin(th) / (ph + psi0), math.cos(th)]

    sign = 1.0 if phi0 + psi0 > 0.0 else -1.0

    def singular(t: float, y: NDArray[np.float64]) -> float:
        return sign * (y[1] + psi0) - CMC_SINGULAR_RADIUS

    try:
        traj = ode_rk_adaptive(rhs, [theta0, phi0], span, tol, singular=singular)
    except OdeIntegrationError as e:
        raise CmcSingularityError(e.location) from e

    xs, ys = traj.sample(step)
    table = np.column_stack([xs, ys[0], ys[1]])
    logger.debug(f"CMC profile H={H}: {len(xs)} rows on [{span.lo}, {span.hi}]")
    return CmcProfile(H, psi0, theta0, phi0, span, table, traj)


def cmc_surface(profile: CmcProfile, y: Interval, quad_tol: float = DEFAULT_QUAD_TOL) -> ParamSurface:
    """Case 1 surface whose angle is the spline through the CMC table and psi = psi0."""
    spec = Case1Spec(
        theta=profile.theta,
        psi=ExprProfile.constant(profile.psi0, "y"),
        domain=Domain(profile.span, y),
        quad_tol=quad_tol,
        x0=profile.span.lo,
        phi0=profile.phi0,
    )
    return replace(build_case1(spec), name=f"cmc(H={profile.H!r})")


# --- canonical principal direction criterion -------------------------------------


@dataclass(frozen=True)
class CpdReport:
    is_cpd: bool
    adapted: bool
    max_theta_y: float
    max_alignment: float
    status: str
    masked: int = 0

    def to_dict(self) -> dict[str, object]:
        return {
            "is_cpd": self.is_cpd,
            "adapted": self.adapted,
            "max_theta_y": self.max_theta_y,
            "max_alignment": self.max_alignment,
            "status": self.status,
            "masked": self.masked,
        }


def is_cpd(
    S: ParamSurface,
    grid: GridSpec,
    tol: float = 1e-6,
    k: FixedDirection = DEFAULT_DIRECTION,
    mask_radius: float = ANGLE_WARN_RADIUS,
) -> CpdReport:
    """
    Decide whether U is a principal direction, via theta_y = 0 in a chart with U along d/dx.

    The report is always returned: a chart where U is not collinear with d/dx
    gives status ``not in adapted coordinates`` and is_cpd = False.
    """
    max_ty = 0.0
    max_align = 0.0
    max_u = 0.0
    masked = 0
    for p in grid.points(S.domain):
        ad = angle_data(S, p, k)
        if ad.degenerate or excluded_angle(ad.theta, mask_radius):
            masked += 1
            continue
        max_ty = max(max_ty, abs(ad.theta_y))
        max_align = max(max_align, alignment_defect(S, p, k))
        max_u = max(max_u, u_alignment(S, p, k))

    adapted = max_u < tol
    if not adapted:
        status = "not in adapted coordinates"
    elif max_ty < tol and max_align < tol:
        status = "canonical principal direction"
    else:
        status = "U is not a principal direction"
    return CpdReport(
        is_cpd=adapted and max_ty < tol and max_align < tol,
        adapted=adapted,
        max_theta_y=max_ty,
        max_alignment=max_align,
        status=status,
        masked=masked,
    )
