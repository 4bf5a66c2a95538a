"""
Named example surfaces and angle fields of minimal surfaces.

Gallery names are stable identifiers used by the CLI and by surface spec files.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

from . import jet
from .errors import ChartDomainError, NotMinimalError
from .expr import BinOp, Call, Expr, Num, eval_jet, field, free_variables, parse, to_text
from .geometry import (
    CoordinateKind,
    ParamSurface,
    angle_data,
    curvatures,
    excluded_angle,
    log_tan_half_laplacian,
)
from .jet import Jet2, Vec3
from .models import Domain, GridSpec, Point, domain

logger = logging.getLogger("cpd_surfaces.gallery")

MINIMAL_TOL = 1e-6
TWO_PI = 2.0 * math.pi


def _helicoid(u: Jet2, v: Jet2) -> Vec3:
    return (u * jet.cos(v), u * jet.sin(v), v)


def _catenoid(u: Jet2, v: Jet2) -> Vec3:
    ch = jet.cosh(u)
    return (ch * jet.cos(v), ch * jet.sin(v), u)


def _enneper(u: Jet2, v: Jet2) -> Vec3:
    return (
        u - u * u * u * (1.0 / 3.0) + u * v * v,
        -v + v * v * v * (1.0 / 3.0) - u * u * v,
        u * u - v * v,
    )


def _scherk(u: Jet2, v: Jet2) -> Vec3:
    return (u, v, jet.log(jet.cos(u)) - jet.log(jet.cos(v)))


def _scherk_isothermal(x: Jet2, y: Jet2) -> Vec3:
    d = 1.0 - x * x - y * y
    return _scherk(jet.atan(2.0 * x / d), jet.atan(-2.0 * y / d))


def _helicoid_isothermal(x: Jet2, y: Jet2) -> Vec3:
    return _helicoid(jet.sinh(x), y)


def _no_check(dom: Domain) -> None:
    pass


def _check_enneper(dom: Domain) -> None:
    if dom.contains((0.0, 0.0), slack=0.0):
        raise ChartDomainError("Enneper chart excludes (u, v) = (0, 0)")


def _check_scherk(dom: Domain) -> None:
    half = 0.5 * math.pi
    if max(abs(dom.x.lo), abs(dom.x.hi), abs(dom.y.lo), abs(dom.y.hi)) >= half:
        raise ChartDomainError(f"Scherk chart needs |u|, |v| < pi/2, got {dom.to_dict()}")


def _check_scherk_isothermal(dom: Domain) -> None:
    r2 = max(abs(dom.x.lo), abs(dom.x.hi)) ** 2 + max(abs(dom.y.lo), abs(dom.y.hi)) ** 2
    if r2 >= 1.0:
        raise ChartDomainError(f"isothermal Scherk chart needs x^2 + y^2 < 1, domain reaches {r2:.6g}")


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    immersion: Callable[[Jet2, Jet2], Vec3]
    default_domain: Domain
    kind: CoordinateKind
    angle_text: str | None
    check: Callable[[Domain], None] = _no_check
    chained: bool = False


GALLERY: dict[str, GalleryEntry] = {
    e.name: e
    for e in (
        GalleryEntry(
            "helicoid",
            _helicoid,
            domain((0.1, 2.0), (0.0, TWO_PI)),
            CoordinateKind.GENERIC,
            "2*atan(sqrt(x^2 + 1) - x)",
        ),
        GalleryEntry(
            "catenoid",
            _catenoid,
            domain((0.1, 1.5), (0.0, TWO_PI)),
            CoordinateKind.ISOTHERMAL_MINIMAL,
            "2*atan(exp(-x))",
        ),
        GalleryEntry(
            "enneper",
            _enneper,
            domain((0.2, 2.0), (0.2, 2.0)),
            CoordinateKind.ISOTHERMAL_MINIMAL,
            "2*atan(1/sqrt(x^2 + y^2))",
            _check_enneper,
        ),
        GalleryEntry(
            "scherk",
            _scherk,
            domain((0.1, 1.2), (0.1, 1.2)),
            CoordinateKind.GENERIC,
            "acos((1/cos(x)^2 + 1/cos(y)^2 - 1)^(-0.5))",
            _check_scherk,
        ),
        GalleryEntry(
            "scherk_isothermal",
            _scherk_isothermal,
            domain((-0.63, 0.63), (-0.63, 0.63)),
            CoordinateKind.ISOTHERMAL_MINIMAL,
            None,
            _check_scherk_isothermal,
            chained=True,
        ),
        GalleryEntry(
            "helicoid_isothermal",
            _helicoid_isothermal,
            domain((0.1, 1.5), (0.0, TWO_PI)),
            CoordinateKind.ISOTHERMAL_MINIMAL,
            "2*atan(exp(-x))",
        ),
    )
}

GALLERY_NAMES = tuple(GALLERY)


def gallery(name: str, dom: Domain | None = None) -> ParamSurface:
    """
    Build a named example surface.

    Args:
        name: One of GALLERY_NAMES
        dom: Chart domain; the entry's default domain when omitted

    Raises:
        ChartDomainError: the domain leaves the chart's validity region
    """
    if name not in GALLERY:
        raise ValueError(f"unknown gallery surface '{name}' (choose from {', '.join(GALLERY_NAMES)})")
    entry = GALLERY[name]
    dom = dom or entry.default_domain
    entry.check(dom)

    angle = field(parse(entry.angle_text)) if entry.angle_text is not None else None

    return ParamSurface(
        name=name,
        domain=dom,
        immersion=entry.immersion,
        kind=entry.kind,
        angle=angle,
        angle_text=entry.angle_text,
        chained=entry.chained,
    )


# --- angle fields of minimal surfaces ---------------------------------------------


@dataclass(frozen=True)
class AngleField:
    """An angle function theta(x, y) given by an expression."""

    theta: Expr
    domain: Domain | None = None

    @property
    def text(self) -> str:
        return to_text(self.theta)

    def jet(self, p: Point) -> Jet2:
        return eval_jet(self.theta, Jet2.var_x(p[0]), Jet2.var_y(p[1]))

    def value(self, p: Point) -> float:
        return self.jet(p).val


def theta_from_harmonic(f: Expr | str, dom: Domain | None = None) -> AngleField:
    """theta = 2 atan(exp(f)); for harmonic f this solves the minimal-surface angle equation."""
    if isinstance(f, str):
        f = parse(f)
    if not free_variables(f):
        logger.warning(f"Constant f = {to_text(f)} gives a constant angle field (excluded case)")
    theta = BinOp("*", Num(2.0), Call("atan", Call("exp", f)))
    return AngleField(theta, dom)


def minimal_angle_pde_residual(angle_field: AngleField, p: Point) -> float:
    """cos(theta) |grad theta|^2 - sin(theta) (theta_xx + theta_yy) in flat chart derivatives."""
    t = angle_field.jet(p)
    return math.cos(t.val) * (t.dx * t.dx + t.dy * t.dy) - math.sin(t.val) * (t.dxx + t.dyy)


def log_tan_half_harmonicity(S: ParamSurface, grid: GridSpec, mask_radius: float = 1e-6) -> float:
    """
    Max over the grid of |Laplace-Beltrami of log tan(theta/2)|.

    Raises:
        NotMinimalError: max |H| on the grid reaches MINIMAL_TOL
    """
    points = grid.points(S.domain)
    max_h = max(abs(curvatures(S, p).H) for p in points)
    if max_h >= MINIMAL_TOL:
        raise NotMinimalError(max_h)

    worst = 0.0
    for p in points:
        if excluded_angle(angle_data(S, p).theta, mask_radius):
            continue
        worst = max(worst, abs(log_tan_half_laplacian(S, p)))
    return worst
