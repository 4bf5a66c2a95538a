"""
Residual suites over sampling grids, and the surface classifier.

Every check is evaluated point by point on a GridSpec; points whose angle is
within the mask radius of 0, pi/2 or pi are skipped and counted. Grid order is
fixed (y outer, x inner) and reductions run over that order, so reports are
identical whatever the thread count.
"""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, TypeVar

import numpy as np

from config import ToleranceConfig
from tools.cpd import CpdReport, is_cpd
from tools.errors import ClassificationInconsistencyError
from tools.geometry import (
    DEFAULT_DIRECTION,
    JET_FD_STEP,
    CoordinateKind,
    MetricJets,
    ParamSurface,
    angle_jets,
    beta_jets,
    beta_second_x,
    christoffel_from_metric,
    codazzi_residual,
    curvatures,
    excluded_angle,
    log_tan_half_laplacian,
    metric_jets,
    normal_jets,
    second_form_from_frame,
    shape_matrix,
    surface_frame,
    theta_hessian,
    u_alignment,
)
from tools.jet import Jet2
from tools.models import FixedDirection, GridSpec, Point, Sym2x2
from tools.numerics import eig_sym_generalized

logger = logging.getLogger("cpd_surfaces.verify")

T = TypeVar("T")

# check id -> tolerance key in ToleranceConfig
CHECK_TOLERANCES: dict[str, str] = {
    "self_adjoint": "first_order",
    "curvature_consistency": "first_order",
    "gauss_equation": "second_order",
    "unit_decomposition": "first_order",
    "angle_formula": "first_order",
    "levi_civita_U": "first_order",
    "dcos_theta": "first_order",
    "AU_grad_theta": "first_order",
    "codazzi": "codazzi_hard",
    "canonical_metric": "first_order",
    "canonical_shape": "second_order",
    "canonical_codazzi_pde": "second_order",
    "canonical_theta_y": "first_order",
    "adapted_metric": "first_order",
    "adapted_shape": "second_order",
    "adapted_codazzi_pde": "second_order",
    "isothermal_metric": "first_order",
    "minimal_angle_pde": "second_order",
    "log_tan_half_harmonic": "second_order",
    "minimal_shape_pattern": "first_order",
}


@dataclass
class CheckRecord:
    check: str
    max_residual: float
    mean_residual: float
    worst_point: Point
    tolerance: float
    passed: bool
    points: int
    advisory: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "worst_point": list(self.worst_point),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "points": self.points,
            "advisory": self.advisory,
        }


@dataclass
class VerificationReport:
    surface: str
    kind: str
    grid: GridSpec
    mask_radius: float
    masked: int
    checks: list[CheckRecord] = field(default_factory=list)
    status: str = "ok"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> list[str]:
        return [c.check for c in self.checks if not c.passed]

    def get(self, check: str) -> CheckRecord | None:
        return next((c for c in self.checks if c.check == check), None)

    def to_dict(self) -> dict[str, Any]:
        return {
            "surface": self.surface,
            "kind": self.kind,
            "grid": self.grid.to_dict(),
            "mask_radius": self.mask_radius,
            "masked": self.masked,
            "status": self.status,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def grid_map(fn: Callable[[Point], T], points: list[Point], threads: int = 1) -> list[T]:
    """Evaluate fn on every point, in grid order."""
    if threads <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, points))


def _norm_g(form_E: float, form_F: float, form_G: float, v: tuple[float, float]) -> float:
    q = form_E * v[0] * v[0] + 2.0 * form_F * v[0] * v[1] + form_G * v[1] * v[1]
    return math.sqrt(max(q, 0.0))


def _brioschi(m: MetricJets, S: ParamSurface, p: Point, h: float) -> float:
    """Gaussian curvature from the metric alone (second metric derivatives by differencing jets)."""

    def metric_first(q: Point) -> tuple[float, float, float]:
        mq = metric_jets(surface_frame(S, q, check_domain=False))
        # E_y, F_x, G_x at q
        return (mq.E.dy, mq.F.dx, mq.G.dx)

    ey_p, fx_p, gx_p = metric_first((p[0], p[1] + h))
    ey_m, fx_m, gx_m = metric_first((p[0], p[1] - h))
    e_yy = (ey_p - ey_m) / (2.0 * h)
    f_xy = (fx_p - fx_m) / (2.0 * h)
    gx_xp = metric_first((p[0] + h, p[1]))[2]
    gx_xm = metric_first((p[0] - h, p[1]))[2]
    g_xx = (gx_xp - gx_xm) / (2.0 * h)

    E, F, G = m.E, m.F, m.G
    a = np.array(
        [
            [-0.5 * e_yy + f_xy - 0.5 * g_xx, 0.5 * E.dx, F.dx - 0.5 * E.dy],
            [F.dy - 0.5 * G.dx, E.val, F.val],
            [0.5 * G.dy, F.val, G.val],
        ]
    )
    b = np.array(
        [
            [0.0, 0.5 * E.dy, 0.5 * G.dx],
            [0.5 * E.dy, E.val, F.val],
            [0.5 * G.dx, F.val, G.val],
        ]
    )
    d = E.val * G.val - F.val * F.val
    return float(np.linalg.det(a) - np.linalg.det(b)) / (d * d)


def evaluate_point(
    S: ParamSurface,
    p: Point,
    k: FixedDirection = DEFAULT_DIRECTION,
    mask_radius: float = 1e-6,
    h: float = JET_FD_STEP,
) -> dict[str, float] | None:
    """All applicable residuals at one grid point; None when the point is masked."""
    fr = surface_frame(S, p)
    m = metric_jets(fr)
    n = normal_jets(fr)
    aj = angle_jets(fr, m, n, k)
    theta = aj.theta.val
    if aj.degenerate or excluded_angle(theta, mask_radius):
        return None

    form = m.form()
    E, F, G = form.E, form.F, form.G
    A = shape_matrix(form, second_form_from_frame(fr, n))
    gam = christoffel_from_metric(m)
    U = (aj.u1.val, aj.u2.val)
    AU = A.apply(U)
    cols = ((A.a11, A.a21), (A.a12, A.a22))
    res: dict[str, float] = {}

    # GA must be symmetric
    res["self_adjoint"] = abs((E * A.a12 + F * A.a22) - (F * A.a11 + G * A.a21))

    eig = eig_sym_generalized(A, form)
    k1, k2 = eig.first.value, eig.second.value
    K, H = A.det, 0.5 * A.trace
    res["curvature_consistency"] = max(abs(K - k1 * k2), abs(H - 0.5 * (k1 + k2)))
    res["gauss_equation"] = abs(K - _brioschi(m, S, p, h))
    res["unit_decomposition"] = abs(form.inner(U, U) + aj.cos_theta.val**2 - 1.0)

    # angle identities use the claimed angle of the chart when there is one
    if S.angle is not None:
        claimed = S.angle(Jet2.var_x(p[0]), Jet2.var_y(p[1]))
        res["angle_formula"] = abs(claimed.val - theta)
        th = claimed
    else:
        th = aj.theta
    c, s = math.cos(th.val), math.sin(th.val)
    dtheta = (th.dx, th.dy)

    lc = 0.0
    du = ((aj.u1.dx, aj.u2.dx), (aj.u1.dy, aj.u2.dy))
    for i in range(2):
        nabla = [du[i][kk] + gam.gamma(kk, i, 0) * U[0] + gam.gamma(kk, i, 1) * U[1] for kk in range(2)]
        diff = (nabla[0] - c * cols[i][0], nabla[1] - c * cols[i][1])
        lc = max(lc, _norm_g(E, F, G, diff))
    res["levi_civita_U"] = lc

    gAU = form.lower(AU)
    res["dcos_theta"] = max(abs(-s * dtheta[i] + gAU[i]) for i in range(2))

    grad = form.raise_index(dtheta)
    res["AU_grad_theta"] = _norm_g(E, F, G, (AU[0] - s * grad[0], AU[1] - s * grad[1]))

    res["codazzi"] = codazzi_residual(S, p, h)

    # geometric quantities for the coordinate-specific identities
    gt_x, gt_y = aj.theta.dx, aj.theta.dy
    st, ct, tt = math.sin(theta), math.cos(theta), math.tan(theta)

    if S.kind == CoordinateKind.CANONICAL:
        beta = beta_jets(S, p)
        metric = max(abs(E - 1.0), abs(F))
        if S.beta is not None:
            claimed_beta = S.beta(Jet2.var_x(p[0]), Jet2.var_y(p[1])).val
            metric = max(metric, abs(G - claimed_beta * claimed_beta))
        res["canonical_metric"] = metric
        res["canonical_shape"] = max(
            abs(A.a12),
            abs(A.a21),
            abs(A.a11 - gt_x),
            abs(A.a22 - tt * beta.dx / beta.val),
        )
        res["canonical_codazzi_pde"] = abs(beta_second_x(S, p, h) + tt * gt_x * beta.dx)
        res["canonical_theta_y"] = abs(gt_y)

    if S.kind == CoordinateKind.ADAPTED:
        beta = beta_jets(S, p)
        b = beta.val
        res["adapted_metric"] = max(abs(E - 1.0 / (st * st)), abs(F))
        expected = Sym2x2(gt_x * st, gt_y * st, gt_y / (st * b * b), st * st * beta.dx / (ct * b))
        res["adapted_shape"] = max(
            abs(A.a11 - expected.a11),
            abs(A.a12 - expected.a12),
            abs(A.a21 - expected.a21),
            abs(A.a22 - expected.a22),
        )
        hess = theta_hessian(S, p, k, h)
        res["adapted_codazzi_pde"] = abs(
            st * st / ct * beta_second_x(S, p, h) / b
            + st * gt_x / (ct * ct) * beta.dx / b
            + gt_y / st * beta.dy / (b * b * b)
            + (2.0 * ct * gt_y * gt_y / (st * st) - hess.a22 / st) / (b * b)
        )

    if S.kind == CoordinateKind.ISOTHERMAL_MINIMAL:
        res["isothermal_metric"] = max(abs(E - G), abs(F))
        hess = theta_hessian(S, p, k, h)
        res["minimal_angle_pde"] = abs(ct * (gt_x * gt_x + gt_y * gt_y) - st * (hess.a11 + hess.a22))
        res["log_tan_half_harmonic"] = abs(log_tan_half_laplacian(S, p, k, h))
        if u_alignment(S, p, k) < 1e-9 and abs(E * st * st - 1.0) < 1e-9:
            res["minimal_shape_pattern"] = max(
                abs(A.a11 - st * gt_x),
                abs(A.a12 - st * gt_y),
                abs(A.a21 - st * gt_y),
                abs(A.a22 + st * gt_x),
            )

    return res


def _tolerance(check: str, S: ParamSurface, tols: ToleranceConfig) -> float:
    if check == "codazzi":
        return tols.codazzi_hard
    if S.chained:
        return tols.chained
    return float(getattr(tols, CHECK_TOLERANCES[check]))


def verify_surface(
    S: ParamSurface,
    k: FixedDirection = DEFAULT_DIRECTION,
    grid: GridSpec | None = None,
    tols: ToleranceConfig | None = None,
    threads: int = 1,
    fd_step: float = JET_FD_STEP,
) -> VerificationReport:
    """
    Run every applicable identity check over the grid.

    Failures are report entries, not exceptions.
    """
    grid = grid or GridSpec()
    tols = tols or ToleranceConfig()
    points = grid.points(S.domain)

    results = grid_map(lambda p: evaluate_point(S, p, k, tols.mask_radius, fd_step), points, threads)

    masked = sum(1 for r in results if r is None)
    report = VerificationReport(
        surface=S.name,
        kind=str(S.kind),
        grid=grid,
        mask_radius=tols.mask_radius,
        masked=masked,
    )
    if masked:
        logger.warning(f"{S.name}: {masked} of {len(points)} grid points masked (angle near 0, pi/2 or pi)")
    if masked == len(points):
        report.status = "degenerate: constant angle"
        return report

    for check in CHECK_TOLERANCES:
        values = [(r[check], p) for r, p in zip(results, points, strict=True) if r is not None and check in r]
        if not values:
            continue
        residuals = np.array([v for v, _ in values])
        i = int(np.argmax(residuals))
        worst, worst_point = float(residuals[i]), values[i][1]
        tol = _tolerance(check, S, tols)
        record = CheckRecord(
            check=check,
            max_residual=worst,
            mean_residual=float(residuals.mean()),
            worst_point=worst_point,
            tolerance=tol,
            passed=worst < tol,
            points=len(values),
        )
        if check == "codazzi" and worst >= tols.codazzi_advisory:
            record.advisory = True
            logger.warning(f"{S.name}: Codazzi residual {worst:.2e} above advisory level {tols.codazzi_advisory:.0e}")
        report.checks.append(record)

    if not report.passed:
        report.status = "failed: " + ", ".join(report.failed_checks())
    return report


# --- classification ----------------------------------------------------------------


@dataclass
class Classification:
    minimal: bool
    flat: bool
    cpd: bool
    constant_angle: bool
    umbilic: bool
    cmc: float | None
    cpd_report: CpdReport

    def to_dict(self) -> dict[str, Any]:
        return {
            "minimal": self.minimal,
            "flat": self.flat,
            "cpd": self.cpd,
            "constant_angle": self.constant_angle,
            "umbilic": self.umbilic,
            "cmc": self.cmc,
            "principal_direction": self.cpd_report.to_dict(),
        }


def classify(
    S: ParamSurface,
    grid: GridSpec | None = None,
    tols: ToleranceConfig | None = None,
    k: FixedDirection = DEFAULT_DIRECTION,
    threads: int = 1,
) -> Classification:
    """
    Threshold curvature residuals into flags.

    Raises:
        ClassificationInconsistencyError: minimal and flat with a nonconstant angle
    """
    grid = grid or GridSpec()
    tols = tols or ToleranceConfig()
    tol = tols.classify
    points = grid.points(S.domain)

    def sample(p: Point) -> tuple[float, float, float, float]:
        c = curvatures(S, p)
        fr = surface_frame(S, p)
        m = metric_jets(fr)
        aj = angle_jets(fr, m, normal_jets(fr), k)
        return (c.H, c.K, c.kappa1 - c.kappa2, max(abs(aj.theta.dx), abs(aj.theta.dy)))

    rows = grid_map(sample, points, threads)
    hs = [r[0] for r in rows]
    mean_h = sum(hs) / len(hs)

    minimal = max(abs(h) for h in hs) < tol
    flat = max(abs(r[1]) for r in rows) < tol
    umbilic = max(abs(r[2]) for r in rows) < tol
    constant_angle = max(r[3] for r in rows) < tol
    cmc = mean_h if max(abs(h - mean_h) for h in hs) < tol else None

    if minimal and flat and not constant_angle:
        raise ClassificationInconsistencyError(
            f"{S.name} classified minimal and flat with a nonconstant angle; no such surface exists"
        )

    report = is_cpd(S, grid, tol, k, tols.mask_radius)
    return Classification(
        minimal=minimal,
        flat=flat,
        cpd=report.is_cpd,
        constant_angle=constant_angle,
        umbilic=umbilic,
        cmc=cmc,
        cpd_report=report,
    )
