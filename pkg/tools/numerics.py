"""Foundation numerics: adaptive quadrature, adaptive Runge-Kutta, 2x2 generalized eigenproblem."""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.integrate import quad, solve_ivp

from .errors import NotSelfAdjointError, OdeIntegrationError, QuadratureError
from .models import EigenDecomposition, EigenPair, FirstForm, Interval, Sym2x2

logger = logging.getLogger("cpd_surfaces.numerics")

QUAD_SUBDIVISIONS = 200


def quad_adaptive(f: Callable[[float], float], span: Interval, tol: float) -> float:
    """
    Integrate f over span with adaptive Gauss-Kronrod (21-point) refinement.

    Args:
        f: Integrand, continuous on span
        span: Integration interval
        tol: Absolute error tolerance

    Returns:
        The integral, with estimated absolute error <= tol

    Raises:
        QuadratureError: refinement did not reach tol within the subdivision limit
    """
    if tol <= 0.0:
        raise ValueError(f"quadrature tolerance must be positive, got {tol}")

    result = quad(f, span.lo, span.hi, epsabs=tol, epsrel=0.0, limit=QUAD_SUBDIVISIONS, full_output=1)
    value, abserr = float(result[0]), float(result[1])
    if len(result) > 3:
        raise QuadratureError(f"quadrature over [{span.lo}, {span.hi}] failed: {result[3]}", value, abserr)
    if abserr > tol:
        raise QuadratureError(f"quadrature over [{span.lo}, {span.hi}] missed tolerance {tol:.1e}", value, abserr)
    return value


@dataclass(frozen=True)
class Trajectory:
    """Dense-output ODE solution."""

    t: NDArray[np.float64]
    y: NDArray[np.float64]
    dense: Callable[[float | NDArray[np.float64]], NDArray[np.float64]]
    span: Interval

    def __call__(self, t: float | NDArray[np.float64]) -> NDArray[np.float64]:
        return self.dense(t)

    def sample(self, step: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Evaluate the dense output on a uniform grid covering the span (endpoints included)."""
        n = max(int(np.ceil(self.span.width / step)), 1) + 1
        ts = np.linspace(self.span.lo, self.span.hi, n)
        return ts, np.asarray(self.dense(ts))


def ode_rk_adaptive(
    rhs: Callable[[float, NDArray[np.float64]], NDArray[np.float64] | list[float]],
    y0: list[float] | NDArray[np.float64],
    span: Interval,
    tol: float,
    singular: Callable[[float, NDArray[np.float64]], float] | None = None,
) -> Trajectory:
    """
    Integrate y' = rhs(t, y) over span with the embedded Dormand-Prince 4(5) pair.

    Args:
        rhs: Right-hand side, smooth on span
        y0: Initial state at span.lo
        span: Integration interval
        tol: Local error tolerance (absolute and relative)
        singular: Optional guard g(t, y); integration aborts where g crosses zero

    Returns:
        Trajectory with dense output over the whole span

    Raises:
        OdeIntegrationError: step-size underflow or the singular guard fired
    """
    if tol <= 0.0:
        raise ValueError(f"ODE tolerance must be positive, got {tol}")

    events = None
    if singular is not None:

        def guard(t: float, y: NDArray[np.float64]) -> float:
            return singular(t, y)

        guard.terminal = True  # type: ignore[attr-defined]
        events = [guard]

    sol = solve_ivp(
        rhs,
        (span.lo, span.hi),
        np.asarray(y0, dtype=float),
        method="RK45",
        rtol=tol,
        atol=tol,
        dense_output=True,
        events=events,
    )

    if sol.status == 1:
        location = float(sol.t_events[0][0]) if sol.t_events and len(sol.t_events[0]) else float(sol.t[-1])
        raise OdeIntegrationError("singular right-hand side reached", location)
    if sol.status != 0:
        raise OdeIntegrationError(f"integration aborted: {sol.message}", float(sol.t[-1]))

    logger.debug(f"RK45 over [{span.lo}, {span.hi}]: {len(sol.t)} steps, {sol.nfev} evaluations")
    return Trajectory(t=sol.t, y=sol.y, dense=sol.sol, span=span)


def eig_sym_generalized(
    A: Sym2x2,
    G: FirstForm,
    tol: float = 1e-8,
    umbilic_tol: float = 1e-8,
) -> EigenDecomposition:
    """
    Eigenpairs of an operator A that is self-adjoint with respect to the metric G.

    Solves (G A) v = kappa G v. Eigenvalues come sorted descending and the
    eigenvectors are G-orthonormal. Where the eigenvalues coincide the pair is
    flagged umbilic and any G-orthonormal basis is returned.
    """
    g = np.array([[G.E, G.F], [G.F, G.G]])
    a = np.array([[A.a11, A.a12], [A.a21, A.a22]])
    m = g @ a

    defect = abs(m[0, 1] - m[1, 0])
    if defect > tol * max(1.0, float(np.abs(m).max())):
        raise NotSelfAdjointError(defect)

    m_sym = 0.5 * (m + m.T)
    w, v = scipy.linalg.eigh(m_sym, g)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]

    umbilic = abs(w[0] - w[1]) <= umbilic_tol * max(1.0, abs(w[0]), abs(w[1]))
    return EigenDecomposition(
        first=EigenPair(float(w[0]), (float(v[0, 0]), float(v[1, 0]))),
        second=EigenPair(float(w[1]), (float(v[0, 1]), float(v[1, 1]))),
        umbilic=umbilic,
    )
