#!/usr/bin/env python3
"""
Finite-difference oracle for the jet geometry.

Recomputes the fundamental forms and curvatures from point evaluations of the
immersion only (Richardson-extrapolated central differences), and reports the
agreement with the jet-based engine.

Usage:
    python -m tools.oracle report --points 50
    python -m tools.oracle report --surface catenoid --export agreement.json
"""

import argparse
import json
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass

import numpy as np

from config import load_config
from tools.cpd import Case1Spec, Case2Spec, build_case1, build_case2, catenoid_cpd, sphere_cpd
from tools.gallery import GALLERY_NAMES, gallery
from tools.geometry import ParamSurface, curvatures, first_form, second_form
from tools.jet import Jet2
from tools.models import Point, domain

QUANTITIES = ("E", "F", "G", "e", "f", "g", "K", "H")
# differencing quadrature values amplifies their error by 1/h^2
ORACLE_QUAD_TOL = 1e-12


@dataclass
class OracleValues:
    E: float
    F: float
    G: float
    e: float
    f: float
    g: float
    K: float
    H: float


def _position(S: ParamSurface, x: float, y: float) -> np.ndarray:
    r = S.immersion(Jet2(x), Jet2(y))
    return np.array([r[0].val, r[1].val, r[2].val])


def _richardson(d: Callable[[float], np.ndarray], h: float, order: int) -> np.ndarray:
    coarse, fine = d(h), d(0.5 * h)
    return (2**order * fine - coarse) / (2**order - 1)


def oracle_values(S: ParamSurface, p: Point, h: float = 1e-4) -> OracleValues:
    """Geometry at p from central differences of the immersion."""
    x, y = p

    def r(dx: float, dy: float) -> np.ndarray:
        return _position(S, x + dx, y + dy)

    r0 = r(0.0, 0.0)
    rx = _richardson(lambda s: (r(s, 0) - r(-s, 0)) / (2 * s), h, 2)
    ry = _richardson(lambda s: (r(0, s) - r(0, -s)) / (2 * s), h, 2)
    rxx = _richardson(lambda s: (r(s, 0) - 2 * r0 + r(-s, 0)) / (s * s), h, 2)
    ryy = _richardson(lambda s: (r(0, s) - 2 * r0 + r(0, -s)) / (s * s), h, 2)
    rxy = _richardson(lambda s: (r(s, s) - r(s, -s) - r(-s, s) + r(-s, -s)) / (4 * s * s), h, 2)

    n = np.cross(rx, ry)
    n = n / np.linalg.norm(n)
    E, F, G = float(rx @ rx), float(rx @ ry), float(ry @ ry)
    e, f, g = float(rxx @ n), float(rxy @ n), float(ryy @ n)
    det = E * G - F * F
    return OracleValues(
        E=E,
        F=F,
        G=G,
        e=e,
        f=f,
        g=g,
        K=(e * g - f * f) / det,
        H=(E * g - 2 * F * f + G * e) / (2 * det),
    )


def jet_values(S: ParamSurface, p: Point) -> OracleValues:
    first = first_form(S, p)
    second = second_form(S, p)
    c = curvatures(S, p)
    return OracleValues(E=first.E, F=first.F, G=first.G, e=second.e, f=second.f, g=second.g2, K=c.K, H=c.H)


def relative_error(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def random_points(S: ParamSurface, count: int, seed: int = 0, inset: float = 1e-2) -> list[Point]:
    """Uniform points, kept a fraction ``inset`` away from the chart boundary."""
    rng = np.random.default_rng(seed)
    dx, dy = S.domain.x, S.domain.y
    xs = rng.uniform(dx.lo + inset * dx.width, dx.hi - inset * dx.width, count)
    ys = rng.uniform(dy.lo + inset * dy.width, dy.hi - inset * dy.width, count)
    return [(float(a), float(b)) for a, b in zip(xs, ys, strict=True)]


def compare_surface(S: ParamSurface, points: list[Point], h: float = 1e-4) -> dict[str, float]:
    """Max relative error per quantity between jet engine and oracle."""
    worst = dict.fromkeys(QUANTITIES, 0.0)
    for p in points:
        ours = asdict(jet_values(S, p))
        ref = asdict(oracle_values(S, p, h))
        for q in QUANTITIES:
            worst[q] = max(worst[q], relative_error(ours[q], ref[q]))
    return worst


def reference_surfaces() -> dict[str, ParamSurface]:
    """Every gallery surface plus one surface per constructor."""
    surfaces = {name: gallery(name) for name in GALLERY_NAMES}
    surfaces["catenoid_cpd"] = catenoid_cpd(1.0, domain((0.5, 3.0), (0.0, 2 * math.pi)))
    surfaces["case1"] = build_case1(
        Case1Spec.from_text("2*atan(exp(-x))", "0.2", domain((-1.0, 1.0), (0.0, 3.0)), quad_tol=ORACLE_QUAD_TOL)
    )
    surfaces["case2"] = build_case2(
        Case2Spec.from_text("atan(1/x)", 0.0, domain((0.5, 3.0), (-1.0, 1.0)), quad_tol=ORACLE_QUAD_TOL)
    )
    surfaces["sphere"] = sphere_cpd(1.0, 0.0, domain((0.3, math.pi - 0.3), (0.0, 2 * math.pi)), ORACLE_QUAD_TOL)
    return surfaces


def generate_agreement_report(results: dict[str, dict[str, float]], tol: float) -> list[str]:
    """Print the agreement table; returns the surfaces that exceed tol."""
    print("\n" + "=" * 60)
    print("ORACLE AGREEMENT REPORT")
    print("=" * 60)
    print(f"\n{'surface':<22}" + "".join(f"{q:>9}" for q in QUANTITIES))

    failures = []
    for name, worst in results.items():
        print(f"{name:<22}" + "".join(f"{worst[q]:>9.1e}" for q in QUANTITIES))
        if max(worst.values()) > tol:
            failures.append(name)

    print(f"\nTolerance (relative): {tol:.0e}")
    print(f"Surfaces above tolerance: {len(failures)}")
    for name in failures:
        print(f"  - {name}")
    print("\n" + "=" * 60)
    return failures


def main() -> None:
    parser = argparse.ArgumentParser(description="Compare jet geometry against a finite-difference oracle")
    parser.add_argument("command", choices=["report"])
    parser.add_argument("--surface", choices=sorted(reference_surfaces()), help="Only check this surface")
    parser.add_argument("--points", type=int, default=50, help="Random points per surface")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=1e-5, help="Relative agreement tolerance")
    parser.add_argument("--config", default="config.yaml", help="Path to config file")
    parser.add_argument("--export", help="Export per-surface errors to JSON file")

    args = parser.parse_args()
    config = load_config(args.config)

    surfaces = reference_surfaces()
    if args.surface:
        surfaces = {args.surface: surfaces[args.surface]}

    results = {
        name: compare_surface(S, random_points(S, args.points, args.seed), config.numerics.oracle_step)
        for name, S in surfaces.items()
    }
    failures = generate_agreement_report(results, args.tol)

    if args.export:
        with open(args.export, "w") as f:
            json.dump(results, f, indent=2)
        print(f"\nExported agreement table to: {args.export}")

    if failures:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
