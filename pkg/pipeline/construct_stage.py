import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any

from config import NumericsConfig
from tools.cpd import (
    Case1Spec,
    Case2Spec,
    CmcProfile,
    ExprProfile,
    build_case1,
    build_case2,
    catenoid_cpd,
    cmc_profile,
    cmc_surface,
    sphere_cpd,
)
from tools.errors import SpecFileError
from tools.expr import eval_jet, field, parse_in
from tools.gallery import GALLERY_NAMES, gallery
from tools.geometry import CoordinateKind, ParamSurface
from tools.jet import Jet2, Vec3
from tools.models import Domain, Interval

logger = logging.getLogger("cpd_surfaces.construct")

SURFACE_KINDS = ("case1", "case2", "catenoid", "sphere", "gallery", "cmc", "parametric")


def load_spec(path: str) -> dict[str, Any]:
    """Read a SurfaceSpecFile (JSON object)."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as e:
        raise SpecFileError(f"cannot read spec file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecFileError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise SpecFileError(f"{path}: spec must be a JSON object")
    return data


def save_spec(spec: dict[str, Any], path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(spec, f, indent=2)


def _require(spec: dict[str, Any], key: str) -> Any:
    if key not in spec:
        raise SpecFileError(f"'{spec.get('kind')}' spec needs field '{key}'")
    return spec[key]


def _interval(raw: Any, what: str) -> Interval:
    try:
        lo, hi = (float(v) for v in raw)
        return Interval(lo, hi)
    except (TypeError, ValueError) as e:
        raise SpecFileError(f"invalid {what} interval {raw!r}: {e}") from e


def _dict_to_domain(d: Any) -> Domain:
    if not isinstance(d, dict) or "x" not in d or "y" not in d:
        raise SpecFileError(f"domain must be an object with 'x' and 'y' intervals, got {d!r}")
    return Domain(_interval(d["x"], "domain.x"), _interval(d["y"], "domain.y"))


def _number(spec: dict[str, Any], key: str, default: float | None = None) -> float:
    raw = spec.get(key, default) if default is not None else _require(spec, key)
    try:
        return float(raw)
    except (TypeError, ValueError) as e:
        raise SpecFileError(f"field '{key}' must be a number, got {raw!r}") from e


def _parametric(spec: dict[str, Any]) -> ParamSurface:
    comps = _require(spec, "r")
    if not isinstance(comps, list) or len(comps) != 3:
        raise SpecFileError(f"'r' must list three expressions, got {comps!r}")
    exprs = [parse_in(str(c), {"x", "y"}) for c in comps]

    def immersion(x: Jet2, y: Jet2) -> Vec3:
        return (eval_jet(exprs[0], x, y), eval_jet(exprs[1], x, y), eval_jet(exprs[2], x, y))

    coords = spec.get("coords", CoordinateKind.GENERIC.value)
    try:
        kind = CoordinateKind(coords)
    except ValueError as e:
        raise SpecFileError(f"unknown coordinate kind {coords!r}") from e

    theta_text = spec.get("theta")
    angle = field(parse_in(theta_text, {"x", "y"})) if theta_text else None
    return ParamSurface(
        name=str(spec.get("name", "parametric")),
        domain=_dict_to_domain(_require(spec, "domain")),
        immersion=immersion,
        kind=kind,
        angle=angle,
        angle_text=theta_text,
        chained=bool(spec.get("chained", False)),
    )


def profile_from_spec(spec: dict[str, Any], numerics: NumericsConfig) -> CmcProfile:
    return cmc_profile(
        H=_number(spec, "H"),
        psi0=_number(spec, "psi0"),
        theta0=_number(spec, "theta0"),
        phi0=_number(spec, "phi0"),
        span=_interval(_require(spec, "span"), "span"),
        tol=_number(spec, "ode_tol", numerics.ode_tol),
        step=_number(spec, "step", numerics.profile_step),
    )


def build_surface(spec: dict[str, Any], numerics: NumericsConfig | None = None) -> ParamSurface:
    """
    Build the surface a SurfaceSpecFile describes.

    Args:
        spec: Parsed JSON object with a "kind" field
        numerics: Defaults for quadrature / ODE tolerances

    Returns:
        ParamSurface ready for sampling and verification

    Raises:
        SpecFileError: unknown kind, missing or malformed fields
    """
    numerics = numerics or NumericsConfig()
    kind = spec.get("kind")
    quad_tol = _number(spec, "quad_tol", numerics.quad_tol)

    if kind == "case1":
        surface = build_case1(
            Case1Spec(
                theta=ExprProfile.parse(str(_require(spec, "theta")), "x"),
                psi=ExprProfile.parse(str(spec.get("psi", "0")), "y"),
                domain=_dict_to_domain(_require(spec, "domain")),
                quad_tol=quad_tol,
                x0=_number(spec, "x0", 0.0),
                phi0=_number(spec, "phi0", 0.0),
                theta_samples=numerics.theta_samples,
            )
        )
    elif kind == "case2":
        surface = build_case2(
            Case2Spec(
                theta=ExprProfile.parse(str(_require(spec, "theta")), "x"),
                y0=_number(spec, "y0", 0.0),
                domain=_dict_to_domain(_require(spec, "domain")),
                quad_tol=quad_tol,
                theta_samples=numerics.theta_samples,
            )
        )
    elif kind == "catenoid":
        surface = catenoid_cpd(_number(spec, "c"), _dict_to_domain(_require(spec, "domain")))
    elif kind == "sphere":
        surface = sphere_cpd(_number(spec, "a"), _number(spec, "b"), _dict_to_domain(_require(spec, "domain")), quad_tol)
    elif kind == "gallery":
        name = _require(spec, "name")
        if name not in GALLERY_NAMES:
            raise SpecFileError(f"unknown gallery surface {name!r} (choose from {', '.join(GALLERY_NAMES)})")
        dom = _dict_to_domain(spec["domain"]) if "domain" in spec else None
        surface = gallery(name, dom)
    elif kind == "cmc":
        profile = profile_from_spec(spec, numerics)
        surface = cmc_surface(profile, _interval(spec.get("y", [0.0, 1.0]), "y"), quad_tol)
    elif kind == "parametric":
        surface = _parametric(spec)
    else:
        raise SpecFileError(f"unknown surface kind {kind!r} (choose from {', '.join(SURFACE_KINDS)})")

    if "name" in spec and kind != "gallery":
        surface = replace(surface, name=str(spec["name"]))
    logger.debug(f"Built {surface.name} ({surface.kind}) on {surface.domain.to_dict()}")
    return surface
