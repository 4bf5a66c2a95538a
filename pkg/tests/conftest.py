import math
from dataclasses import replace
from pathlib import Path

import pytest
import yaml
from hypothesis import strategies as st

from tools import jet
from tools.cpd import Case1Spec, build_case1, catenoid_cpd
from tools.expr import FUNCTION_NAMES, BinOp, Call, Const, Expr, Neg, Num, Var
from tools.geometry import ParamSurface
from tools.jet import Jet2, Vec3
from tools.models import GridSpec, domain

CASES_FILE = Path(__file__).parent / "surface-cases.yaml"


def load_surface_cases() -> list[dict]:
    with open(CASES_FILE) as f:
        data = yaml.safe_load(f)
    return data["cases"]


def expression_trees(
    numbers: st.SearchStrategy[float] = st.floats(min_value=0.0, max_value=1e6),
    functions: frozenset[str] = FUNCTION_NAMES,
    max_leaves: int = 12,
) -> st.SearchStrategy[Expr]:
    """Random expression trees over x, y, pi, e and non-negative literals."""
    leaves = st.one_of(
        numbers.map(lambda v: Num(abs(v))),
        st.sampled_from([Var("x"), Var("y"), Const("pi"), Const("e")]),
    )

    def extend(children: st.SearchStrategy[Expr]) -> st.SearchStrategy[Expr]:
        return st.one_of(
            st.builds(Neg, children),
            st.builds(Call, st.sampled_from(sorted(functions)), children),
            st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def plane() -> ParamSurface:
    def immersion(x: Jet2, y: Jet2) -> Vec3:
        return (x, y, Jet2(0.0))

    return ParamSurface(name="plane", domain=domain((-1.0, 1.0), (-1.0, 1.0)), immersion=immersion)


def perturbed(S: ParamSurface, amplitude: float = 0.01) -> ParamSurface:
    """Same chart and claimed angle, third component bumped by amplitude * sin(x) sin(y)."""
    inner = S.immersion

    def immersion(x: Jet2, y: Jet2) -> Vec3:
        r = inner(x, y)
        return (r[0], r[1], r[2] + amplitude * jet.sin(x) * jet.sin(y))

    return replace(S, name=f"{S.name}+bump", immersion=immersion)


@pytest.fixture
def small_grid() -> GridSpec:
    return GridSpec(6, 6)


@pytest.fixture(scope="session")
def case1_surface() -> ParamSurface:
    return build_case1(Case1Spec.from_text("2*atan(exp(-x))", "0.2", domain((-1.0, 1.0), (0.0, 3.0))))


@pytest.fixture(scope="session")
def catenoid_c1() -> ParamSurface:
    return catenoid_cpd(1.0, domain((0.5, 3.0), (0.0, 2.0 * math.pi)))
