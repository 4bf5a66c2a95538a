import math
from dataclasses import dataclass
from typing import NamedTuple

Point = tuple[float, float]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]: need finite lo < hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, t: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= t <= self.hi + slack

    def to_list(self) -> list[float]:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class Domain:
    """Rectangular chart domain in (x, y)."""

    x: Interval
    y: Interval

    def contains(self, p: Point, slack: float = 1e-12) -> bool:
        return self.x.contains(p[0], slack) and self.y.contains(p[1], slack)

    def to_dict(self) -> dict[str, list[float]]:
        return {"x": self.x.to_list(), "y": self.y.to_list()}


def domain(x: tuple[float, float], y: tuple[float, float]) -> Domain:
    return Domain(Interval(*x), Interval(*y))


@dataclass(frozen=True)
class Sym2x2:
    """2x2 matrix in the coordinate basis {d/dx, d/dy}; symmetry is checked by consumers."""

    a11: float
    a12: float
    a21: float
    a22: float

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def apply(self, v: tuple[float, float]) -> tuple[float, float]:
        return (self.a11 * v[0] + self.a12 * v[1], self.a21 * v[0] + self.a22 * v[1])

    def norm(self) -> float:
        return math.sqrt(self.a11**2 + self.a12**2 + self.a21**2 + self.a22**2)


@dataclass(frozen=True)
class FirstForm:
    E: float
    F: float
    G: float

    @property
    def det(self) -> float:
        return self.E * self.G - self.F * self.F

    def inner(self, a: tuple[float, float], b: tuple[float, float]) -> float:
        return self.E * a[0] * b[0] + self.F * (a[0] * b[1] + a[1] * b[0]) + self.G * a[1] * b[1]

    def norm(self, a: tuple[float, float]) -> float:
        return math.sqrt(max(self.inner(a, a), 0.0))

    def lower(self, a: tuple[float, float]) -> tuple[float, float]:
        return (self.E * a[0] + self.F * a[1], self.F * a[0] + self.G * a[1])

    def raise_index(self, w: tuple[float, float]) -> tuple[float, float]:
        d = self.det
        return ((self.G * w[0] - self.F * w[1]) / d, (self.E * w[1] - self.F * w[0]) / d)


IDENTITY_FORM = FirstForm(1.0, 0.0, 1.0)


@dataclass(frozen=True)
class SecondForm:
    e: float
    f: float
    g2: float


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: tuple[float, float]


@dataclass(frozen=True)
class EigenDecomposition:
    first: EigenPair
    second: EigenPair
    umbilic: bool


@dataclass(frozen=True)
class CurvatureData:
    K: float
    H: float
    kappa1: float
    kappa2: float
    dir1: tuple[float, float]
    dir2: tuple[float, float]
    umbilic: bool


@dataclass(frozen=True)
class AngleData:
    theta: float
    cos_theta: float
    U: tuple[float, float]
    grad_theta: tuple[float, float]
    theta_x: float
    theta_y: float
    degenerate: bool = False


@dataclass(frozen=True)
class FixedDirection:
    k: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self) -> None:
        n = math.sqrt(sum(c * c for c in self.k))
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"fixed direction must be a unit vector, |k| = {n}")


class Christoffel(NamedTuple):
    """Christoffel symbols; ``y_xx`` is the d/dy component of nabla_{d/dx} d/dx."""

    x_xx: float
    y_xx: float
    x_xy: float
    y_xy: float
    x_yy: float
    y_yy: float

    def gamma(self, upper: int, i: int, j: int) -> float:
        lo = i + j  # 0 -> xx, 1 -> xy, 2 -> yy
        table = ((self.x_xx, self.y_xx), (self.x_xy, self.y_xy), (self.x_yy, self.y_yy))
        return table[lo][upper]


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid: nx by ny points, with a fraction ``margin`` of the domain trimmed at each side."""

    nx: int = 21
    ny: int = 21
    margin: float = 0.0

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"grid needs at least 2 points per axis, got {self.nx}x{self.ny}")
        if not 0.0 <= self.margin < 0.5:
            raise ValueError(f"grid margin must lie in [0, 0.5), got {self.margin}")

    def axes(self, dom: Domain) -> tuple[list[float], list[float]]:
        def axis(iv: Interval, n: int) -> list[float]:
            trim = self.margin * iv.width
            lo, hi = iv.lo + trim, iv.hi - trim
            return [lo + (hi - lo) * i / (n - 1) for i in range(n)]

        return axis(dom.x, self.nx), axis(dom.y, self.ny)

    def points(self, dom: Domain) -> list[Point]:
        """Grid points in row-major order: y outer, x inner."""
        xs, ys = self.axes(dom)
        return [(x, y) for y in ys for x in xs]

    def to_dict(self) -> dict[str, float]:
        return {"nx": self.nx, "ny": self.ny, "margin": self.margin}
