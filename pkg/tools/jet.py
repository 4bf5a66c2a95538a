"""Second-order forward-mode jets in two chart variables.

A ``Jet2`` carries a value together with its first and second partial
derivatives with respect to the chart coordinates (x, y). Arithmetic and the
elementary functions below propagate all of them exactly, so any quantity
assembled from jets has exact partials up to rounding.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass

from .errors import JetDomainError

NAN = float("nan")


@dataclass(frozen=True, slots=True)
class Jet2:
    val: float
    dx: float = 0.0
    dy: float = 0.0
    dxx: float = 0.0
    dxy: float = 0.0
    dyy: float = 0.0

    @staticmethod
    def constant(c: float) -> "Jet2":
        return Jet2(float(c))

    @staticmethod
    def var_x(x: float) -> "Jet2":
        return Jet2(float(x), 1.0, 0.0)

    @staticmethod
    def var_y(y: float) -> "Jet2":
        return Jet2(float(y), 0.0, 1.0)

    @property
    def is_constant(self) -> bool:
        return self.dx == 0.0 and self.dy == 0.0 and self.dxx == 0.0 and self.dxy == 0.0 and self.dyy == 0.0

    def diff_x(self) -> "Jet2":
        """Jet of d/dx of this quantity; its own second partials are unknown (NaN)."""
        return Jet2(self.dx, self.dxx, self.dxy, NAN, NAN, NAN)

    def diff_y(self) -> "Jet2":
        """Jet of d/dy of this quantity; its own second partials are unknown (NaN)."""
        return Jet2(self.dy, self.dxy, self.dyy, NAN, NAN, NAN)

    def compose(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Chain rule for g(self) where g(v) = f0, g'(v) = f1, g''(v) = f2."""
        return Jet2(
            f0,
            f1 * self.dx,
            f1 * self.dy,
            f2 * self.dx * self.dx + f1 * self.dxx,
            f2 * self.dx * self.dy + f1 * self.dxy,
            f2 * self.dy * self.dy + f1 * self.dyy,
        )

    def __add__(self, other: "Jet2 | float") -> "Jet2":
        if isinstance(other, Jet2):
            return Jet2(
                self.val + other.val,
                self.dx + other.dx,
                self.dy + other.dy,
                self.dxx + other.dxx,
                self.dxy + other.dxy,
                self.dyy + other.dyy,
            )
        return Jet2(self.val + other, self.dx, self.dy, self.dxx, self.dxy, self.dyy)

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.val, -self.dx, -self.dy, -self.dxx, -self.dxy, -self.dyy)

    def __sub__(self, other: "Jet2 | float") -> "Jet2":
        return self + (-other)

    def __rsub__(self, other: float) -> "Jet2":
        return (-self) + other

    def __mul__(self, other: "Jet2 | float") -> "Jet2":
        if isinstance(other, Jet2):
            a, b = self, other
            return Jet2(
                a.val * b.val,
                a.dx * b.val + a.val * b.dx,
                a.dy * b.val + a.val * b.dy,
                a.dxx * b.val + 2.0 * a.dx * b.dx + a.val * b.dxx,
                a.dxy * b.val + a.dx * b.dy + a.dy * b.dx + a.val * b.dxy,
                a.dyy * b.val + 2.0 * a.dy * b.dy + a.val * b.dyy,
            )
        c = float(other)
        return Jet2(self.val * c, self.dx * c, self.dy * c, self.dxx * c, self.dxy * c, self.dyy * c)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.val
        if v == 0.0:
            raise JetDomainError("/", 0.0)
        inv = 1.0 / v
        return self.compose(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other: "Jet2 | float") -> "Jet2":
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if other == 0.0:
            raise JetDomainError("/", 0.0)
        return self * (1.0 / other)

    def __rtruediv__(self, other: float) -> "Jet2":
        return self.reciprocal() * other

    def __pow__(self, other: "Jet2 | float") -> "Jet2":
        if isinstance(other, Jet2):
            if other.is_constant:
                return power_const(self, other.val)
            return power(self, other)
        return power_const(self, float(other))

    def __rpow__(self, other: float) -> "Jet2":
        return power(Jet2.constant(other), self)


Vec3 = tuple[Jet2, Jet2, Jet2]


def power_const(b: Jet2, p: float) -> Jet2:
    """b ** p for a constant exponent; negative bases only with integer exponents."""
    v = b.val
    if p == 0.0:
        return Jet2(1.0)
    if p == 1.0:
        return b
    integral = float(p).is_integer()
    if v < 0.0 and not integral:
        raise JetDomainError("^", v)
    if v == 0.0:
        if integral and p >= 2.0:
            f1 = 0.0 if p > 1.0 else 1.0
            f2 = 2.0 if p == 2.0 else 0.0
            return b.compose(0.0, f1, f2)
        raise JetDomainError("^", v)
    return b.compose(v**p, p * v ** (p - 1.0), p * (p - 1.0) * v ** (p - 2.0))


def power(b: Jet2, p: Jet2) -> Jet2:
    """b ** p with a varying exponent, defined through exp(p log b)."""
    if b.val <= 0.0:
        raise JetDomainError("^", b.val)
    return exp(p * log(b))


def sin(a: Jet2) -> Jet2:
    s, c = math.sin(a.val), math.cos(a.val)
    return a.compose(s, c, -s)


def cos(a: Jet2) -> Jet2:
    s, c = math.sin(a.val), math.cos(a.val)
    return a.compose(c, -s, -c)


def tan(a: Jet2) -> Jet2:
    c = math.cos(a.val)
    if abs(c) < 1e-15:
        raise JetDomainError("tan", a.val)
    t = math.tan(a.val)
    sec2 = 1.0 + t * t
    return a.compose(t, sec2, 2.0 * t * sec2)


def atan(a: Jet2) -> Jet2:
    v = a.val
    d = 1.0 / (1.0 + v * v)
    return a.compose(math.atan(v), d, -2.0 * v * d * d)


def asin(a: Jet2) -> Jet2:
    v = a.val
    if not -1.0 < v < 1.0:
        raise JetDomainError("asin", v)
    r = 1.0 / math.sqrt(1.0 - v * v)
    return a.compose(math.asin(v), r, v * r * r * r)


def acos(a: Jet2) -> Jet2:
    v = a.val
    if not -1.0 < v < 1.0:
        raise JetDomainError("acos", v)
    r = 1.0 / math.sqrt(1.0 - v * v)
    return a.compose(math.acos(v), -r, -v * r * r * r)


def exp(a: Jet2) -> Jet2:
    try:
        e = math.exp(a.val)
    except OverflowError as err:
        raise JetDomainError("exp", a.val) from err
    return a.compose(e, e, e)


def log(a: Jet2) -> Jet2:
    v = a.val
    if v <= 0.0:
        raise JetDomainError("ln", v)
    return a.compose(math.log(v), 1.0 / v, -1.0 / (v * v))


def sqrt(a: Jet2) -> Jet2:
    v = a.val
    if v <= 0.0:
        raise JetDomainError("sqrt", v)
    s = math.sqrt(v)
    return a.compose(s, 0.5 / s, -0.25 / (s * v))


def sinh(a: Jet2) -> Jet2:
    s, c = math.sinh(a.val), math.cosh(a.val)
    return a.compose(s, c, s)


def cosh(a: Jet2) -> Jet2:
    s, c = math.sinh(a.val), math.cosh(a.val)
    return a.compose(c, s, c)


def tanh(a: Jet2) -> Jet2:
    t = math.tanh(a.val)
    d = 1.0 - t * t
    return a.compose(t, d, -2.0 * t * d)


def fabs(a: Jet2) -> Jet2:
    if a.val == 0.0:
        raise JetDomainError("abs", 0.0)
    s = 1.0 if a.val > 0.0 else -1.0
    return a.compose(abs(a.val), s, 0.0)


FUNCTIONS: dict[str, Callable[[Jet2], Jet2]] = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "atan": atan,
    "asin": asin,
    "acos": acos,
    "exp": exp,
    "ln": log,
    "sqrt": sqrt,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "abs": fabs,
}


def dot(a: Vec3, b: Vec3) -> Jet2:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def dot_const(a: Vec3, k: tuple[float, float, float]) -> Jet2:
    return a[0] * k[0] + a[1] * k[1] + a[2] * k[2]


def cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def values(v: Vec3) -> tuple[float, float, float]:
    return (v[0].val, v[1].val, v[2].val)
