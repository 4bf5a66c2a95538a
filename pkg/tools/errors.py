class CpdError(Exception):
    """Base class for every error raised by this project."""


class ExprError(CpdError):
    pass


class ExprSyntaxError(ExprError):
    """Malformed expression text."""

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = expected
        detail = f" (expected {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class ExprNameError(ExprError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier '{name}' at offset {offset}")


class ExprVariableError(ExprError):
    def __init__(self, names: set[str], allowed: set[str]):
        self.names = names
        self.allowed = allowed
        super().__init__(
            f"expression uses {', '.join(sorted(names))}; only {', '.join(sorted(allowed)) or 'constants'} allowed here"
        )


class JetDomainError(CpdError, ValueError):
    """A function was evaluated outside the set where it is twice differentiable."""

    def __init__(self, function: str, argument: float):
        self.function = function
        self.argument = argument
        super().__init__(f"{function} is not defined (or not differentiable) at {argument!r}")


class NumericsError(CpdError):
    pass


class QuadratureError(NumericsError):
    def __init__(self, message: str, estimate: float, error_estimate: float):
        self.estimate = estimate
        self.error_estimate = error_estimate
        super().__init__(f"{message} (last estimate {estimate!r}, error estimate {error_estimate:.3e})")


class OdeIntegrationError(NumericsError):
    def __init__(self, message: str, location: float):
        self.location = location
        super().__init__(f"{message} at t = {location!r}")


class NotSelfAdjointError(NumericsError):
    def __init__(self, defect: float):
        self.defect = defect
        super().__init__(f"matrix is not self-adjoint w.r.t. the metric (defect {defect:.3e})")


class GeometryError(CpdError):
    pass


class ImmersionError(GeometryError):
    def __init__(self, message: str, point: tuple[float, float]):
        self.point = point
        super().__init__(f"{message} at (x, y) = ({point[0]!r}, {point[1]!r})")


class ChartDomainError(GeometryError):
    pass


class ConstructionError(CpdError):
    pass


class DegenerateImmersionError(ConstructionError):
    def __init__(self, message: str, point: tuple[float, float]):
        self.point = point
        super().__init__(f"{message} at (x, y) = ({point[0]!r}, {point[1]!r})")


class AngleDomainError(ConstructionError):
    def __init__(self, x: float, theta: float):
        self.x = x
        self.theta = theta
        super().__init__(f"angle function leaves (0, pi) at x = {x!r}: theta = {theta!r}")


class CmcSingularityError(ConstructionError):
    def __init__(self, location: float):
        self.location = location
        super().__init__(f"phi + psi0 vanishes near x = {location!r}; CMC profile aborted")


class NotMinimalError(GeometryError):
    def __init__(self, max_abs_h: float):
        self.max_abs_h = max_abs_h
        super().__init__(f"surface is not minimal on the grid (max |H| = {max_abs_h:.3e})")


class ClassificationInconsistencyError(CpdError):
    pass


class SpecFileError(CpdError):
    pass


class ConfigError(CpdError):
    pass
