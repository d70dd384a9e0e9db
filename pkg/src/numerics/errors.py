# src/numerics/errors.py
#18 Oct 2026

class SplitFormError(RuntimeError):
    """Base class for every error raised by the numerical core."""


class MeanDomainError(SplitFormError, ValueError):
    def __init__(self, kind: str, value):
        self.kind = kind
        self.value = value
        super().__init__(f"[Means] {kind} mean needs strictly positive, finite arguments (got {value!r})")


class InvalidStateError(SplitFormError):
    """
    A nodal state left the physically admissible set.
    - quantity: "density", "pressure" or "finite"
    - value: the offending value
    - location: node index, or (element, i, j) for tensor-product meshes
    """

    def __init__(self, quantity: str, value: float, location=None):
        self.quantity = quantity
        self.value = value
        self.location = location
        where = f" at {location}" if location is not None else ""
        if quantity == "finite":
            message = f"non-finite state value {value!r}{where}"
        else:
            message = f"non-positive {quantity} {value!r}{where}"
        super().__init__(message)

    @property
    def reason(self) -> str:
        if self.quantity == "finite":
            return "non-finite state"
        return f"negative {self.quantity}"


class NonConvexEntropyError(SplitFormError):
    def __init__(self, ratio: float, gamma: float, s: float):
        self.ratio = ratio
        self.gamma = gamma
        self.s = s
        super().__init__(f"h''/h' = {ratio!r} >= 1/gamma = {1.0 / gamma!r} at s = {s!r}")


class ConstructionError(SplitFormError):
    pass


class JacobianError(SplitFormError):
    def __init__(self, dof: int, cause: Exception):
        self.dof = dof
        self.cause = cause
        super().__init__(f"perturbing DOF {dof} produced an invalid state: {cause}")


class SpectrumError(SplitFormError):
    pass


class ConfigError(SplitFormError, ValueError):
    pass
