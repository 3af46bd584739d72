"""Exception hierarchy shared by all stresskit modules."""


class StressKitError(Exception):
    """Base class for all library errors."""


class UsageError(StressKitError, ValueError):
    """Invalid arguments (empty inputs, mismatched dimensions, ...)."""


class DegenerateDirectionError(StressKitError):
    """A direction requested inside a flat collapses to zero."""


class DegenerateEdgeError(StressKitError):
    """The normals at an edge do not admit a decomposition with nonzero coefficients."""

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class NonGeneralPositionError(StressKitError):
    """A Cayley construction hit an empty or wrong-dimensional intermediate flat."""


class SurgeryError(StressKitError):
    """An elementary surgery-flip was requested where it does not apply."""


class UnsupportedCellError(StressKitError):
    """A cell cannot be fan-triangulated by the supported procedure."""


class ConstructionError(StressKitError):
    """A generator was given parameters violating its geometric constraints."""

    def __init__(self, message, mismatch=None):
        super().__init__(message)
        self.mismatch = mismatch


class GenericityError(StressKitError):
    """Two adjacent faces of a realization share the same affine span."""


class FormatError(StressKitError):
    """A framework file could not be parsed."""
