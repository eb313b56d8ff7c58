"""Exception hierarchy for netsteer."""


class NetsteerError(Exception):
    """Base class for all toolkit errors."""


class LayoutError(NetsteerError, ValueError):
    """Subsystem layout does not match the matrix it annotates."""


class PreconditionError(NetsteerError, ValueError):
    """An operation was called with inputs outside its domain."""


class InvalidStateError(PreconditionError):
    pass


class InvalidPOVMError(PreconditionError):
    pass


class IncompatiblePairError(PreconditionError):
    """The measurement pair admits no joint-measurability decomposition."""


class ConstraintError(PreconditionError):
    """Criterion settings violate a constraint needed by the derivation."""


class ResourceError(NetsteerError):
    """Problem size exceeds what the dense/enumerative code supports."""


class ScenarioError(PreconditionError):
    """A scenario document is malformed; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
