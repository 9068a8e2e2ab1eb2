"""
Exceptions raised by the simulator core.
"""


class RapsimError(Exception):
    """Base class for simulator errors."""


class ConfigurationError(RapsimError):
    """Invalid parameters, config file or scenario (e.g. no customer)."""


class GenerationError(RapsimError):
    """A scenario could not be generated (e.g. more agents than free cells)."""


class PreconditionError(RapsimError):
    """An operation was called with positions outside the map or on walls."""


class InfeasibleSelectionError(RapsimError):
    """A selection contains an agent with no movement path to the customer."""


class OracleLimitError(RapsimError):
    """The brute-force allocator was asked to enumerate too large a roster."""
