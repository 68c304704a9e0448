"""Exception hierarchy for cantorbeam.

The CLI maps these onto exit codes: config/domain errors -> 2,
solver failures -> 3, cap errors -> 4.
"""


class CantorBeamError(Exception):
    """Base class for all cantorbeam errors."""


class DomainError(CantorBeamError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class ConfigError(CantorBeamError, ValueError):
    """Inconsistent or invalid configuration (boundary pair, grids, modes)."""


class ResourceError(CantorBeamError):
    """A requested decomposition or grid exceeds configured resource caps."""


class CapError(CantorBeamError):
    """A query lies beyond the solved/certified range of a spectrum."""


class SolverError(CantorBeamError):
    """Eigenvalue solving or certification failed."""


class CertificationError(SolverError):
    """A located root failed its oscillation or endpoint certification."""


class OverflowAtNode(SolverError):
    """State became non-finite during propagation; caller must renormalize."""

    def __init__(self, node: int, message: str | None = None):
        self.node = node
        super().__init__(message or f"non-finite state at grid node {node}")


class ZeroCountAmbiguous(SolverError):
    """Sampled values cannot decide the zero count at the grid resolution."""
