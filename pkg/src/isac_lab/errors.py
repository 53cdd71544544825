"""Exception types shared across the library."""


class IsacLabError(ValueError):
    """Base class for all library-specific errors."""


class ConfigError(IsacLabError):
    """Invalid system configuration or scenario file."""


class AssignmentError(IsacLabError):
    """Resource assignment violates its invariants (range / duplicates)."""


class CapacityError(IsacLabError):
    """Requested enumeration or allocation exceeds a feasibility guard."""


class DegeneracyError(IsacLabError):
    """Index distribution is degenerate (zero variance) so the bound diverges."""


class OverlapError(IsacLabError):
    """Subcarrier sets of different UEs overlap; interference-free
    compensation does not exist in that case."""


class CompensationError(IsacLabError):
    """Data grid cannot be compensated (near-zero symbol on an assigned
    subcarrier)."""
