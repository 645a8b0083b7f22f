"""
Exception types for assoc-clt.

Input errors are also ValueErrors so callers that only guard against bad
input keep working.
"""

from typing import List, Optional


class AssocCLTError(Exception):
    """Base class for all assoc-clt errors."""


class InvalidSchemeError(AssocCLTError, ValueError):
    """A block scheme cannot satisfy n = m*l + r with m >= 1."""


class AssociationViolationError(AssocCLTError, ValueError):
    """Family parameters break the sufficient condition for association."""


class CovarianceNotPSDError(AssocCLTError, ValueError):
    """Covariance matrix could not be factorized, even after jitter."""


class DegenerateVarianceError(AssocCLTError, ValueError):
    """s_n^2 is zero, so every normalized quantity is undefined."""


class UnknownComponentError(AssocCLTError, ValueError):
    """A registry lookup (distribution, map, family, theorem...) failed."""

    def __init__(self, kind: str, name: str, available: List[str]):
        self.kind = kind
        self.name = name
        self.available = available
        super().__init__(
            f"Unknown {kind}: {name}. Available: {', '.join(sorted(available))}"
        )


class PreconditionError(AssocCLTError, ValueError):
    """An operation was called outside its documented domain."""


class UnknownAnalyticError(AssocCLTError, ValueError):
    """No closed form is available for the requested quantity."""


class ConfigError(AssocCLTError, ValueError):
    """
    Configuration could not be loaded or validated.

    Attributes:
        problems: One human-readable line per offending field
        source: File the configuration came from (if any)
    """

    def __init__(self, problems: List[str], source: Optional[str] = None):
        self.problems = problems
        self.source = source
        where = f" in {source}" if source else ""
        super().__init__(f"Invalid configuration{where}:\n  " + "\n  ".join(problems))


class ReportWriteError(AssocCLTError, OSError):
    """Report destination is not writable."""
