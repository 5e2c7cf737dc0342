"""
Exception types raised by the qpsoc core.

Report-style checks (tree decomposition validation, constraint validation)
return findings instead of raising.
"""


class QPSocError(Exception):
    """Base class for every error raised by qpsoc."""


class InstanceError(QPSocError, ValueError):
    """Malformed or inconsistent QP instance."""


class MonomialError(QPSocError, ValueError):
    """Invalid monomial or linear-form request (overlap, size cap, missing value)."""


class SupportViolationError(QPSocError, ValueError):
    """A perspective denominator is negative: its support inequality is violated."""


class RelaxationError(QPSocError, ValueError):
    """Invalid perspective window or hierarchy level."""


class DecompositionError(QPSocError, ValueError):
    """Tree decomposition precondition violated."""


class ModelError(QPSocError, ValueError):
    """Conic model assembly or schema error."""


class OracleBudgetError(QPSocError, RuntimeError):
    """Instance too large for brute-force enumeration."""


class AdapterError(QPSocError, RuntimeError):
    """Solver adapter missing or unusable."""
