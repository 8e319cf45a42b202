"""Exception taxonomy for the package.

The CLI maps these onto stable exit codes, so new error kinds should extend
an existing class rather than invent a parallel hierarchy.
"""

from __future__ import annotations


class CplpError(Exception):
    """Base class for package errors."""


class DimensionMismatch(CplpError):
    """Operator or vector shape inconsistent with the declared spaces."""


class NotHermitian(CplpError):
    """Hermiticity residual above tolerance at construction time."""


class InvalidState(CplpError):
    """Density matrix, population vector or parameter fails validation."""


class EnergyIdentityError(CplpError):
    """Internal consistency identity violated; signals an index-convention bug."""


class GroundStateError(CplpError):
    """Ground state degenerate or rank-deficient where a bound needs otherwise."""


class ModelError(CplpError):
    """Malformed or unsupported model description."""
