"""Error taxonomy shared across the package.

Every failure mode callers are expected to distinguish gets its own class;
all of them are ValueErrors so careless callers still fail loudly.
"""

from __future__ import annotations


class PartitionParseError(ValueError):
    """Malformed partition text; the message names the offending index."""


class DimensionMismatchError(ValueError):
    """Operands declare different ground-set sizes or matrix dimensions."""


class OrderViolationError(ValueError):
    """A refinement precondition (pi <= sigma) does not hold."""


class CrossingPartitionError(ValueError):
    """A crossing partition was passed where a noncrossing one is required."""


class CapacityError(ValueError):
    """A documented bound (enumeration size, moment order) was exceeded."""
