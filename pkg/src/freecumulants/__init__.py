"""Exact cumulant calculus on partition lattices, with a verification CLI."""

from __future__ import annotations

from .errors import (
    CapacityError,
    CrossingPartitionError,
    DimensionMismatchError,
    OrderViolationError,
    PartitionParseError,
)
from .partitions import (
    LatticeKind,
    Partition,
    enumerate_partitions,
    format_partition,
    interval_list,
    interweave,
    join,
    kreweras,
    meet,
    moebius,
    parse_partition,
    quotient,
)
from .exact import Matrix, Poly, PolyRing, as_fraction
from .models import (
    ClassicalContext,
    ClassicalSpec,
    FactorizationModel,
    MatrixContext,
    MatrixModel,
    ScalarFreeContext,
    ScalarFreeSpec,
    TensorContext,
    TensorModel,
    WordContext,
    free_moment,
)
from .engine import (
    Level,
    NestedPair,
    expectation,
    free_cumulant,
    nested_cumulant,
    nested_moment,
    nested_semicumulant,
    partial_cumulant,
    phi_partitioned,
)
from .checks import ALL_CHECKS, CheckReport, replay_report, run_check

__all__ = [
    "CapacityError",
    "CrossingPartitionError",
    "DimensionMismatchError",
    "OrderViolationError",
    "PartitionParseError",
    "LatticeKind",
    "Partition",
    "enumerate_partitions",
    "format_partition",
    "interval_list",
    "interweave",
    "join",
    "kreweras",
    "meet",
    "moebius",
    "parse_partition",
    "quotient",
    "Matrix",
    "Poly",
    "PolyRing",
    "as_fraction",
    "ClassicalContext",
    "ClassicalSpec",
    "FactorizationModel",
    "MatrixContext",
    "MatrixModel",
    "ScalarFreeContext",
    "ScalarFreeSpec",
    "TensorContext",
    "TensorModel",
    "WordContext",
    "free_moment",
    "Level",
    "NestedPair",
    "expectation",
    "free_cumulant",
    "nested_cumulant",
    "nested_moment",
    "nested_semicumulant",
    "partial_cumulant",
    "phi_partitioned",
    "ALL_CHECKS",
    "CheckReport",
    "replay_report",
    "run_check",
]

__version__ = "0.1.0"
