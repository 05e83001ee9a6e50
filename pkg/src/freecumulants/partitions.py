"""Set partitions of {1, ..., n} and the noncrossing partition lattice.

A partition is stored canonically: every block is an ascending tuple and
blocks are ordered by their minima.  Two text formats are understood:

* block notation  ``{1,3}{2}{4}``   (the formatter always emits this one)
* bar notation    ``13|2|4``        (single-digit shorthand; use commas
  inside a segment, e.g. ``1,13|2``, once indices reach 10)

The refinement order ``pi <= sigma`` ("every pi-block sits inside a
sigma-block") makes the set of all partitions a lattice; the noncrossing
partitions form a sub-poset that is again a lattice, with the same meet
but a coarser join.  Enumeration walks restricted growth strings and is
deliberately capped at ``MAX_ENUM_N = 10`` (115975 strings); every
consumer in this package needs n <= 8.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

from .errors import (
    CapacityError,
    CrossingPartitionError,
    DimensionMismatchError,
    OrderViolationError,
    PartitionParseError,
)

MAX_ENUM_N = 10


class LatticeKind(Enum):
    """Which partition lattice an operation works in."""

    FULL = "full"
    NONCROSSING = "nc"


@dataclass(frozen=True)
class Partition:
    """A partition of {1, ..., n} into disjoint nonempty blocks.

    >>> Partition(4, ((2,), (3, 1), (4,))).blocks
    ((1, 3), (2,), (4,))
    >>> Partition.full(3)
    Partition(n=3, blocks=((1, 2, 3),))
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"partition size must be nonnegative, got {self.n}")
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        for b in blocks:
            if not b:
                raise ValueError("empty block")
        blocks = tuple(sorted(blocks, key=lambda b: b[0]))
        seen: set[int] = set()
        for b in blocks:
            for i in b:
                if i in seen:
                    raise ValueError(f"duplicate index {i}")
                seen.add(i)
        expected = set(range(1, self.n + 1))
        if seen != expected:
            stray = sorted(seen - expected) + sorted(expected - seen)
            raise ValueError(f"blocks do not partition 1..{self.n}: offending index {stray[0]}")
        object.__setattr__(self, "blocks", blocks)

    @staticmethod
    def discrete(n: int) -> Partition:
        """The all-singletons partition, the bottom of the lattice."""
        return Partition(n, tuple((i,) for i in range(1, n + 1)))

    @staticmethod
    def full(n: int) -> Partition:
        """The one-block partition, the top of the lattice."""
        return Partition(n, ((tuple(range(1, n + 1)),) if n else ()))

    @staticmethod
    def from_labels(labels: tuple[int, ...]) -> Partition:
        """Build a partition from position -> block-label assignments."""
        groups: dict[int, list[int]] = {}
        for pos, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(pos)
        return Partition(len(labels), tuple(tuple(g) for g in groups.values()))

    @property
    def size(self) -> int:
        """Number of blocks, written |pi|."""
        return len(self.blocks)

    @cached_property
    def labels(self) -> tuple[int, ...]:
        """labels[i-1] is the index (into blocks) of the block containing i."""
        out = [0] * self.n
        for k, b in enumerate(self.blocks):
            for i in b:
                out[i - 1] = k
        return tuple(out)

    def same_block(self, i: int, j: int) -> bool:
        return self.labels[i - 1] == self.labels[j - 1]

    @cached_property
    def is_noncrossing(self) -> bool:
        """True unless some i < j < k < l has i ~ k, j ~ l in distinct blocks.

        Checked in one left-to-right sweep: open blocks must close like
        nested brackets.

        >>> parse_partition("{1,3}{2,4}").is_noncrossing
        False
        >>> parse_partition("{1,4}{2,3}").is_noncrossing
        True
        """
        first = {b[0]: k for k, b in enumerate(self.blocks)}
        last = {b[-1]: k for k, b in enumerate(self.blocks)}
        stack: list[int] = []
        for i in range(1, self.n + 1):
            k = self.labels[i - 1]
            if i in first:
                stack.append(k)
            elif stack[-1] != k:
                return False
            if i in last:
                if stack[-1] != k:
                    return False
                stack.pop()
        return True

    @cached_property
    def is_interval(self) -> bool:
        """True when every block is a set of consecutive integers."""
        return all(b[-1] - b[0] + 1 == len(b) for b in self.blocks)

    def refines(self, other: Partition) -> bool:
        """True when every block of self lies inside a block of other.

        >>> parse_partition("{1,3}{2}{4}").refines(parse_partition("{1,3}{2,4}"))
        True
        """
        if self.n != other.n:
            raise DimensionMismatchError(f"cannot compare partitions of {self.n} and {other.n}")
        lab = other.labels
        return all(all(lab[i - 1] == lab[b[0] - 1] for i in b) for b in self.blocks)

    def restrict(self, positions: tuple[int, ...]) -> Partition:
        """Intersect blocks with ``positions`` and relabel those to 1..len.

        >>> parse_partition("{1,2,5}{3,4}").restrict((2, 3, 5))
        Partition(n=3, blocks=((1, 3), (2,)))
        """
        rank = {p: r for r, p in enumerate(sorted(positions), start=1)}
        blocks = []
        for b in self.blocks:
            kept = tuple(rank[i] for i in b if i in rank)
            if kept:
                blocks.append(kept)
        return Partition(len(rank), tuple(blocks))

    def interval_block_indices(self) -> tuple[int, ...]:
        """Indices of blocks that are intervals {k, ..., l}, in min order."""
        return tuple(k for k, b in enumerate(self.blocks) if b[-1] - b[0] + 1 == len(b))

    def __str__(self) -> str:
        return format_partition(self)


def parse_partition(text: str) -> Partition:
    """Parse block or bar notation; errors name the offending index.

    >>> parse_partition("{1,3}{2}{4}").blocks
    ((1, 3), (2,), (4,))
    >>> parse_partition("13|2|4") == parse_partition("{1,3}{2}{4}")
    True
    >>> parse_partition("")
    Partition(n=0, blocks=())
    """
    s = text.strip()
    if not s:
        return Partition(0, ())
    raw_blocks: list[list[int]] = []
    if "{" in s or "}" in s:
        pos = 0
        while pos < len(s):
            if s[pos].isspace():
                pos += 1
                continue
            if s[pos] != "{":
                raise PartitionParseError(f"expected '{{' at position {pos} in {text!r}")
            end = s.find("}", pos)
            if end < 0:
                raise PartitionParseError(f"unclosed block at position {pos} in {text!r}")
            raw_blocks.append(_parse_indices(s[pos + 1 : end], text))
            pos = end + 1
    else:
        for seg in s.split("|"):
            raw_blocks.append(_parse_indices(seg, text))
    indices = [i for b in raw_blocks for i in b]
    if not indices:
        raise PartitionParseError(f"no indices in {text!r}")
    seen: set[int] = set()
    for i in indices:
        if i < 1:
            raise PartitionParseError(f"index {i} out of range in {text!r}")
        if i in seen:
            raise PartitionParseError(f"duplicate index {i} in {text!r}")
        seen.add(i)
    n = max(seen)
    missing = sorted(set(range(1, n + 1)) - seen)
    if missing:
        raise PartitionParseError(f"missing index {missing[0]} in {text!r}")
    for b in raw_blocks:
        if not b:
            raise PartitionParseError(f"empty block in {text!r}")
    return Partition(n, tuple(tuple(b) for b in raw_blocks))


def _parse_indices(segment: str, text: str) -> list[int]:
    seg = segment.strip()
    if not seg:
        return []
    if "," in seg or " " in seg:
        tokens = [t for t in seg.replace(",", " ").split() if t]
    else:
        tokens = list(seg)
    out = []
    for t in tokens:
        if not t.isdigit():
            raise PartitionParseError(f"bad index {t!r} in {text!r}")
        out.append(int(t))
    return out


def format_partition(p: Partition) -> str:
    """Canonical block notation; the empty partition formats to ''."""
    return "".join("{" + ",".join(str(i) for i in b) + "}" for b in p.blocks)


def _growth_strings(n: int):
    """Restricted growth strings: a[0] = 0 and a[i] <= max(a[:i]) + 1."""
    if n == 0:
        yield ()
        return

    def rec(prefix: list[int], mx: int):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(mx + 2):
            prefix.append(v)
            yield from rec(prefix, max(mx, v))
            prefix.pop()

    yield from rec([0], 0)


@lru_cache(maxsize=None)
def enumerate_partitions(
    n: int, kind: LatticeKind, interval_only: bool = False
) -> tuple[Partition, ...]:
    """All partitions of {1..n} of the given kind, in growth-string order.

    >>> len(enumerate_partitions(4, LatticeKind.NONCROSSING))
    14
    >>> len(enumerate_partitions(4, LatticeKind.FULL))
    15
    >>> [str(p) for p in enumerate_partitions(3, LatticeKind.NONCROSSING, interval_only=True)]
    ['{1,2,3}', '{1,2}{3}', '{1}{2,3}', '{1}{2}{3}']
    """
    if n > MAX_ENUM_N:
        raise CapacityError(f"enumeration over n={n} exceeds the bound MAX_ENUM_N={MAX_ENUM_N}")
    out = []
    for labels in _growth_strings(n):
        p = Partition.from_labels(labels)
        if kind is LatticeKind.NONCROSSING and not p.is_noncrossing:
            continue
        if interval_only and not p.is_interval:
            continue
        out.append(p)
    return tuple(out)


def meet(pi: Partition, sigma: Partition) -> Partition:
    """Greatest common refinement; the same in both lattices.

    Blocks are the nonempty pairwise block intersections, so a meet of two
    noncrossing partitions is again noncrossing.
    """
    if pi.n != sigma.n:
        raise DimensionMismatchError(f"meet of partitions of {pi.n} and {sigma.n}")
    key = {}
    labels = []
    for i in range(pi.n):
        k = (pi.labels[i], sigma.labels[i])
        labels.append(key.setdefault(k, len(key)))
    return Partition.from_labels(tuple(labels))


def join(pi: Partition, sigma: Partition, kind: LatticeKind = LatticeKind.FULL) -> Partition:
    """Least common coarsening in the chosen lattice.

    In the noncrossing lattice the full-lattice join is coarsened further
    by merging crossing block pairs until none remain; each merge is
    forced on any noncrossing upper bound, so the result is least.

    >>> p, q = parse_partition("{1,3}{2}{4}"), parse_partition("{2,4}{1}{3}")
    >>> str(join(p, q, LatticeKind.FULL))
    '{1,3}{2,4}'
    >>> str(join(p, q, LatticeKind.NONCROSSING))
    '{1,2,3,4}'
    """
    if pi.n != sigma.n:
        raise DimensionMismatchError(f"join of partitions of {pi.n} and {sigma.n}")
    parent = list(range(pi.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in (pi, sigma):
        for b in p.blocks:
            for i in b[1:]:
                parent[find(i)] = find(b[0])
    groups: dict[int, list[int]] = {}
    for i in range(1, pi.n + 1):
        groups.setdefault(find(i), []).append(i)
    result = Partition(pi.n, tuple(tuple(g) for g in groups.values()))
    if kind is LatticeKind.FULL:
        return result
    for p in (pi, sigma):
        if not p.is_noncrossing:
            raise CrossingPartitionError(f"noncrossing join of crossing partition {p}")
    return _noncrossing_closure(result)


def _blocks_cross(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """True when the two blocks interleave a < c < a' < c' somewhere."""
    merged = sorted((i, 0) for i in a) + sorted((i, 1) for i in b)
    merged.sort()
    switches = sum(1 for x, y in itertools.pairwise(merged) if x[1] != y[1])
    return switches >= 3


def _noncrossing_closure(p: Partition) -> Partition:
    blocks = [set(b) for b in p.blocks]
    merged = True
    while merged:
        merged = False
        for i, j in itertools.combinations(range(len(blocks)), 2):
            if _blocks_cross(tuple(sorted(blocks[i])), tuple(sorted(blocks[j]))):
                blocks[i] |= blocks[j]
                del blocks[j]
                merged = True
                break
    return Partition(p.n, tuple(tuple(sorted(b)) for b in blocks))


def quotient(sigma: Partition, rho: Partition) -> Partition:
    """Collapse each rho-block to a point; requires rho <= sigma.

    The rho-blocks are numbered 1..|rho| by their minima, and block r of
    the result collects the rho-blocks lying in one sigma-block.

    >>> str(quotient(parse_partition("{1,2,5}{3,4}"), parse_partition("{1,2}{3,4}{5}")))
    '{1,3}{2}'
    """
    if not rho.refines(sigma):
        raise OrderViolationError(f"{rho} does not refine {sigma}")
    labels = tuple(sigma.labels[b[0] - 1] for b in rho.blocks)
    return Partition.from_labels(labels)


def interweave(pi: Partition, sigma: Partition) -> Partition:
    """Partition of {1..2n} placing pi on odd and sigma on even positions.

    >>> str(interweave(parse_partition("{1,2}"), parse_partition("{1}{2}")))
    '{1,3}{2}{4}'
    """
    if pi.n != sigma.n:
        raise DimensionMismatchError(f"interweave of partitions of {pi.n} and {sigma.n}")
    blocks = [tuple(2 * i - 1 for i in b) for b in pi.blocks]
    blocks += [tuple(2 * i for i in b) for b in sigma.blocks]
    return Partition(2 * pi.n, tuple(blocks))


def kreweras(pi: Partition) -> Partition:
    """Kreweras complement: the coarsest sigma interweaving pi without crossings.

    Writing each block as a cycle and c for the long cycle (1 2 ... n),
    the complement is the cycle partition of pi_cycles^{-1} . c.

    >>> str(kreweras(parse_partition("{1,3}{2}{4}")))
    '{1,2}{3,4}'
    >>> kreweras(Partition.full(4)) == Partition.discrete(4)
    True
    """
    if not pi.is_noncrossing:
        raise CrossingPartitionError(f"kreweras complement of crossing partition {pi}")
    n = pi.n
    if n == 0:
        return pi
    succ = {}
    for b in pi.blocks:
        for k, i in enumerate(b):
            succ[i] = b[(k + 1) % len(b)]
    inv = {v: k for k, v in succ.items()}
    perm = {x: inv[x % n + 1] for x in range(1, n + 1)}
    seen: set[int] = set()
    blocks = []
    for start in range(1, n + 1):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cycle.append(x)
            seen.add(x)
            x = perm[x]
        blocks.append(tuple(cycle))
    return Partition(n, tuple(blocks))


@lru_cache(maxsize=None)
def interval_list(pi: Partition, sigma: Partition, kind: LatticeKind) -> tuple[Partition, ...]:
    """All tau with pi <= tau <= sigma in the chosen lattice."""
    if not pi.refines(sigma):
        raise OrderViolationError(f"{pi} does not refine {sigma}")
    if kind is LatticeKind.NONCROSSING:
        for p in (pi, sigma):
            if not p.is_noncrossing:
                raise CrossingPartitionError(f"interval endpoint {p} is crossing")
    return tuple(
        tau
        for tau in enumerate_partitions(pi.n, kind)
        if pi.refines(tau) and tau.refines(sigma)
    )


@lru_cache(maxsize=None)
def _moebius_to_top(tau: Partition, kind: LatticeKind) -> int:
    """mu(tau, full(n)) via the defining recursion, memoized on tau."""
    top = Partition.full(tau.n)
    if tau == top:
        return 1
    return -sum(_moebius_to_top(rho, kind) for rho in interval_list(tau, top, kind) if rho != tau)


def moebius(pi: Partition, sigma: Partition, kind: LatticeKind) -> int:
    """Moebius function of the interval [pi, sigma].

    Intervals factor over the blocks of sigma, so the value is the product
    of top-interval values of pi restricted to each sigma-block (relabeled
    to a canonical ground set, which is what makes the memo effective).

    >>> moebius(Partition.discrete(4), Partition.full(4), LatticeKind.NONCROSSING)
    -5
    >>> moebius(Partition.discrete(4), Partition.full(4), LatticeKind.FULL)
    -6
    """
    if not pi.refines(sigma):
        raise OrderViolationError(f"{pi} does not refine {sigma}")
    if kind is LatticeKind.NONCROSSING:
        for p in (pi, sigma):
            if not p.is_noncrossing:
                raise CrossingPartitionError(f"moebius endpoint {p} is crossing")
    out = 1
    for block in sigma.blocks:
        out *= _moebius_to_top(pi.restrict(block), kind)
    return out
