"""Lattice layer against independent oracles.

Every nontrivial algorithm here is cross-checked against a brute-force
or closed-form oracle that shares no code with the implementation:
counts against Catalan/Bell, the noncrossing test against the
four-index scan, the Kreweras complement and both lattice operations
against exhaustive search, and the Moebius function against the bare
convolution recursion.
"""

import doctest
import itertools
import math

import pytest
from hypothesis import given, strategies as st

import freecumulants.partitions
from freecumulants.errors import (
    CapacityError,
    CrossingPartitionError,
    OrderViolationError,
    PartitionParseError,
)
from freecumulants.partitions import (
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

NC = LatticeKind.NONCROSSING
FULL = LatticeKind.FULL


def catalan(n):
    return math.comb(2 * n, n) // (n + 1)


def bell(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def crossing_oracle(p: Partition) -> bool:
    """Direct four-index scan for a crossing."""
    for i, j, k, l in itertools.combinations(range(1, p.n + 1), 4):
        if p.same_block(i, k) and p.same_block(j, l) and not p.same_block(i, j):
            return True
    return False


@st.composite
def set_partitions(draw, max_n=7):
    n = draw(st.integers(0, max_n))
    labels, top = [], -1
    for _ in range(n):
        v = draw(st.integers(0, top + 1))
        labels.append(v)
        top = max(top, v)
    return Partition.from_labels(tuple(labels))


def test_doctests():
    assert doctest.testmod(freecumulants.partitions).failed == 0


def test_counts_match_catalan_and_bell():
    for n in range(9):
        assert len(enumerate_partitions(n, NC)) == catalan(n)
    for n in range(7):
        assert len(enumerate_partitions(n, FULL)) == bell(n)


def test_interval_partition_count_is_a_power_of_two():
    # compositions of n <-> interval partitions
    for n in range(1, 8):
        assert len(enumerate_partitions(n, NC, interval_only=True)) == 2 ** (n - 1)


def test_enumeration_capacity_is_enforced():
    with pytest.raises(CapacityError):
        enumerate_partitions(11, FULL)


def test_noncrossing_flag_matches_four_index_scan():
    for n in range(7):
        for p in enumerate_partitions(n, FULL):
            assert p.is_noncrossing == (not crossing_oracle(p))


def test_noncrossing_enumeration_is_the_noncrossing_slice():
    for n in range(7):
        nc = set(enumerate_partitions(n, NC))
        assert nc == {p for p in enumerate_partitions(n, FULL) if p.is_noncrossing}


def test_parse_format_roundtrip_exhaustive():
    for n in range(7):
        for p in enumerate_partitions(n, FULL):
            assert parse_partition(format_partition(p)) == p


def test_parse_accepts_bar_notation_and_spaces():
    assert parse_partition("1 3|2|4") == parse_partition("{1, 3}{2}{4}")
    assert parse_partition("") == Partition(0, ())


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("{1,3}{2", "unclosed"),
        ("{1,3}{3,2}", "duplicate index 3"),
        ("{1,4}{2}", "missing index 3"),
        ("{0,1}", "0"),
        ("{1,x}", "x"),
    ],
)
def test_parse_errors_name_the_offender(text, fragment):
    with pytest.raises(PartitionParseError, match=fragment):
        parse_partition(text)


def test_blocks_must_cover_the_ground_set():
    with pytest.raises(ValueError, match="offending index 3"):
        Partition(3, ((1, 2),))


@given(set_partitions())
def test_roundtrip_and_restriction_properties(p):
    assert parse_partition(format_partition(p)) == p
    evens = tuple(range(2, p.n + 1, 2))
    r = p.restrict(evens)
    assert r.n == len(evens)
    for a, b in itertools.combinations(range(len(evens)), 2):
        assert r.same_block(a + 1, b + 1) == p.same_block(evens[a], evens[b])
    if p.is_noncrossing:
        assert r.is_noncrossing


@given(set_partitions(max_n=6), set_partitions(max_n=6))
def test_lattice_laws_on_random_pairs(p, q):
    if p.n != q.n:
        return
    m = meet(p, q)
    assert m.refines(p) and m.refines(q)
    j = join(p, q, FULL)
    assert p.refines(j) and q.refines(j)
    assert meet(p, j) == p
    assert join(p, m, FULL) == p


def test_meet_is_the_greatest_lower_bound():
    for kind, n_max in ((NC, 5), (FULL, 5)):
        for n in range(n_max + 1):
            everything = enumerate_partitions(n, kind)
            for p, q in itertools.combinations_with_replacement(everything, 2):
                m = meet(p, q)
                lower = [t for t in everything if t.refines(p) and t.refines(q)]
                assert m in lower
                assert all(t.refines(m) for t in lower)


def test_join_is_the_least_upper_bound():
    for kind, n_max in ((NC, 5), (FULL, 5)):
        for n in range(n_max + 1):
            everything = enumerate_partitions(n, kind)
            for p, q in itertools.combinations_with_replacement(everything, 2):
                j = join(p, q, kind)
                upper = [t for t in everything if p.refines(t) and q.refines(t)]
                assert j in upper
                assert all(j.refines(t) for t in upper)


def test_noncrossing_join_can_exceed_the_full_lattice_join():
    p = parse_partition("{1,3}{2}{4}")
    q = parse_partition("{2,4}{1}{3}")
    assert join(p, q, FULL) == parse_partition("{1,3}{2,4}")
    assert join(p, q, NC) == Partition.full(4)


def test_kreweras_matches_the_maximality_oracle():
    for n in range(7):
        everything = enumerate_partitions(n, NC)
        for p in everything:
            fitting = [s for s in everything if interweave(p, s).is_noncrossing]
            best = max(fitting, key=lambda s: sum(1 for t in fitting if t.refines(s)))
            assert all(t.refines(best) for t in fitting)
            assert kreweras(p) == best


def test_kreweras_known_values():
    assert kreweras(parse_partition("{1,3}{2}{4}")) == parse_partition("{1,2}{3,4}")
    assert kreweras(Partition.full(5)) == Partition.discrete(5)
    assert kreweras(Partition.discrete(5)) == Partition.full(5)


def test_interweave_places_factors_on_odd_and_even_positions():
    p = parse_partition("{1,2}{3}")
    q = parse_partition("{1,3}{2}")
    w = interweave(p, q)
    assert w.n == 6
    assert w.restrict((1, 3, 5)) == p
    assert w.restrict((2, 4, 6)) == q


def test_moebius_matches_the_convolution_recursion():
    memo = {}

    def oracle(p, s, kind):
        if p == s:
            return 1
        key = (p, s, kind)
        if key not in memo:
            memo[key] = -sum(
                oracle(p, r, kind) for r in interval_list(p, s, kind) if r != s
            )
        return memo[key]

    for kind, n_max in ((NC, 5), (FULL, 4)):
        for n in range(n_max + 1):
            everything = enumerate_partitions(n, kind)
            for s in everything:
                for p in interval_list(Partition.discrete(n), s, kind):
                    assert moebius(p, s, kind) == oracle(p, s, kind)


def test_moebius_closed_forms():
    for n in range(1, 8):
        bottom, top = Partition.discrete(n), Partition.full(n)
        assert moebius(bottom, top, NC) == (-1) ** (n - 1) * catalan(n - 1)
        if n <= 6:
            assert moebius(bottom, top, FULL) == (-1) ** (n - 1) * math.factorial(n - 1)


def test_interval_list_validates_its_endpoints():
    with pytest.raises(OrderViolationError):
        interval_list(Partition.full(3), Partition.discrete(3), NC)
    with pytest.raises(CrossingPartitionError):
        interval_list(Partition.discrete(4), parse_partition("{1,3}{2,4}"), NC)


def test_quotient_collapses_blocks_by_minimum():
    sigma = parse_partition("{1,2,5}{3,4}")
    rho = parse_partition("{1,2}{3,4}{5}")
    assert quotient(sigma, rho) == parse_partition("{1,3}{2}")
    with pytest.raises(OrderViolationError):
        quotient(rho, sigma)


def test_quotient_gives_the_upper_interval_poset_in_the_full_lattice():
    # over all partitions, [rho, top] looks like the smaller lattice on rho's blocks
    for n in range(6):
        for rho in enumerate_partitions(n, FULL):
            upper = interval_list(rho, Partition.full(n), FULL)
            image = {quotient(s, rho) for s in upper}
            assert image == set(enumerate_partitions(rho.size, FULL))
            for a in upper:
                for b in upper:
                    assert a.refines(b) == quotient(a, rho).refines(quotient(b, rho))


def test_quotient_embeds_noncrossing_upper_intervals():
    # in the noncrossing lattice the image may be a strict subset (merging
    # non-adjacent blocks can cross), but the order embedding still holds
    for n in range(6):
        for rho in enumerate_partitions(n, NC):
            upper = interval_list(rho, Partition.full(n), NC)
            image = {quotient(s, rho) for s in upper}
            assert len(image) == len(upper)
            assert image <= set(enumerate_partitions(rho.size, FULL))
            for a in upper:
                for b in upper:
                    assert a.refines(b) == quotient(a, rho).refines(quotient(b, rho))
