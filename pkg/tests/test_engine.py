"""Engine recursions: confluence, dual routes, conventions, closed forms."""

import itertools
from fractions import Fraction

import pytest

from freecumulants.engine import (
    Level,
    NestedPair,
    absorb_coefficients,
    classical_kappa,
    classical_kappa_conditional,
    classical_m,
    classical_nested_kappa,
    classical_nested_kappa_factored,
    expectation,
    free_cumulant,
    nested_cumulant,
    nested_moment,
    nested_semicumulant,
    partial_cumulant,
    phi_partitioned,
)
from freecumulants.errors import CrossingPartitionError, OrderViolationError
from freecumulants.exact import Matrix
from freecumulants.models import (
    ClassicalContext,
    ClassicalSpec,
    MatrixContext,
    MatrixModel,
    classical_expect,
)
from freecumulants.partitions import (
    LatticeKind,
    Partition,
    enumerate_partitions,
    interval_list,
    parse_partition,
)

F = Fraction
NC = LatticeKind.NONCROSSING


@pytest.fixture(scope="module")
def matrix_ctx():
    return MatrixContext(MatrixModel.random(generator_count=2, dimension=2, max_order=8, seed=12))


def gens(ctx, n):
    names = ctx.model.generator_names
    return [ctx.model.generators[names[i % len(names)]] for i in range(n)]


def all_extraction_orders(fn, max_choices=4, max_steps=4):
    """Evaluate fn under every extraction order, returning the set of values."""
    seen = []
    for order in itertools.product(range(max_choices), repeat=max_steps):
        try:
            value = fn(list(order))
        except ValueError:
            continue
        if value not in seen:
            seen.append(value)
    return seen


def test_partitioned_expectation_is_confluent(matrix_ctx):
    args = gens(matrix_ctx, 4)
    for part in enumerate_partitions(4, NC):
        values = all_extraction_orders(
            lambda order: phi_partitioned(matrix_ctx, part, args, Level.PSI, extraction_order=order)
        )
        assert len(values) == 1


def test_cumulant_routes_agree(matrix_ctx):
    for n in range(1, 5):
        args = gens(matrix_ctx, n)
        for part in enumerate_partitions(n, NC):
            a = free_cumulant(matrix_ctx, part, args, Level.PSI, method="moebius")
            b = free_cumulant(matrix_ctx, part, args, Level.PSI, method="recursion")
            assert a == b
            assert free_cumulant(matrix_ctx, part, args, Level.PSI, cross_check=True) == a


def test_nested_semicumulant_routes_agree(matrix_ctx):
    for n in range(1, 4):
        args = gens(matrix_ctx, n)
        for outer in enumerate_partitions(n, NC):
            for inner in interval_list(Partition.discrete(n), outer, NC):
                pair = NestedPair(inner, outer)
                assert nested_semicumulant(matrix_ctx, pair, args, cross_check=True) is not None


def test_unknown_method_is_rejected(matrix_ctx):
    with pytest.raises(ValueError, match="unknown method"):
        free_cumulant(matrix_ctx, Partition.full(2), gens(matrix_ctx, 2), method="guess")


def test_terminal_interval_block_multiplies_from_the_right(matrix_ctx):
    # psi along {1,3}{2} extracts psi(x2) into the slot between x1 and x3
    ctx = matrix_ctx
    x1, x2, x3 = gens(ctx, 3)
    part = parse_partition("{1,3}{2}")
    got = phi_partitioned(ctx, part, [x1, x2, x3], Level.PSI)
    assert got == ctx.psi(x1 * ctx.psi(x2) * x3)


def test_absorb_coefficients_positions(matrix_ctx):
    ctx = matrix_ctx
    x1, x2 = gens(ctx, 2)
    b0 = ctx.model.embed_b(Matrix([[F(1), F(0)], [F(2), F(1)]]))
    b1 = ctx.model.embed_b(Matrix([[F(0), F(1)], [F(1), F(3)]]))
    b2 = ctx.model.embed_b(Matrix([[F(2), F(0)], [F(0), F(5)]]))
    out = absorb_coefficients(ctx, [b0, b1, b2], [x1, x2])
    assert list(out) == [b0 * x1, b1 * x2 * b2]
    out = absorb_coefficients(ctx, [None, b1, None], [x1, x2])
    assert list(out) == [x1, b1 * x2]


def test_nested_pair_requires_refinement():
    with pytest.raises(OrderViolationError):
        NestedPair(Partition.full(3), parse_partition("{1,2}{3}"))


def test_crossing_partitions_are_rejected(matrix_ctx):
    crossing = parse_partition("{1,3}{2,4}")
    with pytest.raises(CrossingPartitionError):
        phi_partitioned(matrix_ctx, crossing, gens(matrix_ctx, 4), Level.PSI)


def test_two_point_expansion_of_the_total_cumulant(matrix_ctx):
    # C2^phi = phi(C2^psi) + C2^phi(psi(.), psi(.)), the two-term case
    ctx = matrix_ctx
    x1, x2 = gens(ctx, 2)
    top = Partition.full(2)
    lhs = free_cumulant(ctx, top, [x1, x2], Level.PHI)
    t1 = ctx.phi(free_cumulant(ctx, top, [x1, x2], Level.PSI))
    t2 = free_cumulant(ctx, top, [ctx.psi(x1), ctx.psi(x2)], Level.PHI)
    assert lhs == ctx.add(t1, t2)
    # and these are exactly the two nested cumulants
    assert t1 == nested_cumulant(ctx, NestedPair(top, top), [x1, x2])
    assert t2 == nested_cumulant(ctx, NestedPair(Partition.discrete(2), top), [x1, x2])


def test_singleton_expectations_collapse(matrix_ctx):
    ctx = matrix_ctx
    (x,) = gens(ctx, 1)
    one = Partition.full(1)
    assert free_cumulant(ctx, one, [x], Level.PSI) == ctx.psi(x)
    assert phi_partitioned(ctx, one, [x], Level.PHI) == ctx.phi(x)
    assert nested_cumulant(ctx, NestedPair(one, one), [x]) == ctx.phi(x)
    assert expectation(ctx, x, Level.PHI) == ctx.phi(x)


# ---------------------------------------------------------------------------
# classical wrappers


@pytest.fixture(scope="module")
def classical():
    spec = ClassicalSpec.random(["f", "g", "h"], max_order=8, seed=21)
    ring = spec.ring
    f, g, h = ring.var("f"), ring.var("g"), ring.var("h")
    return spec, (f * g + h, g * g, f + g * h)


def test_classical_kappa_matches_textbook_forms(classical):
    spec, _ = classical
    x = spec.ring.var("f")
    m1 = classical_expect(spec, x)
    m2 = classical_expect(spec, x * x)
    m3 = classical_expect(spec, x * x * x)
    two, three = Partition.full(2), Partition.full(3)
    assert classical_kappa(spec, two, [x, x]) == m2 - m1 ** 2
    assert classical_kappa(spec, three, [x, x, x]) == m3 - 3 * m2 * m1 + 2 * m1 ** 3
    assert classical_m(spec, parse_partition("{1,3}{2}"), [x, x, x]) == m2 * m1


def test_law_of_total_variance(classical):
    spec, polys = classical
    x = polys[0]
    keep = frozenset({"f"})
    top = Partition.full(2)
    var = classical_kappa(spec, top, [x, x])
    cond_var = classical_kappa_conditional(spec, top, [x, x], keep)
    mean_of_var = classical_expect(spec, cond_var)
    cond_mean = classical_kappa_conditional(spec, Partition.full(1), [x], keep)
    var_of_mean = classical_kappa(spec, top, [cond_mean, cond_mean])
    assert var == mean_of_var + var_of_mean


def test_nested_kappa_agrees_with_its_factored_form(classical):
    spec, polys = classical
    keep = frozenset({"f"})
    for n in (2, 3):
        args = list(polys[:n])
        outer = Partition.full(n)
        for inner in enumerate_partitions(n, LatticeKind.FULL):
            a = classical_nested_kappa(spec, outer, inner, args, keep)
            b = classical_nested_kappa_factored(spec, outer, inner, args, keep)
            assert a == b


def test_full_lattice_requires_a_commutative_context(matrix_ctx):
    with pytest.raises(CrossingPartitionError):
        # the matrix context only carries the noncrossing lattice, so a
        # crossing partition can never be evaluated, even at level phi
        free_cumulant(matrix_ctx, parse_partition("{1,3}{2,4}"), gens(matrix_ctx, 4), Level.PHI)


def test_partial_cumulant_rejects_incomparable_pairs(classical):
    spec, polys = classical
    ctx = ClassicalContext(spec)
    with pytest.raises(OrderViolationError):
        partial_cumulant(ctx, parse_partition("{1,2}{3}"), parse_partition("{1,3}{2}"),
                         list(polys), Level.PHI)


def test_nested_moment_restricts_the_inner_partition(matrix_ctx):
    ctx = matrix_ctx
    args = gens(ctx, 3)
    inner = parse_partition("{1}{2}{3}")
    outer = parse_partition("{1,3}{2}")
    got = nested_moment(ctx, NestedPair(inner, outer), args)
    x1, x2, x3 = args
    assert got == ctx.phi(ctx.psi(x1) * ctx.phi(ctx.psi(x2)) * ctx.psi(x3))
