"""Concrete probability models: towers C inside B inside A.

Every model packages an algebra A, a conditional expectation psi onto a
subalgebra B, and a scalar expectation phi onto C, as a
``ProbabilityContext`` the cumulant engine can drive generically.  The
contexts here:

* ``ClassicalContext``   commuting polynomial random variables; psi
  integrates out the variables not in ``keep``, phi integrates out all.
* ``MatrixContext``      d x d matrices with independent random entries;
  psi is entrywise expectation, phi the normalized trace of psi.
* ``ScalarFreeContext``  words in free families of scalar variables;
  B = C, both expectations are the free moment functional.
* ``WordContext``        a scalar free family sitting inside d x d
  matrices; psi is *defined* by the factorization rule, see
  ``FactorizationModel``.
* ``TensorContext``      simple tensors (word, vector) of a free family
  with a commutative d-point algebra; psi kills the word factor.

All randomness is drawn from ``random.Random(seed)`` with numerators in
[-9, 9] and denominators in {1, 2, 3}; drawn values travel in ``to_data``
payloads so any run can be reproduced from its report alone.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .errors import CapacityError, DimensionMismatchError
from .exact import Matrix, Poly, PolyRing, as_fraction, scalar_embed
from .partitions import LatticeKind, Partition, enumerate_partitions

DEFAULT_MAX_ORDER = 8


def draw_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.choice((1, 2, 3)))


class ProbabilityContext:
    """Interface the cumulant engine works against.

    Elements of A are opaque to the engine; a context supplies the ring
    operations, the two expectations, and membership predicates for the
    subalgebras.  ``phi`` returns the C-value embedded back into A so the
    engine can keep multiplying; ``phi_scalar`` exposes the bare rational.
    """

    kind: LatticeKind = LatticeKind.NONCROSSING
    commutative: bool = False

    def unit(self):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def scale(self, c: Fraction, x):
        raise NotImplementedError

    def psi(self, x):
        raise NotImplementedError

    def phi(self, x):
        raise NotImplementedError

    def phi_scalar(self, x) -> Fraction:
        raise NotImplementedError

    def in_b(self, x) -> bool:
        raise NotImplementedError

    def in_c(self, x) -> bool:
        raise NotImplementedError

    def neg(self, x):
        return self.scale(Fraction(-1), x)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def embed_scalar(self, c) -> object:
        return self.scale(as_fraction(c), self.unit())

    def product(self, xs) -> object:
        acc = self.unit()
        for x in xs:
            acc = self.mul(acc, x)
        return acc

    def describe(self, x) -> str:
        return str(x)


def centered(ctx: ProbabilityContext, x, level: str = "C"):
    """x minus its expectation; level 'B' uses psi, level 'C' uses phi."""
    if level == "B":
        return ctx.sub(x, ctx.psi(x))
    if level == "C":
        return ctx.sub(x, ctx.phi(x))
    raise ValueError(f"level must be 'B' or 'C', got {level!r}")


# ---------------------------------------------------------------------------
# classical: independent scalar variables with prescribed moments


class ClassicalSpec:
    """Independent scalar random variables given by moment sequences.

    ``moments[v][k-1]`` is E[v^k]; every sequence carries ``max_order``
    entries and any request beyond that raises CapacityError naming the
    variable, so degree overflows surface at the first bad monomial.
    """

    def __init__(self, moments: dict[str, tuple], max_order: int = DEFAULT_MAX_ORDER):
        self.max_order = int(max_order)
        self.moments: dict[str, tuple[Fraction, ...]] = {}
        for name, seq in moments.items():
            seq = tuple(as_fraction(m) for m in seq)
            if len(seq) < self.max_order:
                raise CapacityError(
                    f"variable {name!r} has {len(seq)} moments, needs {self.max_order}"
                )
            self.moments[name] = seq[: self.max_order]
        self.variables = tuple(self.moments)
        self.ring = PolyRing(self.variables)

    @classmethod
    def random(
        cls, variables, max_order: int = DEFAULT_MAX_ORDER, seed: int = 0
    ) -> ClassicalSpec:
        rng = random.Random(seed)
        return cls(
            {v: tuple(draw_fraction(rng) for _ in range(max_order)) for v in variables},
            max_order,
        )

    def moment(self, name: str, k: int) -> Fraction:
        if k == 0:
            return Fraction(1)
        if k > self.max_order:
            raise CapacityError(
                f"moment of order {k} of variable {name!r} exceeds max_order={self.max_order}"
            )
        return self.moments[name][k - 1]

    def to_data(self) -> dict:
        return {
            "max_order": self.max_order,
            "variables": [
                {"name": v, "moments": [str(m) for m in self.moments[v]]}
                for v in self.variables
            ],
        }

    @classmethod
    def from_data(cls, data: dict) -> ClassicalSpec:
        return cls(
            {row["name"]: tuple(row["moments"]) for row in data["variables"]},
            data.get("max_order", DEFAULT_MAX_ORDER),
        )


def classical_expect(spec: ClassicalSpec, p: Poly) -> Fraction:
    """E[p] for independent variables: factor each monomial over moments."""
    total = Fraction(0)
    for mono, coeff in p.terms.items():
        val = coeff
        for name, e in zip(spec.ring.variables, mono):
            if e:
                val *= spec.moment(name, e)
        total += val
    return total


def classical_conditional_expect(spec: ClassicalSpec, p: Poly, keep: frozenset[str]) -> Poly:
    """E[p | keep]: integrate out every variable outside ``keep``."""
    out = spec.ring.zero
    for mono, coeff in p.terms.items():
        val = coeff
        kept = [0] * len(spec.ring.variables)
        for k, (name, e) in enumerate(zip(spec.ring.variables, mono)):
            if not e:
                continue
            if name in keep:
                kept[k] = e
            else:
                val *= spec.moment(name, e)
        out = out + Poly(spec.ring, {tuple(kept): val})
    return out


class ClassicalContext(ProbabilityContext):
    """Polynomials in independent variables; psi conditions on ``keep``."""

    kind = LatticeKind.FULL
    commutative = True

    def __init__(self, spec: ClassicalSpec, keep: frozenset[str] = frozenset()):
        unknown = set(keep) - set(spec.variables)
        if unknown:
            raise ValueError(f"keep names unknown variables {sorted(unknown)}")
        self.spec = spec
        self.keep = frozenset(keep)

    def unit(self):
        return self.spec.ring.one

    def mul(self, x, y):
        return x * y

    def add(self, x, y):
        return x + y

    def scale(self, c, x):
        return x * as_fraction(c)

    def psi(self, x):
        return classical_conditional_expect(self.spec, x, self.keep)

    def phi(self, x):
        return self.spec.ring.const(classical_expect(self.spec, x))

    def phi_scalar(self, x):
        return classical_expect(self.spec, x)

    def in_b(self, x):
        return all(
            e == 0
            for mono in x.terms
            for name, e in zip(self.spec.ring.variables, mono)
            if name not in self.keep
        )

    def in_c(self, x):
        return x.is_constant


# ---------------------------------------------------------------------------
# matrix model: d x d matrices of independent scalar entries


class MatrixModel:
    """Generators are d x d matrices whose entries are independent variables.

    psi takes entrywise (conditional-on-nothing) expectation, landing in
    the constant matrices B = M_d(Q); phi is the normalized trace of psi.
    The entry variables of generator g are named ``g_ij`` (0-based).
    """

    def __init__(self, spec: ClassicalSpec, dimension: int, generator_names: tuple[str, ...]):
        self.spec = spec
        self.d = int(dimension)
        self.generator_names = tuple(generator_names)
        self.ring = spec.ring
        self.generators: dict[str, Matrix] = {}
        for g in self.generator_names:
            rows = []
            for i in range(self.d):
                rows.append([self.ring.var(f"{g}_{i}{j}") for j in range(self.d)])
            self.generators[g] = Matrix(rows)
        self._spot_check()

    @classmethod
    def random(
        cls,
        generator_count: int = 2,
        dimension: int = 2,
        max_order: int = DEFAULT_MAX_ORDER,
        seed: int = 0,
    ) -> MatrixModel:
        names = tuple(f"g{k}" for k in range(1, generator_count + 1))
        variables = [f"{g}_{i}{j}" for g in names for i in range(dimension) for j in range(dimension)]
        spec = ClassicalSpec.random(variables, max_order, seed)
        return cls(spec, dimension, names)

    def _spot_check(self) -> None:
        # unitality and bimodularity certify the tower before any use
        ctx = MatrixContext(self)
        one = ctx.unit()
        if ctx.psi(one) != one or ctx.phi_scalar(one) != 1:
            raise AssertionError("expectations are not unital")
        if self.generator_names:
            x = self.generators[self.generator_names[0]]
            b = self.embed_b(Matrix([[Fraction(k + 2 * l + 1) for l in range(self.d)] for k in range(self.d)]))
            lhs = ctx.psi(ctx.mul(b, ctx.mul(x, b)))
            rhs = ctx.mul(b, ctx.mul(ctx.psi(x), b))
            if lhs != rhs:
                raise AssertionError("psi is not bimodular")

    def embed_b(self, m: Matrix) -> Matrix:
        """Constant rational matrix, entered into the polynomial algebra."""
        if m.dimension != self.d:
            raise DimensionMismatchError(f"expected {self.d}x{self.d} matrix")
        return Matrix([[self.ring.const(a) for a in row] for row in m.entries])

    def to_data(self) -> dict:
        data = self.spec.to_data()
        data["dimension"] = self.d
        data["generators"] = list(self.generator_names)
        return data

    @classmethod
    def from_data(cls, data: dict) -> MatrixModel:
        return cls(ClassicalSpec.from_data(data), data["dimension"], tuple(data["generators"]))


def matrix_psi(model: MatrixModel, x: Matrix) -> Matrix:
    """Entrywise expectation, a constant matrix in B = M_d(Q)."""
    return Matrix(
        [[classical_expect(model.spec, a) for a in row] for row in x.entries]
    )


def matrix_phi(model: MatrixModel, x: Matrix) -> Fraction:
    """Normalized trace after entrywise expectation."""
    return matrix_psi(model, x).normalized_trace()


class MatrixContext(ProbabilityContext):
    kind = LatticeKind.NONCROSSING
    commutative = False

    def __init__(self, model: MatrixModel):
        self.model = model

    def unit(self):
        return Matrix.identity(self.model.d, self.model.ring.one)

    def mul(self, x, y):
        return x * y

    def add(self, x, y):
        return x + y

    def scale(self, c, x):
        return x.scale(as_fraction(c))

    def psi(self, x):
        return self.model.embed_b(matrix_psi(self.model, x))

    def phi(self, x):
        return scalar_embed(matrix_phi(self.model, x), self.model.d, self.model.ring.one)

    def phi_scalar(self, x):
        return matrix_phi(self.model, x)

    def in_b(self, x):
        return all(a.is_constant for row in x.entries for a in row)

    def in_c(self, x):
        return self.in_b(x) and x == self.phi(x)


# ---------------------------------------------------------------------------
# scalar free families


class ScalarFreeSpec:
    """Free families of scalar variables with prescribed joint cumulants.

    ``families`` maps a family name to its generator names; ``cumulants``
    assigns a rational to every word (tuple of generators, all from one
    family) of length 1..max_order.  Moments of arbitrary mixed words then
    come from the noncrossing moment-cumulant sum, with mixed blocks
    contributing zero.
    """

    def __init__(
        self,
        families: dict[str, tuple[str, ...]],
        cumulants: dict[tuple[str, ...], Fraction],
        max_order: int = DEFAULT_MAX_ORDER,
    ):
        self.max_order = int(max_order)
        self.families = {f: tuple(gens) for f, gens in families.items()}
        self.family_of: dict[str, str] = {}
        for f, gens in self.families.items():
            for g in gens:
                if g in self.family_of:
                    raise ValueError(f"generator {g!r} appears in two families")
                self.family_of[g] = f
        self.cumulants = {tuple(w): as_fraction(c) for w, c in cumulants.items()}
        for f, gens in self.families.items():
            for k in range(1, self.max_order + 1):
                for word in itertools.product(gens, repeat=k):
                    if word not in self.cumulants:
                        raise ValueError(f"missing cumulant for word {word}")
        self._moment_cache: dict[tuple[str, ...], Fraction] = {}

    @classmethod
    def random(
        cls,
        families: dict[str, tuple[str, ...]],
        max_order: int = DEFAULT_MAX_ORDER,
        seed: int = 0,
    ) -> ScalarFreeSpec:
        rng = random.Random(seed)
        cumulants = {}
        for f in sorted(families):
            for k in range(1, max_order + 1):
                for word in itertools.product(families[f], repeat=k):
                    cumulants[word] = draw_fraction(rng)
        return cls(families, cumulants, max_order)

    def cumulant(self, word: tuple[str, ...]) -> Fraction:
        if len(word) > self.max_order:
            raise CapacityError(
                f"cumulant of order {len(word)} exceeds max_order={self.max_order}"
            )
        fams = {self.family_of[g] for g in word}
        if len(fams) > 1:
            return Fraction(0)
        return self.cumulants[word]

    def to_data(self) -> dict:
        rows = []
        for f in sorted(self.families):
            gens = self.families[f]
            words = {}
            for k in range(1, self.max_order + 1):
                for word in itertools.product(gens, repeat=k):
                    words[" ".join(word)] = str(self.cumulants[word])
            rows.append({"name": f, "generators": list(gens), "cumulants": words})
        return {"max_order": self.max_order, "families": rows}

    @classmethod
    def from_data(cls, data: dict) -> ScalarFreeSpec:
        max_order = data.get("max_order", DEFAULT_MAX_ORDER)
        families = {}
        cumulants: dict[tuple[str, ...], Fraction] = {}
        for row in data["families"]:
            name = row["name"]
            table = row["cumulants"]
            if isinstance(table, dict):
                families[name] = tuple(row["generators"])
                for key, val in table.items():
                    cumulants[tuple(key.split())] = as_fraction(val)
            else:
                # compact form: one generator named like its family,
                # cumulants[k-1] is the order-k cumulant
                families[name] = (name,)
                if len(table) < max_order:
                    raise CapacityError(
                        f"family {name!r} lists {len(table)} cumulants, needs {max_order}"
                    )
                for k in range(1, max_order + 1):
                    cumulants[(name,) * k] = as_fraction(table[k - 1])
        return cls(families, cumulants, max_order)


def free_moment(spec: ScalarFreeSpec, word: tuple[str, ...]) -> Fraction:
    """Sum over noncrossing partitions of blockwise cumulants.

    Blocks mixing families contribute zero, which is exactly freeness of
    the families with respect to this functional.
    """
    word = tuple(word)
    if not word:
        return Fraction(1)
    if len(word) > spec.max_order:
        raise CapacityError(f"moment of order {len(word)} exceeds max_order={spec.max_order}")
    cached = spec._moment_cache.get(word)
    if cached is not None:
        return cached
    total = Fraction(0)
    for part in enumerate_partitions(len(word), LatticeKind.NONCROSSING):
        prod = Fraction(1)
        for block in part.blocks:
            prod *= spec.cumulant(tuple(word[i - 1] for i in block))
            if prod == 0:
                break
        total += prod
    spec._moment_cache[word] = total
    return total


class ScalarFreeContext(ProbabilityContext):
    """Linear combinations of words in the free generators; B = C."""

    kind = LatticeKind.NONCROSSING
    commutative = False

    def __init__(self, spec: ScalarFreeSpec):
        self.spec = spec

    def gen(self, name: str) -> dict:
        if name not in self.spec.family_of:
            raise ValueError(f"unknown generator {name!r}")
        return {(name,): Fraction(1)}

    def unit(self):
        return {(): Fraction(1)}

    def mul(self, x, y):
        out: dict[tuple[str, ...], Fraction] = {}
        for w1, c1 in x.items():
            for w2, c2 in y.items():
                w = w1 + w2
                out[w] = out.get(w, Fraction(0)) + c1 * c2
        return {w: c for w, c in out.items() if c != 0}

    def add(self, x, y):
        out = dict(x)
        for w, c in y.items():
            out[w] = out.get(w, Fraction(0)) + c
        return {w: c for w, c in out.items() if c != 0}

    def scale(self, c, x):
        c = as_fraction(c)
        return {w: c * v for w, v in x.items() if c * v != 0}

    def phi_scalar(self, x):
        return sum((c * free_moment(self.spec, w) for w, c in x.items()), Fraction(0))

    def phi(self, x):
        return self.embed_scalar(self.phi_scalar(x))

    psi = phi

    def in_c(self, x):
        return set(x) <= {()}

    in_b = in_c

    def describe(self, x) -> str:
        if not x:
            return "0"
        parts = [f"{c}*{'.'.join(w) or '1'}" for w, c in sorted(x.items())]
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# factorization model: a free family inside d x d matrices


class FactorizationModel:
    """A scalar free family N sitting inside A = N * M_d(Q) (amalgamated
    over the scalars), with psi: A -> B = M_d(Q) *defined* by the
    factorization rule: a cumulant block contributes its scalar family
    cumulant times the traces of the coefficients swallowed inside it.

    Elements are linear combinations of basis words
    ``E_{u0} X_{g1} E_{u1} ... X_{gk} E_{uk}`` stored as
    ``(gens, units) -> coeff`` with ``len(units) == len(gens) + 1`` and
    each unit a pair (i, j).
    """

    def __init__(self, scalars: ScalarFreeSpec, dimension: int = 2):
        if len(scalars.families) != 1:
            raise ValueError("factorization model wants exactly one scalar family")
        self.scalars = scalars
        self.d = int(dimension)

    @classmethod
    def random(
        cls,
        generator_count: int = 1,
        dimension: int = 2,
        max_order: int = DEFAULT_MAX_ORDER,
        seed: int = 0,
    ) -> FactorizationModel:
        names = tuple(f"x{k}" for k in range(1, generator_count + 1))
        return cls(ScalarFreeSpec.random({"n": names}, max_order, seed), dimension)

    def to_data(self) -> dict:
        data = self.scalars.to_data()
        data["dimension"] = self.d
        return data

    @classmethod
    def from_data(cls, data: dict) -> FactorizationModel:
        return cls(ScalarFreeSpec.from_data(data), data["dimension"])


class WordContext(ProbabilityContext):
    kind = LatticeKind.NONCROSSING
    commutative = False

    def __init__(self, model: FactorizationModel):
        self.model = model
        self.d = model.d

    def unit(self):
        return {((), ((i, i),)): Fraction(1) for i in range(self.d)}

    def gen(self, name: str):
        """The family element X_name = sum_{i,j} E_ii X E_jj."""
        if name not in self.model.scalars.family_of:
            raise ValueError(f"unknown generator {name!r}")
        return {
            ((name,), ((i, i), (j, j))): Fraction(1)
            for i in range(self.d)
            for j in range(self.d)
        }

    def embed_b(self, m: Matrix):
        if m.dimension != self.d:
            raise DimensionMismatchError(f"expected {self.d}x{self.d} matrix")
        out = {}
        for i in range(self.d):
            for j in range(self.d):
                c = m.entries[i][j]
                if c != 0:
                    out[((), ((i, j),))] = as_fraction(c)
        return out

    def mul(self, x, y):
        out: dict = {}
        for (g1, u1), c1 in x.items():
            a, b = u1[-1]
            for (g2, u2), c2 in y.items():
                cc, dd = u2[0]
                if b != cc:
                    continue
                key = (g1 + g2, u1[:-1] + ((a, dd),) + u2[1:])
                val = out.get(key, Fraction(0)) + c1 * c2
                out[key] = val
        return {k: v for k, v in out.items() if v != 0}

    def add(self, x, y):
        out = dict(x)
        for k, c in y.items():
            out[k] = out.get(k, Fraction(0)) + c
        return {k: c for k, c in out.items() if c != 0}

    def scale(self, c, x):
        c = as_fraction(c)
        return {k: c * v for k, v in x.items() if c * v != 0}

    def _unit_trace(self, u: tuple[int, int]) -> Fraction:
        return Fraction(1, self.d) if u[0] == u[1] else Fraction(0)

    def _psi_word(self, gens, units) -> dict:
        """Sum over noncrossing partitions of the generator positions.

        Each partition contributes recursively: the first interval block
        {a..b} yields its family cumulant times the traces of the units
        strictly inside, then collapses, fusing units[a-1] and units[b].
        """
        k = len(gens)
        if k == 0:
            return {((), units): Fraction(1)}
        out: dict = {}
        for part in enumerate_partitions(k, LatticeKind.NONCROSSING):
            val = self._partition_value(part, gens, units)
            if val is None:
                continue
            scalar, unit = val
            if scalar != 0:
                key = ((), (unit,))
                out[key] = out.get(key, Fraction(0)) + scalar
        return {key: c for key, c in out.items() if c != 0}

    def _partition_value(self, part: Partition, gens, units):
        scalar = Fraction(1)
        gens = list(gens)
        units = list(units)
        blocks = [list(b) for b in part.blocks]
        while gens:
            block = next(b for b in blocks if b[-1] - b[0] + 1 == len(b))
            a, b = block[0], block[-1]
            scalar *= self.model.scalars.cumulant(tuple(gens[a - 1 : b]))
            for j in range(a, b):
                scalar *= self._unit_trace(units[j])
            if scalar == 0:
                return None
            left, right = units[a - 1], units[b]
            if left[1] != right[0]:
                return None
            fused = (left[0], right[1])
            del gens[a - 1 : b]
            units[a - 1 : b + 1] = [fused]
            blocks.remove(block)
            blocks = [[i if i < a else i - len(block) for i in blk] for blk in blocks]
        return scalar, units[0]

    def psi(self, x):
        out: dict = {}
        for (gens, units), c in x.items():
            for key, v in self._psi_word(gens, units).items():
                out[key] = out.get(key, Fraction(0)) + c * v
        return {key: v for key, v in out.items() if v != 0}

    def phi_scalar(self, x):
        total = Fraction(0)
        for (gens, units), c in self.psi(x).items():
            total += c * self._unit_trace(units[0])
        return total

    def phi(self, x):
        return self.scale(self.phi_scalar(x), self.unit())

    def in_b(self, x):
        return all(not gens for gens, _ in x)

    def in_c(self, x):
        return x == self.phi(x)

    def describe(self, x) -> str:
        if not x:
            return "0"
        parts = []
        for (gens, units), c in sorted(x.items()):
            word = []
            for k, u in enumerate(units):
                word.append(f"E{u[0]}{u[1]}")
                if k < len(gens):
                    word.append(gens[k])
            parts.append(f"{c}*" + ".".join(word))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# tensor model: free family tensored with a commutative d-point algebra


class TensorModel:
    """A (x) B with A spanned by words of one free family and B = Q^p.

    The conditional expectation onto B integrates out the word factor via
    the free moment; the state on B is a weighted point evaluation with
    rational weights summing to one.
    """

    def __init__(self, scalars: ScalarFreeSpec, weights: tuple[Fraction, ...]):
        self.scalars = scalars
        self.weights = tuple(as_fraction(w) for w in weights)
        if sum(self.weights) != 1:
            raise ValueError("state weights must sum to 1")
        self.points = len(self.weights)

    @classmethod
    def random(
        cls,
        points: int = 2,
        max_order: int = DEFAULT_MAX_ORDER,
        seed: int = 0,
    ) -> TensorModel:
        rng = random.Random(seed)
        spec = ScalarFreeSpec.random({"a": ("a",)}, max_order, seed)
        while True:
            raw = [draw_fraction(rng) for _ in range(points)]
            if sum(raw) != 0:
                break
        total = sum(raw)
        return cls(spec, tuple(w / total for w in raw))

    def state(self, vec: tuple[Fraction, ...]) -> Fraction:
        return sum((w * v for w, v in zip(self.weights, vec)), Fraction(0))

    def to_data(self) -> dict:
        data = self.scalars.to_data()
        data["weights"] = [str(w) for w in self.weights]
        return data

    @classmethod
    def from_data(cls, data: dict) -> TensorModel:
        return cls(ScalarFreeSpec.from_data(data), tuple(data["weights"]))


class TensorContext(ProbabilityContext):
    kind = LatticeKind.NONCROSSING
    commutative = False

    def __init__(self, model: TensorModel):
        self.model = model
        self.points = model.points

    def unit(self):
        return {(): (Fraction(1),) * self.points}

    def simple(self, word: tuple[str, ...], vec) -> dict:
        return {tuple(word): tuple(as_fraction(v) for v in vec)}

    def _vadd(self, u, v):
        return tuple(a + b for a, b in zip(u, v))

    def _vmul(self, u, v):
        return tuple(a * b for a, b in zip(u, v))

    def mul(self, x, y):
        out: dict = {}
        zero = (Fraction(0),) * self.points
        for w1, v1 in x.items():
            for w2, v2 in y.items():
                w = w1 + w2
                out[w] = self._vadd(out.get(w, zero), self._vmul(v1, v2))
        return {w: v for w, v in out.items() if any(a != 0 for a in v)}

    def add(self, x, y):
        out = dict(x)
        zero = (Fraction(0),) * self.points
        for w, v in y.items():
            out[w] = self._vadd(out.get(w, zero), v)
        return {w: v for w, v in out.items() if any(a != 0 for a in v)}

    def scale(self, c, x):
        c = as_fraction(c)
        out = {w: tuple(c * a for a in v) for w, v in x.items()}
        return {w: v for w, v in out.items() if any(a != 0 for a in v)}

    def psi(self, x):
        """Integrate out the word factor: sum of free moments times vectors."""
        zero = (Fraction(0),) * self.points
        acc = zero
        for w, v in x.items():
            m = free_moment(self.model.scalars, w)
            acc = self._vadd(acc, tuple(m * a for a in v))
        if all(a == 0 for a in acc):
            return {}
        return {(): acc}

    def phi_scalar(self, x):
        b = self.psi(x)
        if not b:
            return Fraction(0)
        return self.model.state(b[()])

    def phi(self, x):
        return self.scale(self.phi_scalar(x), self.unit())

    def in_b(self, x):
        return set(x) <= {()}

    def in_c(self, x):
        if not x:
            return True
        if set(x) != {()}:
            return False
        vec = x[()]
        return all(a == vec[0] for a in vec)

    def describe(self, x) -> str:
        if not x:
            return "0"
        parts = [
            f"{'.'.join(w) or '1'}(x)({', '.join(str(a) for a in v)})"
            for w, v in sorted(x.items())
        ]
        return " + ".join(parts)
