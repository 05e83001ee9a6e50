"""Exact scalar, polynomial and matrix arithmetic.

Everything in this package computes over the rationals, so ``Fraction``
is the scalar type and every equality test is exact.  Polynomials live in
a ring with a fixed, ordered variable universe declared up front; asking
for a variable outside the universe is an error, which keeps silently
growing monomial keys from masking model bugs.  Matrices are small dense
squares over any commutative ring of entries (Fractions or Polys here).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatchError

Scalar = Union[int, Fraction]


def as_fraction(value: int | str | Fraction) -> Fraction:
    """Coerce ints, Fractions and strings like '-3/2' to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


class PolyRing:
    """A polynomial ring over Q with a fixed tuple of named variables."""

    __slots__ = ("variables", "_index")

    def __init__(self, variables: Sequence[str]):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable in {variables}")
        self.variables = variables
        self._index = {v: k for k, v in enumerate(variables)}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PolyRing) and self.variables == other.variables

    def __hash__(self) -> int:
        return hash(self.variables)

    def __repr__(self) -> str:
        return f"PolyRing({self.variables!r})"

    @property
    def zero(self) -> Poly:
        return Poly(self, {})

    @property
    def one(self) -> Poly:
        return self.const(1)

    def const(self, c: Scalar) -> Poly:
        c = as_fraction(c)
        if c == 0:
            return Poly(self, {})
        return Poly(self, {(0,) * len(self.variables): c})

    def var(self, name: str) -> Poly:
        if name not in self._index:
            raise ValueError(f"variable {name!r} not in ring universe {self.variables}")
        exps = [0] * len(self.variables)
        exps[self._index[name]] = 1
        return Poly(self, {tuple(exps): Fraction(1)})

    def index(self, name: str) -> int:
        if name not in self._index:
            raise ValueError(f"variable {name!r} not in ring universe {self.variables}")
        return self._index[name]


class Poly:
    """Sparse multivariate polynomial: exponent tuple -> nonzero Fraction."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict[tuple[int, ...], Fraction]):
        self.ring = ring
        self.terms = {m: c for m, c in terms.items() if c != 0}

    def _coerce(self, other) -> Poly | None:
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise DimensionMismatchError("polynomials from different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return None

    def __add__(self, other) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in o.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return Poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms: dict[tuple[int, ...], Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                terms[m] = terms.get(m, Fraction(0)) + c1 * c2
        return Poly(self.ring, terms)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return isinstance(other, Poly) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(all(e == 0 for e in m) for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def degree_in(self, name: str) -> int:
        """Largest exponent of one variable; zero polynomial has degree 0."""
        k = self.ring.index(name)
        return max((m[k] for m in self.terms), default=0)

    def to_data(self) -> dict[str, str]:
        """JSON-friendly form: 'u^2 v^1' -> coefficient string."""
        out = {}
        for mono, c in sorted(self.terms.items()):
            key = " ".join(f"{v}^{e}" for v, e in zip(self.ring.variables, mono) if e)
            out[key or "1"] = str(c)
        return out

    @staticmethod
    def from_data(ring: PolyRing, data: dict[str, str]) -> Poly:
        terms: dict[tuple[int, ...], Fraction] = {}
        for key, val in data.items():
            exps = [0] * len(ring.variables)
            if key != "1":
                for tok in key.split():
                    v, e = tok.split("^")
                    exps[ring.index(v)] = int(e)
            terms[tuple(exps)] = as_fraction(val)
        return Poly(ring, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), reverse=True):
            factors = [
                v if e == 1 else f"{v}^{e}"
                for v, e in zip(self.ring.variables, m)
                if e
            ]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


class Matrix:
    """Square matrix over a commutative ring of entries.

    Entries must support +, -, * among themselves and with Fraction.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[Iterable]):
        rows = tuple(tuple(r) for r in entries)
        d = len(rows)
        for r in rows:
            if len(r) != d:
                raise DimensionMismatchError(f"row of length {len(r)} in {d}x{d} matrix")
        self.entries = rows

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @staticmethod
    def identity(d: int, one) -> Matrix:
        zero = one - one
        return Matrix([[one if i == j else zero for j in range(d)] for i in range(d)])

    def _check(self, other: Matrix) -> None:
        if self.dimension != other.dimension:
            raise DimensionMismatchError(
                f"matrices of dimension {self.dimension} and {other.dimension}"
            )

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(
            [
                [a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ]
        )

    def __neg__(self) -> Matrix:
        return Matrix([[-a for a in r] for r in self.entries])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            self._check(other)
            d = self.dimension
            cols = list(zip(*other.entries))
            return Matrix(
                [
                    [_dot(self.entries[i], cols[j]) for j in range(d)]
                    for i in range(d)
                ]
            )
        return self.scale(other)

    def __rmul__(self, other) -> Matrix:
        return self.scale(other)

    def scale(self, c) -> Matrix:
        return Matrix([[a * c for a in r] for r in self.entries])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def trace(self):
        acc = self.entries[0][0]
        for i in range(1, self.dimension):
            acc = acc + self.entries[i][i]
        return acc

    def normalized_trace(self):
        """tr_d = (1/d) * sum of diagonal entries; tr_d(identity) = 1."""
        return self.trace() * Fraction(1, self.dimension)

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(a) for a in r) for r in self.entries) + "]"

    __repr__ = __str__


def _dot(row, col):
    acc = row[0] * col[0]
    for a, b in zip(row[1:], col[1:]):
        acc = acc + a * b
    return acc


def scalar_embed(c: Scalar, d: int, one) -> Matrix:
    """c times the d x d identity, over the ring whose unit is ``one``."""
    return Matrix.identity(d, one).scale(as_fraction(c))
