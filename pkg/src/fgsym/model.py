"""Core data model: ranges, random variables, factors, factor graphs.

Potential tables are dense int64 arrays of interned potential tokens in
canonical row order: the first argument is the most significant digit and
the last argument varies fastest, so row 0 is the all-first-value
assignment.  Interning makes potential equality an integer comparison;
the numeric values behind the tokens live in a :class:`PotentialPool`.

Everything here is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    IndexOutOfRange,
    LengthMismatch,
    NonPositivePotential,
    NotAPermutation,
    RvMismatch,
    StateSpaceTooLarge,
    UnknownRv,
)

DEFAULT_STATE_CAP = 2**20


class Range:
    """An ordered sequence of value labels.

    Two ranges are equal iff their ordered value sequences are identical;
    the name is a label only.  The declaration order of values is
    canonical: bucket count vectors are aligned to it.
    """

    __slots__ = ("name", "values", "_index")

    def __init__(self, name: str, values: Sequence[str]):
        values = tuple(values)
        if not values:
            raise ValueError(f"range {name!r} must have at least one value")
        if len(set(values)) != len(values):
            raise ValueError(f"range {name!r} has duplicate value labels")
        self.name = name
        self.values = values
        self._index = {v: i for i, v in enumerate(values)}

    def __len__(self) -> int:
        return len(self.values)

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"{label!r} is not a value of range {self.name!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Range):
            return NotImplemented
        return self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        return f"Range({self.name!r}, {self.values!r})"


@dataclass(frozen=True)
class RandomVariable:
    name: str
    range: Range


class PotentialPool:
    """Interning registry mapping potential values to small integer tokens.

    Equality policy: two parsed decimals intern to the same token iff their
    canonical decimal forms are identical (exact value equality).  With
    ``tolerance`` set, values are first quantized to the nearest multiple
    of the tolerance, so values within half a tolerance step coincide.
    """

    __slots__ = ("tolerance", "_by_value", "_values")

    def __init__(self, tolerance: Decimal | str | None = None):
        self.tolerance = Decimal(tolerance) if tolerance is not None else None
        if self.tolerance is not None and self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        self._by_value: dict[Decimal, int] = {}
        self._values: list[Decimal] = []

    def canonical_value(self, raw) -> Decimal:
        """The value a raw decimal interns as, under this pool's policy."""
        if isinstance(raw, Decimal):
            value = raw
        elif isinstance(raw, float):
            value = Decimal(repr(raw))
        else:
            try:
                value = Decimal(raw)
            except InvalidOperation:
                raise ValueError(f"not a decimal potential: {raw!r}") from None
        if self.tolerance is not None:
            value = (value / self.tolerance).to_integral_value() * self.tolerance
        return value.normalize()

    def intern(self, raw) -> int:
        value = self.canonical_value(raw)
        token = self._by_value.get(value)
        if token is None:
            token = len(self._values)
            self._by_value[value] = token
            self._values.append(value)
        return token

    def find(self, raw) -> int | None:
        """Token for a value already in the pool, or None."""
        return self._by_value.get(self.canonical_value(raw))

    def value(self, token: int) -> Decimal:
        return self._values[token]

    def canonical(self, token: int) -> str:
        return str(self._values[token])

    def __len__(self) -> int:
        return len(self._values)


@dataclass(frozen=True, eq=False)
class PotentialId:
    """One interned potential: a token plus the value it denotes.

    Equality follows the denoted value (under the owning pool's policy),
    so PotentialIds from different pools with the same policy compare
    consistently.
    """

    token: int
    value: Decimal

    def __eq__(self, other) -> bool:
        if not isinstance(other, PotentialId):
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(self.value)

    def __repr__(self) -> str:
        return f"PotentialId({self.token}, {self.value})"


@dataclass(frozen=True, eq=False)
class Factor:
    """A named function from argument assignments to positive potentials.

    ``table`` holds pool tokens in canonical row order and is read-only;
    its length equals the product of the argument range sizes.
    """

    name: str
    args: tuple[RandomVariable, ...]
    table: np.ndarray
    pool: PotentialPool

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def radices(self) -> tuple[int, ...]:
        return tuple(len(a.range) for a in self.args)

    @property
    def strides(self) -> tuple[int, ...]:
        return table_strides(self.radices)

    def renamed(self, name: str) -> "Factor":
        return replace(self, name=name)


def table_strides(radices: Sequence[int]) -> tuple[int, ...]:
    """Mixed-radix strides: last position has stride 1 (varies fastest)."""
    strides = [1] * len(radices)
    for i in range(len(radices) - 2, -1, -1):
        strides[i] = strides[i + 1] * radices[i + 1]
    return tuple(strides)


def build_factor(
    name: str,
    args: Sequence[RandomVariable],
    potentials: Sequence,
    pool: PotentialPool | None = None,
) -> Factor:
    """Intern a dense potential table into a factor.

    Potentials are decimals (str, int, Decimal; floats go through their
    repr) in canonical row order.  Equal decimals intern to the same
    token.  Raises LengthMismatch on a wrong table size and
    NonPositivePotential on values <= 0.
    """
    args = tuple(args)
    if pool is None:
        pool = PotentialPool()
    expected = math.prod(len(a.range) for a in args)
    potentials = list(potentials)
    if len(potentials) != expected:
        raise LengthMismatch(
            f"factor {name!r}: got {len(potentials)} potentials, need {expected}"
        )
    tokens = np.empty(expected, dtype=np.int64)
    for i, raw in enumerate(potentials):
        token = pool.intern(raw)
        if pool.value(token) <= 0:
            raise NonPositivePotential(f"factor {name!r}: potential {raw!r} is not > 0")
        tokens[i] = token
    tokens.flags.writeable = False
    return Factor(name=name, args=args, table=tokens, pool=pool)


def row_index(factor: Factor, assignment: Sequence[int]) -> int:
    """Canonical row of an assignment (per-argument value indices)."""
    if len(assignment) != factor.arity:
        raise IndexOutOfRange(
            f"assignment length {len(assignment)} != arity {factor.arity}"
        )
    idx = 0
    for value, radix, stride in zip(assignment, factor.radices, factor.strides):
        if not 0 <= value < radix:
            raise IndexOutOfRange(f"value index {value} outside range of size {radix}")
        idx += value * stride
    return idx


def assignment_of(factor: Factor, index: int) -> tuple[int, ...]:
    """Inverse of :func:`row_index`."""
    if not 0 <= index < len(factor.table):
        raise IndexOutOfRange(f"row {index} outside table of length {len(factor.table)}")
    out = []
    for radix, stride in zip(factor.radices, factor.strides):
        out.append((index // stride) % radix)
    return tuple(out)


def lookup(factor: Factor, assignment: Sequence[int]) -> PotentialId:
    token = int(factor.table[row_index(factor, assignment)])
    return PotentialId(token, factor.pool.value(token))


def _check_permutation(perm: Sequence[int], arity: int) -> tuple[int, ...]:
    perm = tuple(perm)
    if len(perm) != arity or sorted(perm) != list(range(arity)):
        raise NotAPermutation(f"{perm!r} is not a permutation of 0..{arity - 1}")
    return perm


def permute_args(factor: Factor, perm: Sequence[int], name: str | None = None) -> Factor:
    """Rearrange the argument list: old position i moves to position perm[i].

    The table is reordered so semantics are preserved: for every
    assignment a of the original, the permuted factor maps the rearranged
    assignment (value of old arg i at slot perm[i]) to the same potential.
    """
    perm = _check_permutation(perm, factor.arity)
    new_args = [None] * factor.arity
    for i, j in enumerate(perm):
        new_args[j] = factor.args[i]
    new_radices = tuple(len(a.range) for a in new_args)
    new_strides = table_strides(new_radices)
    n = factor.arity
    length = len(factor.table)
    if n == 0:
        new_table = factor.table.copy()
    else:
        rows = np.arange(length, dtype=np.int64)
        new_index = np.zeros(length, dtype=np.int64)
        for i in range(n):
            digits = (rows // factor.strides[i]) % factor.radices[i]
            new_index += digits * new_strides[perm[i]]
        new_table = np.empty(length, dtype=np.int64)
        new_table[new_index] = factor.table
    new_table.flags.writeable = False
    return Factor(
        name=factor.name if name is None else name,
        args=tuple(new_args),
        table=new_table,
        pool=factor.pool,
    )


class FactorGraph:
    """Bipartite graph of random variables and factors.

    Edges are implicit in the factor argument lists; every argument must
    name a variable of the graph.
    """

    def __init__(self, rvs: Iterable[RandomVariable], factors: Iterable[Factor]):
        self.rvs: dict[str, RandomVariable] = {}
        for rv in rvs:
            if rv.name in self.rvs:
                raise ValueError(f"duplicate rv name {rv.name!r}")
            self.rvs[rv.name] = rv
        self.factors: dict[str, Factor] = {}
        for f in factors:
            if f.name in self.factors:
                raise ValueError(f"duplicate factor name {f.name!r}")
            for a in f.args:
                known = self.rvs.get(a.name)
                if known is None or known.range != a.range:
                    raise UnknownRv(f"factor {f.name!r} references unknown rv {a.name!r}")
            self.factors[f.name] = f

    def with_factor_replaced(self, factor: Factor) -> "FactorGraph":
        factors = [factor if f.name == factor.name else f for f in self.factors.values()]
        return FactorGraph(self.rvs.values(), factors)

    def state_count(self) -> int:
        return math.prod(len(rv.range) for rv in self.rvs.values())


def joint_table(
    fg: FactorGraph, cap: int = DEFAULT_STATE_CAP
) -> dict[tuple[int, ...], Fraction]:
    """Brute-force unnormalized joint: assignment over rvs (sorted by name,
    value indices) -> product of looked-up potentials, as exact fractions.
    """
    names = sorted(fg.rvs)
    total = fg.state_count()
    if total > cap:
        raise StateSpaceTooLarge(f"{total} joint states exceed cap {cap}")
    pos = {name: i for i, name in enumerate(names)}
    factor_info = []
    for f in fg.factors.values():
        arg_slots = [pos[a.name] for a in f.args]
        values = [Fraction(f.pool.value(int(t))) for t in f.table]
        factor_info.append((arg_slots, f, values))
    out: dict[tuple[int, ...], Fraction] = {}
    spaces = [range(len(fg.rvs[n].range)) for n in names]
    for state in product(*spaces):
        acc = Fraction(1)
        for arg_slots, f, values in factor_info:
            assignment = tuple(state[s] for s in arg_slots)
            acc *= values[row_index(f, assignment)]
        out[state] = acc
    return out


def semantics_equivalent(
    fg1: FactorGraph, fg2: FactorGraph, cap: int = DEFAULT_STATE_CAP
) -> bool:
    """True iff both graphs encode the same normalized distribution.

    Compared exactly, state by state, via cross-multiplication (no
    floating-point division).
    """
    if sorted(fg1.rvs) != sorted(fg2.rvs):
        raise RvMismatch("graphs define different rv name sets")
    for name, rv in fg1.rvs.items():
        if rv.range != fg2.rvs[name].range:
            raise RvMismatch(f"rv {name!r} has different ranges")
    j1 = joint_table(fg1, cap)
    j2 = joint_table(fg2, cap)
    z1 = sum(j1.values())
    z2 = sum(j2.values())
    return all(j1[s] * z2 == j2[s] * z1 for s in j1)


def evidence_valid(fg: FactorGraph, evidence: Mapping[str, str]) -> None:
    """Raise InvalidEvidence unless every observation names a graph rv and
    one of its range values."""
    from .errors import InvalidEvidence

    for name, value in evidence.items():
        rv = fg.rvs.get(name)
        if rv is None:
            raise InvalidEvidence(f"evidence for unknown rv {name!r}")
        if value not in rv.range.values:
            raise InvalidEvidence(f"value {value!r} not in range of rv {name!r}")
