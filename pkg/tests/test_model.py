import itertools
import random
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgsym import (
    FactorGraph,
    Range,
    RandomVariable,
    assignment_of,
    build_factor,
    joint_table,
    lookup,
    permute_args,
    row_index,
    semantics_equivalent,
)
from fgsym.errors import (
    IndexOutOfRange,
    LengthMismatch,
    NonPositivePotential,
    NotAPermutation,
    RvMismatch,
    StateSpaceTooLarge,
    UnknownRv,
)
from fgsym.model import PotentialPool

from conftest import BOOL, F, T, TERNARY, bool_rvs


def brute_row_order(radices):
    """Independent oracle: rows in printed-table order, first column slowest."""
    return list(itertools.product(*(range(r) for r in radices)))


class TestBuildFactor:
    def test_binary_table(self, pool):
        a, b = bool_rvs("AB")
        f = build_factor("phi1", [a, b], [1, 2, 3, 4], pool)
        assert len(f.table) == 4
        assert lookup(f, (T, T)).value == Decimal(1)

    def test_nullary(self, pool):
        f = build_factor("c", [], [5], pool)
        assert len(f.table) == 1
        assert lookup(f, ()).value == Decimal(5)

    def test_length_mismatch(self, pool):
        a, b = bool_rvs("AB")
        with pytest.raises(LengthMismatch):
            build_factor("phi1", [a, b], [1, 2, 3], pool)

    def test_nonpositive(self, pool):
        a, b = bool_rvs("AB")
        with pytest.raises(NonPositivePotential):
            build_factor("phi1", [a, b], [1, 2, 0, 4], pool)

    def test_interning_same_decimal(self, pool):
        a, b = bool_rvs("AB")
        f = build_factor("phi1", [a, b], ["1.5", "1.50", "1.5e0", "2"], pool)
        assert f.table[0] == f.table[1] == f.table[2]
        assert f.table[3] != f.table[0]

    def test_tolerance_mode_quantizes(self):
        pool = PotentialPool(tolerance="0.1")
        a = bool_rvs("A")[0]
        f = build_factor("phi1", [a], ["1.02", "0.98"], pool)
        assert f.table[0] == f.table[1]


class TestIndexing:
    def test_paper_row_order(self, pool):
        a, b = bool_rvs("AB")
        f = build_factor("phi1", [a, b], [1, 2, 3, 4], pool)
        assert row_index(f, (T, T)) == 0
        assert row_index(f, (T, F)) == 1
        assert row_index(f, (F, T)) == 2

    def test_nullary_index(self, pool):
        f = build_factor("c", [], [5], pool)
        assert row_index(f, ()) == 0
        assert assignment_of(f, 0) == ()

    def test_boolean_triple_all_false(self, pool):
        # Mixed-radix oracle: enumerate all 8 rows in printed order.
        rvs = bool_rvs("XYZ")
        f = build_factor("phi1", rvs, range(1, 9), pool)
        order = brute_row_order(f.radices)
        assert order.index((F, F, F)) == 7
        assert row_index(f, (F, F, F)) == 7
        for idx, assignment in enumerate(order):
            assert row_index(f, assignment) == idx
            assert assignment_of(f, idx) == assignment

    def test_out_of_range(self, pool):
        a, b = bool_rvs("AB")
        f = build_factor("phi1", [a, b], [1, 2, 3, 4], pool)
        with pytest.raises(IndexOutOfRange):
            row_index(f, (2, 0))
        with pytest.raises(IndexOutOfRange):
            assignment_of(f, 4)

    @given(st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=4))
    def test_bijection(self, radices):
        ranges = [Range(f"r{i}", tuple(f"v{k}" for k in range(n))) for i, n in enumerate(radices)]
        rvs = [RandomVariable(f"X{i}", rng) for i, rng in enumerate(ranges)]
        f = build_factor("f", rvs, range(1, int(np.prod(radices)) + 1))
        for idx in range(len(f.table)):
            assert row_index(f, assignment_of(f, idx)) == idx


class TestLookup:
    def test_fig2_rows(self, fig2):
        f1, _ = fig2
        assert lookup(f1, (T, T, F)).value == Decimal(2)
        # the duplicated potential appears at (false,true,false) and (false,false,true)
        assert lookup(f1, (F, F, T)) == lookup(f1, (F, T, F))
        assert lookup(f1, (F, F, T)).value == Decimal(6)


class TestPermuteArgs:
    def test_fig1_swap(self, fig1):
        _, f2 = fig1
        swapped = permute_args(f2, (1, 0))
        assert [a.name for a in swapped.args] == ["B", "C"]
        assert swapped.table.tolist() == [
            f2.pool.intern(v) for v in (1, 3, 2, 4)
        ]

    def test_identity(self, fig2):
        f1, _ = fig2
        same = permute_args(f1, (0, 1, 2))
        assert same.table.tolist() == f1.table.tolist()
        assert [a.name for a in same.args] == [a.name for a in f1.args]

    def test_fig2_rearrangement_matches(self, fig2):
        f1, f2 = fig2
        # place phi2's arguments in order R5, R6, R4: old positions 0,1,2 -> 2,0,1
        rearranged = permute_args(f2, (2, 0, 1))
        assert [a.name for a in rearranged.args] == ["R5", "R6", "R4"]
        assert rearranged.table.tolist() == f1.table.tolist()

    def test_not_a_permutation(self, fig1):
        f1, _ = fig1
        with pytest.raises(NotAPermutation):
            permute_args(f1, (0, 0))

    @given(st.integers(0, 2**30), st.integers(1, 5), st.integers(0, 10**6))
    @settings(max_examples=60)
    def test_roundtrip_and_commutation(self, table_seed, arity, perm_seed):
        rng = random.Random(table_seed)
        rvs = bool_rvs([f"X{i}" for i in range(arity)])
        f = build_factor("f", rvs, [rng.randint(1, 5) for _ in range(2**arity)])
        perm = list(range(arity))
        random.Random(perm_seed).shuffle(perm)
        g = permute_args(f, perm)
        inverse = [0] * arity
        for i, j in enumerate(perm):
            inverse[j] = i
        assert permute_args(g, inverse).table.tolist() == f.table.tolist()
        for a in itertools.product((0, 1), repeat=arity):
            rearranged = [0] * arity
            for i, j in enumerate(perm):
                rearranged[j] = a[i]
            assert lookup(f, a) == lookup(g, tuple(rearranged))


def fig1_fg(values2=(1, 2, 3, 4)):
    pool = PotentialPool()
    a, b, c = bool_rvs("ABC")
    f1 = build_factor("phi1", [a, b], [1, 2, 3, 4], pool)
    f2 = build_factor("phi2", [c, b], list(values2), pool)
    return FactorGraph([a, b, c], [f1, f2])


class TestJoint:
    def test_fig1_all_true(self):
        fg = fig1_fg()
        joint = joint_table(fg)
        # enumeration oracle: product of phi1(t,t) * phi2(t,t) = 1 * 1
        assert joint[(T, T, T)] == Fraction(1)
        assert len(joint) == 8

    def test_single_nullary(self):
        f = build_factor("c", [], [5])
        fg = FactorGraph([], [f])
        assert joint_table(fg) == {(): Fraction(5)}

    def test_fig1_vs_fig3_equivalent(self, fig1_graph, fig3_graph):
        assert semantics_equivalent(fig1_graph[0], fig3_graph[0])

    def test_perturbation_detected(self):
        assert semantics_equivalent(fig1_fg(), fig1_fg())
        assert not semantics_equivalent(fig1_fg(), fig1_fg(values2=(1, 2, 3, 5)))

    def test_state_cap(self):
        rvs = bool_rvs([f"X{i}" for i in range(5)])
        fg = FactorGraph(rvs, [])
        with pytest.raises(StateSpaceTooLarge):
            joint_table(fg, cap=16)

    def test_rv_mismatch(self):
        fg1 = fig1_fg()
        fg2 = FactorGraph(bool_rvs("ABD"), [])
        with pytest.raises(RvMismatch):
            semantics_equivalent(fg1, fg2)

    @given(st.integers(0, 2**30), st.integers(0, 10**6))
    @settings(max_examples=25)
    def test_rewiring_preserves_joint(self, table_seed, perm_seed):
        rng = random.Random(table_seed)
        a, b, c = bool_rvs("ABC")
        pool = PotentialPool()
        f1 = build_factor("phi1", [a, b, c], [rng.randint(1, 4) for _ in range(8)], pool)
        f2 = build_factor("phi2", [b, c], [rng.randint(1, 4) for _ in range(4)], pool)
        fg = FactorGraph([a, b, c], [f1, f2])
        perm = [0, 1, 2]
        random.Random(perm_seed).shuffle(perm)
        rewired = fg.with_factor_replaced(permute_args(f1, perm))
        assert joint_table(fg) == joint_table(rewired)


class TestGraphValidation:
    def test_unknown_rv(self):
        a, b = bool_rvs("AB")
        f = build_factor("phi1", [a, b], [1, 2, 3, 4])
        with pytest.raises(UnknownRv):
            FactorGraph([a], [f])

    def test_range_equality_by_values(self):
        assert Range("x", ("true", "false")) == Range("y", ("true", "false"))
        assert Range("x", ("true", "false")) != Range("x", ("false", "true"))
        assert BOOL != TERNARY
