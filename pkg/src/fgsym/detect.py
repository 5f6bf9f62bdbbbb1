"""Exchangeability detectors.

Three routes decide whether two factors encode the same function up to an
argument rearrangement:

* ``naive_exchangeable``: scan every range-preserving rearrangement in
  lexicographic order, verifying each against the tables.
* ``acp_exchangeable``: first require equal potential multisets per
  bucket (a necessary condition), then scan like the naive route.
* ``deft_exchangeable``: additionally derive, per bucket, the set of
  target positions each argument may move to, intersect these candidate
  maps across the lowest-degree-of-freedom buckets, and verify only the
  surviving rearrangements.

All detectors report instrumentation counters (full-table comparisons,
bucket comparisons, candidates enumerated) and honour comparison/deadline
budgets.  A rearrangement maps old position i of the second factor to new
position perm[i]; a verdict of "exchangeable" always carries a witness
that passes :func:`verify_permutation`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import _backend
from .buckets import (
    ArgumentGroup,
    bucket_index,
    dof_of_tokens,
    partition_args_by_range,
    rows_in_bucket,
)
from .errors import ArityMismatch, MultisetMismatch, NotAPermutation, RangeMismatch
from .model import Factor, PotentialPool, permute_args

EXCHANGEABLE = "exchangeable"
NOT_EXCHANGEABLE = "not-exchangeable"
BUDGET_EXHAUSTED = "budget-exhausted"

DEFAULT_BUCKET_CAP = 5


@dataclass
class Counters:
    table_comparisons: int = 0
    bucket_comparisons: int = 0
    candidates: int = 0


@dataclass(frozen=True)
class Budget:
    """Work limits for one detection: full-table comparisons and wall clock."""

    max_comparisons: int | None = None
    deadline_s: float | None = None

    def __post_init__(self):
        if self.max_comparisons is not None and self.max_comparisons < 0:
            raise ValueError("max_comparisons must be nonnegative")
        if self.deadline_s is not None and self.deadline_s < 0:
            raise ValueError("deadline_s must be nonnegative")


UNLIMITED = Budget()


@dataclass
class DetectionResult:
    verdict: str
    witness: tuple[int, ...] | None
    counters: Counters
    elapsed_ns: int = 0
    candidate_map: dict[int, frozenset[int]] | None = None

    @property
    def budget_exhausted(self) -> bool:
        return self.verdict == BUDGET_EXHAUSTED


def _tokens_in(factor: Factor, pool: PotentialPool) -> np.ndarray:
    """Factor table re-expressed as tokens of another pool.

    Values absent from the target pool get fresh tokens beyond its size,
    consistently per distinct value, so equality semantics carry over.
    """
    if factor.pool is pool:
        return factor.table
    uniq = np.unique(factor.table)
    mapped = np.empty(len(uniq), dtype=np.int64)
    assigned: dict = {}
    fresh = len(pool)
    for k, tok in enumerate(uniq.tolist()):
        canon = pool.canonical_value(factor.pool.value(tok))
        fid = pool.find(canon)
        if fid is None:
            fid = assigned.get(canon)
            if fid is None:
                fid = fresh
                fresh += 1
                assigned[canon] = fid
        mapped[k] = fid
    return mapped[np.searchsorted(uniq, factor.table)]


def _alignment(f1: Factor, f2: Factor) -> tuple[int, ...] | None:
    """Block permutation sending f2's positions onto f1 positions of the
    equal range, ascending to ascending; None when the group structures
    cannot be matched (different arity, ranges, or group sizes)."""
    if f1.arity != f2.arity:
        return None
    g1 = partition_args_by_range(f1)
    g2 = partition_args_by_range(f2)
    if len(g1) != len(g2):
        return None
    rho = [0] * f2.arity
    matched = [False] * len(g1)
    for h in g2:
        for i, g in enumerate(g1):
            if not matched[i] and g.range == h.range and len(g.positions) == len(h.positions):
                matched[i] = True
                for a, b in zip(h.positions, g.positions):
                    rho[a] = b
                break
        else:
            return None
    return tuple(rho)


def _group_position_masks(f1: Factor) -> list[int]:
    """Per position of f1: bitmask of all positions in its own group."""
    masks = [0] * f1.arity
    for g in partition_args_by_range(f1):
        m = 0
        for j in g.positions:
            m |= 1 << j
        for j in g.positions:
            masks[j] = m
    return masks


def _check_perm(f1: Factor, f2: Factor, perm: Sequence[int]) -> tuple[int, ...]:
    if f1.arity != f2.arity:
        raise ArityMismatch(f"arity {f1.arity} vs {f2.arity}")
    perm = tuple(perm)
    if sorted(perm) != list(range(f1.arity)):
        raise NotAPermutation(f"{perm!r} is not a permutation of 0..{f1.arity - 1}")
    for i, j in enumerate(perm):
        if f2.args[i].range != f1.args[j].range:
            raise RangeMismatch(f"position {i} -> {j} does not preserve the range")
    return perm


def verify_permutation(
    f1: Factor, f2: Factor, perm: Sequence[int], counters: Counters | None = None
) -> bool:
    """One full-table comparison: does rearranging f2 by perm reproduce f1?

    True iff f1(r_1..r_n) == f2 applied to the rearranged values for every
    assignment, i.e. permute_args(f2, perm) has a table identical to f1's.
    """
    perm = _check_perm(f1, f2, perm)
    t2 = _tokens_in(f2, f1.pool)
    tstrides = [0] * f1.arity
    for i, j in enumerate(perm):
        tstrides[j] = f2.strides[i]
    if counters is not None:
        counters.table_comparisons += 1
    return _backend.verify_table_perm(f1.table, t2, f1.radices, tstrides)


def _finish(verdict, witness, counters, t0, candidate_map=None) -> DetectionResult:
    return DetectionResult(
        verdict=verdict,
        witness=witness,
        counters=counters,
        elapsed_ns=time.perf_counter_ns() - t0,
        candidate_map=candidate_map,
    )


def _run_search(f1, t2, strides2, masks, budget, counters, t_mono, witness_map=None):
    max_verif = -1 if budget.max_comparisons is None else budget.max_comparisons
    deadline = None if budget.deadline_s is None else t_mono + budget.deadline_s
    status, witness, cands, verifs = _backend.search_rearrangements(
        f1.table, t2, f1.radices, strides2, masks, max_verif, deadline
    )
    counters.candidates += cands
    counters.table_comparisons += verifs
    if status == _backend.FOUND:
        if witness_map is not None:
            witness = tuple(witness[j] for j in witness_map)
        return EXCHANGEABLE, witness
    if status == _backend.BUDGET:
        return BUDGET_EXHAUSTED, None
    return NOT_EXCHANGEABLE, None


def naive_exchangeable(
    f1: Factor, f2: Factor, budget: Budget | None = None
) -> DetectionResult:
    """Scan all range-preserving rearrangements in lexicographic order."""
    t0 = time.perf_counter_ns()
    t_mono = time.monotonic()
    budget = budget or UNLIMITED
    counters = Counters()
    if _alignment(f1, f2) is None:
        return _finish(NOT_EXCHANGEABLE, None, counters, t0)
    g1 = partition_args_by_range(f1)
    masks = []
    for i in range(f2.arity):
        mask = 0
        for g in g1:
            if g.range == f2.args[i].range:
                for j in g.positions:
                    mask |= 1 << j
        masks.append(mask)
    t2 = _tokens_in(f2, f1.pool)
    verdict, witness = _run_search(
        f1, t2, f2.strides, masks, budget, counters, t_mono
    )
    return _finish(verdict, witness, counters, t0)


def _bucket_multisets_equal(vals1: np.ndarray, vals2: np.ndarray) -> bool:
    return bool(np.array_equal(np.sort(vals1), np.sort(vals2)))


def bucket_filter(f1: Factor, f2: Factor) -> bool:
    """Necessary condition: arities match, group structures align, and every
    composite bucket maps to the same potential multiset in both factors."""
    rho = _alignment(f1, f2)
    if rho is None:
        return False
    f2a = f2 if rho == tuple(range(f2.arity)) else permute_args(f2, rho)
    t2a = _tokens_in(f2a, f1.pool)
    idx1 = bucket_index(f1)
    for key in idx1.keys:
        rows = idx1.rows_by_key[key]
        if not _bucket_multisets_equal(f1.table[rows], t2a[rows]):
            return False
    return True


def acp_exchangeable(
    f1: Factor, f2: Factor, budget: Budget | None = None
) -> DetectionResult:
    """Bucket-multiset filter, then the full naive scan on success."""
    t0 = time.perf_counter_ns()
    t_mono = time.monotonic()
    budget = budget or UNLIMITED
    counters = Counters()
    rho = _alignment(f1, f2)
    if rho is None:
        return _finish(NOT_EXCHANGEABLE, None, counters, t0)
    f2a = f2 if rho == tuple(range(f2.arity)) else permute_args(f2, rho)
    t2a = _tokens_in(f2a, f1.pool)
    idx1 = bucket_index(f1)
    for key in idx1.keys:
        rows = idx1.rows_by_key[key]
        counters.bucket_comparisons += 1
        if not _bucket_multisets_equal(f1.table[rows], t2a[rows]):
            return _finish(NOT_EXCHANGEABLE, None, counters, t0)
    g1 = partition_args_by_range(f1)
    masks = []
    for i in range(f2.arity):
        mask = 0
        for g in g1:
            if g.range == f2.args[i].range:
                for j in g.positions:
                    mask |= 1 << j
        masks.append(mask)
    t2 = _tokens_in(f2, f1.pool)
    verdict, witness = _run_search(
        f1, t2, f2.strides, masks, budget, counters, t_mono
    )
    return _finish(verdict, witness, counters, t0)


def _constraint_masks(
    rows: np.ndarray,
    vals1: np.ndarray,
    vals2: np.ndarray,
    digits: np.ndarray,
    group_masks: list[int],
    restrict: Sequence[int] | None = None,
    bucket_positions: Sequence[int] | None = None,
) -> list[int]:
    """Candidate target masks induced by one bucket.

    For each position p of the second factor's ordered bucket, every
    position p' holding the same value in the first factor's ordered
    bucket contributes one assignment pair (A, A'); position i may move to
    the group positions j with a_i = a'_j.  Contributions are unioned per
    p, then intersected across the processed p's.

    ``restrict`` limits which argument positions receive constraints
    (others keep their full group mask); ``bucket_positions`` limits the
    processed p's (default: all).
    """
    n = len(group_masks)
    d = digits[rows].tolist()
    size = len(rows)
    where1: dict[int, list[int]] = {}
    for p, v in enumerate(vals1.tolist()):
        where1.setdefault(v, []).append(p)
    value_masks = []
    for p in range(size):
        vm: dict[int, int] = {}
        for j, val in enumerate(d[p]):
            vm[val] = vm.get(val, 0) | (1 << j)
        value_masks.append(vm)
    active = list(range(n)) if restrict is None else list(restrict)
    out = list(group_masks)
    v2 = vals2.tolist()
    ps = range(size) if bucket_positions is None else bucket_positions
    for p in ps:
        matches = where1.get(v2[p], ())
        row_p = d[p]
        for i in active:
            union = 0
            for pp in matches:
                union |= value_masks[pp].get(row_p[i], 0)
            out[i] &= union
    return out


def candidate_swaps(
    f1: Factor,
    f2: Factor,
    group: ArgumentGroup,
    bucket: Sequence[int],
    bucket_positions: Sequence[int] | None = None,
) -> dict[int, frozenset[int]]:
    """Admissible target positions per argument, induced by one bucket of
    one group.  Positions outside the group keep all positions of their
    own group.  Requires positionally matching ranges; raises
    MultisetMismatch when the bucket's potential multisets differ."""
    if f1.arity != f2.arity:
        raise ArityMismatch(f"arity {f1.arity} vs {f2.arity}")
    for a1, a2 in zip(f1.args, f2.args):
        if a1.range != a2.range:
            raise RangeMismatch("candidate_swaps needs positionally equal ranges")
    rows = rows_in_bucket(f1, group, bucket)
    t2 = _tokens_in(f2, f1.pool)
    vals1 = f1.table[rows]
    vals2 = t2[rows]
    if not _bucket_multisets_equal(vals1, vals2):
        raise MultisetMismatch(f"bucket {tuple(bucket)!r} multisets differ")
    masks = _constraint_masks(
        rows,
        vals1,
        vals2,
        bucket_index(f1).digits,
        _group_position_masks(f1),
        restrict=group.positions,
        bucket_positions=bucket_positions,
    )
    return {i: frozenset(_bits(m)) for i, m in enumerate(masks)}


def _bits(mask: int) -> Iterator[int]:
    j = 0
    while mask:
        if mask & 1:
            yield j
        mask >>= 1
        j += 1


def intersect_candidates(
    maps: Sequence[Mapping[int, frozenset[int]]]
) -> dict[int, frozenset[int]] | None:
    """Positionwise intersection; None as soon as any position runs empty."""
    if not maps:
        raise ValueError("need at least one candidate map")
    positions = sorted(maps[0])
    for m in maps[1:]:
        if sorted(m) != positions:
            raise ValueError("candidate maps cover different positions")
    out: dict[int, frozenset[int]] = {}
    for i in positions:
        acc = frozenset(maps[0][i])
        for m in maps[1:]:
            acc &= frozenset(m[i])
        if not acc:
            return None
        out[i] = acc
    return out


def enumerate_rearrangements(
    cmap: Mapping[int, frozenset[int]]
) -> Iterator[tuple[int, ...]]:
    """All bijections consistent with a candidate map, in depth-first order:
    positions ascending, targets ascending, targets never reused."""
    n = len(cmap)
    if sorted(cmap) != list(range(n)):
        raise ValueError("candidate map must cover positions 0..n-1")
    targets = [sorted(cmap[i]) for i in range(n)]
    chosen = [0] * n
    used: set[int] = set()

    def rec(depth: int) -> Iterator[tuple[int, ...]]:
        if depth == n:
            yield tuple(chosen)
            return
        for t in targets[depth]:
            if t not in used:
                used.add(t)
                chosen[depth] = t
                yield from rec(depth + 1)
                used.remove(t)

    return rec(0)


def deft_exchangeable(
    f1: Factor,
    f2: Factor,
    budget: Budget | None = None,
    heuristic_bucket_cap: int = DEFAULT_BUCKET_CAP,
) -> DetectionResult:
    """Candidate-intersection detection.

    Checks the bucket multisets in ascending degree-of-freedom order,
    accumulating candidate maps (intersected incrementally, early exit on
    an empty position) for at most ``heuristic_bucket_cap`` buckets, then
    verifies the surviving rearrangements.  The cap never affects the
    verdict, only how tight the candidate set is before verification.
    """
    t0 = time.perf_counter_ns()
    t_mono = time.monotonic()
    budget = budget or UNLIMITED
    counters = Counters()
    rho = _alignment(f1, f2)
    if rho is None:
        return _finish(NOT_EXCHANGEABLE, None, counters, t0)
    identity = tuple(range(f2.arity))
    f2a = f2 if rho == identity else permute_args(f2, rho)
    t2a = _tokens_in(f2a, f1.pool)
    idx1 = bucket_index(f1)

    dof_by_key = {}
    for key in idx1.keys:
        dof_by_key[key] = dof_of_tokens(f1.table[idx1.rows_by_key[key]])
    ordered_keys = sorted(idx1.keys, key=lambda k: (dof_by_key[k], k))

    group_masks = _group_position_masks(f1)
    acc = list(group_masks)
    processed = 0
    for key in ordered_keys:
        rows = idx1.rows_by_key[key]
        counters.bucket_comparisons += 1
        vals1 = f1.table[rows]
        vals2 = t2a[rows]
        if not _bucket_multisets_equal(vals1, vals2):
            return _finish(NOT_EXCHANGEABLE, None, counters, t0)
        if processed < heuristic_bucket_cap:
            processed += 1
            bucket_masks = _constraint_masks(rows, vals1, vals2, idx1.digits, group_masks)
            for i in range(f1.arity):
                acc[i] &= bucket_masks[i]
            if any(m == 0 for m in acc):
                return _finish(NOT_EXCHANGEABLE, None, counters, t0)

    cmap = {i: frozenset(_bits(m)) for i, m in enumerate(acc)}
    verdict, witness = _run_search(
        f1, t2a, f1.strides, acc, budget, counters, t_mono, witness_map=rho
    )
    return _finish(verdict, witness, counters, t0, candidate_map=cmap)


DETECTORS = {
    "naive": naive_exchangeable,
    "acp": acp_exchangeable,
    "deft": deft_exchangeable,
}
