"""Bucket (histogram) machinery over same-range argument groups.

A bucket of a group with k positions over v values is a count vector
[n1..nv] with sum k, aligned to the range's declared value order.  Every
table row falls in exactly one bucket per group; the rows of a bucket, in
table order, give the ordered potential sequence the detection algorithms
compare.  The degree of freedom of a bucket is the product of the
factorials of its potential multiplicities.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import IndexOutOfRange, UnknownBucket
from .model import Factor, PotentialId, Range

BucketCounts = tuple  # count vector [n1..nv] as a tuple of ints
CompositeKey = tuple  # one BucketCounts per argument group, in group order


@dataclass(frozen=True)
class ArgumentGroup:
    """Maximal set of argument positions of one factor sharing a range."""

    factor: Factor
    positions: tuple[int, ...]
    range: Range


def partition_args_by_range(factor: Factor) -> list[ArgumentGroup]:
    """Group argument positions by range equality, ordered by first position."""
    groups: list[list[int]] = []
    ranges: list[Range] = []
    for pos, arg in enumerate(factor.args):
        for gi, rng in enumerate(ranges):
            if rng == arg.range:
                groups[gi].append(pos)
                break
        else:
            ranges.append(arg.range)
            groups.append([pos])
    return [
        ArgumentGroup(factor, tuple(positions), rng)
        for positions, rng in zip(groups, ranges)
    ]


def bucket_of(group: ArgumentGroup, assignment: Sequence[int]) -> BucketCounts:
    """Count vector of the assignment restricted to the group's positions."""
    factor = group.factor
    if len(assignment) != factor.arity:
        raise IndexOutOfRange(
            f"assignment length {len(assignment)} != arity {factor.arity}"
        )
    counts = [0] * len(group.range)
    for pos in group.positions:
        value = assignment[pos]
        if not 0 <= value < len(factor.args[pos].range):
            raise IndexOutOfRange(f"value index {value} invalid at position {pos}")
        counts[value] += 1
    return tuple(counts)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_buckets(group: ArgumentGroup) -> list[BucketCounts]:
    """All buckets of the group, counts in lexicographically descending order."""
    return list(_compositions(len(group.positions), len(group.range)))


def _check_bucket(group: ArgumentGroup, bucket: Sequence[int]) -> BucketCounts:
    bucket = tuple(bucket)
    if (
        len(bucket) != len(group.range)
        or any(c < 0 for c in bucket)
        or sum(bucket) != len(group.positions)
    ):
        raise UnknownBucket(f"{bucket!r} is not a bucket of the group")
    return bucket


@dataclass
class BucketIndex:
    """Per-factor precomputation: row digits, per-group counts, composite keys.

    Read-only after construction; shared freely.
    """

    groups: list[ArgumentGroup]
    digits: np.ndarray  # (L, n) value index per row and position
    group_counts: list[np.ndarray]  # per group: (L, v) counts per row
    keys: list[CompositeKey] = field(default_factory=list)  # ascending key order
    rows_by_key: dict[CompositeKey, np.ndarray] = field(default_factory=dict)


def _compute_digits(factor: Factor) -> np.ndarray:
    length = len(factor.table)
    n = factor.arity
    digits = np.empty((length, n), dtype=np.int16)
    rows = np.arange(length, dtype=np.int64)
    for i, (radix, stride) in enumerate(zip(factor.radices, factor.strides)):
        digits[:, i] = (rows // stride) % radix
    return digits


@lru_cache(maxsize=256)
def bucket_index(factor: Factor) -> BucketIndex:
    """Cached bucket precomputation for a factor."""
    groups = partition_args_by_range(factor)
    digits = _compute_digits(factor)
    length = len(factor.table)
    group_counts = []
    for g in groups:
        sub = digits[:, list(g.positions)]
        counts = np.empty((length, len(g.range)), dtype=np.int16)
        for v in range(len(g.range)):
            counts[:, v] = (sub == v).sum(axis=1)
        group_counts.append(counts)
    index = BucketIndex(groups=groups, digits=digits, group_counts=group_counts)
    if groups:
        stacked = np.hstack(group_counts)
        uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
        order = np.argsort(inverse, kind="stable")
        boundaries = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
        widths = [len(g.range) for g in groups]
        for code, row in enumerate(uniq):
            key_parts = []
            offset = 0
            for w in widths:
                key_parts.append(tuple(int(c) for c in row[offset : offset + w]))
                offset += w
            key = tuple(key_parts)
            index.keys.append(key)
            index.rows_by_key[key] = np.sort(
                order[boundaries[code] : boundaries[code + 1]]
            )
    else:
        key = ()
        index.keys.append(key)
        index.rows_by_key[key] = np.arange(length, dtype=np.int64)
    return index


def rows_in_bucket(factor: Factor, group: ArgumentGroup, bucket: Sequence[int]) -> np.ndarray:
    """Ascending row indices whose group restriction has the given counts."""
    bucket = _check_bucket(group, bucket)
    index = bucket_index(factor)
    for gi, g in enumerate(index.groups):
        if g.positions == group.positions and g.range == group.range:
            break
    else:
        raise UnknownBucket(f"group {group.positions!r} is not a group of {factor.name!r}")
    counts = index.group_counts[gi]
    mask = (counts == np.asarray(bucket, dtype=np.int16)).all(axis=1)
    return np.flatnonzero(mask)


def ordered_potentials(
    factor: Factor, group: ArgumentGroup, bucket: Sequence[int]
) -> list[PotentialId]:
    """Potentials of the bucket's rows in table order."""
    rows = rows_in_bucket(factor, group, bucket)
    return [
        PotentialId(int(t), factor.pool.value(int(t))) for t in factor.table[rows]
    ]


def multiset_potentials(
    factor: Factor, group: ArgumentGroup, bucket: Sequence[int]
) -> Counter:
    """Unordered counterpart of :func:`ordered_potentials`."""
    return Counter(ordered_potentials(factor, group, bucket))


def dof_of_tokens(tokens: np.ndarray) -> int:
    """Product of factorials of the token multiplicities."""
    _, counts = np.unique(tokens, return_counts=True)
    out = 1
    for c in counts:
        out *= math.factorial(int(c))
    return out


def dof_bucket(factor: Factor, group: ArgumentGroup, bucket: Sequence[int]) -> int:
    """Degree of freedom of one bucket."""
    rows = rows_in_bucket(factor, group, bucket)
    return dof_of_tokens(factor.table[rows])


def dof_factor(factor: Factor) -> int:
    """Minimum bucket degree of freedom over all groups, restricted to
    buckets holding more than one row; 1 when no such bucket exists."""
    index = bucket_index(factor)
    best = None
    for gi, group in enumerate(index.groups):
        counts = index.group_counts[gi]
        for bucket in _compositions(len(group.positions), len(group.range)):
            mask = (counts == np.asarray(bucket, dtype=np.int16)).all(axis=1)
            rows = np.flatnonzero(mask)
            if len(rows) <= 1:
                continue
            dof = dof_of_tokens(factor.table[rows])
            if best is None or dof < best:
                best = dof
    return 1 if best is None else best
