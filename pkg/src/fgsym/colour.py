"""Colour passing: grouping indistinguishable variables and factors.

Variables start coloured by (range, evidence); factors start coloured by
exchangeability classes found with a pluggable detector, each class
member stored with the rearrangement that aligns it to its class
representative.  Signature rounds then alternate: a factor signature is
the rv colours in its (rearranged) argument order plus its own colour; an
rv signature is the sorted (factor colour, position) pairs over its
occurrences, with position 0 when the occurrence sits in a commutative
argument set, plus its own colour.  Rounds repeat until the grouping is
stable, and the final partition is emitted with canonical colour tokens.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .buckets import partition_args_by_range
from .detect import deft_exchangeable, Budget, Counters, verify_permutation
from .errors import DetectionBudgetExceeded
from .model import Factor, FactorGraph, evidence_valid, permute_args


def initial_rv_colours(fg: FactorGraph, evidence: dict[str, str] | None = None) -> dict[str, int]:
    """Two rvs share a colour iff their ranges are equal and they carry the
    same evidence status (unobserved, or observed with the same value)."""
    evidence = evidence or {}
    evidence_valid(fg, evidence)
    keys = {}
    for name in sorted(fg.rvs):
        rv = fg.rvs[name]
        observed = evidence.get(name)
        keys[name] = (rv.range.values, observed is not None, observed or "")
    palette = {key: i for i, key in enumerate(sorted(set(keys.values())))}
    return {name: palette[key] for name, key in keys.items()}


def _fingerprint(factor: Factor):
    groups = tuple(
        sorted((g.range.values, len(g.positions)) for g in partition_args_by_range(factor))
    )
    values = tuple(sorted(factor.pool.canonical(int(t)) for t in factor.table))
    return (factor.arity, groups, values)


def initial_factor_colours(
    fg: FactorGraph, detector=deft_exchangeable, budget: Budget | None = None
) -> tuple[dict[str, int], dict[str, tuple[int, ...]]]:
    """Group factors into exchangeability classes.

    Factors are pre-bucketed by a cheap fingerprint (arity, group
    signature, potential multiset) that exchangeability implies, so the
    detector only runs within buckets, against one representative per
    class.  Returns (colours, rearrangements); each factor's recorded
    rearrangement aligns its table to its class representative (identity
    for representatives).  Detector budget exhaustion is a hard error.
    """
    classes: dict = {}  # fingerprint -> list of (rep factor, member names)
    rearrangements: dict[str, tuple[int, ...]] = {}
    for name in sorted(fg.factors):
        f = fg.factors[name]
        fp = _fingerprint(f)
        placed = False
        for rep, members in classes.setdefault(fp, []):
            result = detector(rep, f, budget)
            if result.budget_exhausted:
                raise DetectionBudgetExceeded(
                    f"detector gave up comparing {rep.name!r} and {f.name!r}"
                )
            if result.verdict == "exchangeable":
                members.append(name)
                rearrangements[name] = result.witness
                placed = True
                break
        if not placed:
            classes[fp].append((f, [name]))
            rearrangements[name] = tuple(range(f.arity))
    colours: dict[str, int] = {}
    ordered = sorted(
        (fp, rep.name, members) for fp, bucket in classes.items() for rep, members in bucket
    )
    for colour, (_, _, members) in enumerate(ordered):
        for name in members:
            colours[name] = colour
    return colours, rearrangements


def _swap_preserves_table(factor: Factor, i: int, j: int) -> bool:
    rows = np.arange(len(factor.table), dtype=np.int64)
    si, sj = factor.strides[i], factor.strides[j]
    di = (rows // si) % factor.radices[i]
    dj = (rows // sj) % factor.radices[j]
    swapped = rows + (dj - di) * si + (di - dj) * sj
    return bool(np.array_equal(factor.table, factor.table[swapped]))


def detect_commutative_args(factor: Factor) -> list[frozenset[int]]:
    """Partition of argument positions into maximal sets within which any
    transposition leaves the table unchanged.

    Components of the pairwise swap-invariance relation; the symmetric
    group on a component is generated by its verified transpositions, and
    closure is asserted on the computed pair matrix.
    """
    n = factor.arity
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    invariant = {}
    for group in partition_args_by_range(factor):
        positions = group.positions
        for a in range(len(positions)):
            for b in range(a + 1, len(positions)):
                i, j = positions[a], positions[b]
                invariant[(i, j)] = _swap_preserves_table(factor, i, j)
                if invariant[(i, j)]:
                    parent[find(i)] = find(j)
    members: dict[int, list[int]] = {}
    for pos in range(n):
        members.setdefault(find(pos), []).append(pos)
    sets = [frozenset(v) for v in members.values()]
    for component in sets:
        for i in sorted(component):
            for j in sorted(component):
                if i < j and (i, j) in invariant:
                    assert invariant[(i, j)], "swap relation not closed on component"
    return sorted(sets, key=min)


@dataclass
class Colouring:
    """Stable partition of a graph plus the per-factor rearrangements that
    align class members.  Colours are canonical small integers: classes
    are numbered by their lexicographically smallest member."""

    rv_colours: dict[str, int]
    factor_colours: dict[str, int]
    rearrangements: dict[str, tuple[int, ...]]
    rounds: int = 0

    def rv_classes(self) -> list[list[str]]:
        return _classes(self.rv_colours)

    def factor_classes(self) -> list[list[str]]:
        return _classes(self.factor_colours)

    def as_lines(self) -> list[str]:
        lines = []
        for colour, members in enumerate(self.rv_classes()):
            lines.append(f"rvclass {colour} " + " ".join(members))
        for colour, members in enumerate(self.factor_classes()):
            lines.append(
                f"factorclass {colour} " + " ".join(members) + f" rep={members[0]}"
            )
        return lines


def _classes(colours: dict[str, int]) -> list[list[str]]:
    by_colour: dict[int, list[str]] = {}
    for name, colour in colours.items():
        by_colour.setdefault(colour, []).append(name)
    groups = [sorted(v) for v in by_colour.values()]
    return sorted(groups, key=lambda g: g[0])


def _canonical_tokens(colours: dict[str, int]) -> dict[str, int]:
    out = {}
    for token, members in enumerate(_classes(colours)):
        for name in members:
            out[name] = token
    return out


def _partition_key(colours: dict[str, int]):
    return tuple(tuple(c) for c in _classes(colours))


def colour_pass(
    fg: FactorGraph,
    evidence: dict[str, str] | None = None,
    detector=deft_exchangeable,
    budget: Budget | None = None,
) -> Colouring:
    """Run the full colour-passing fixpoint and emit the stable partition."""
    rv_col = initial_rv_colours(fg, evidence)
    fac_col, rearr = initial_factor_colours(fg, detector, budget)
    factor_names = sorted(fg.factors)
    rv_names = sorted(fg.rvs)

    aligned = {name: permute_args(fg.factors[name], rearr[name]) for name in factor_names}
    commutative = {
        name: [s for s in detect_commutative_args(aligned[name]) if len(s) > 1]
        for name in factor_names
    }
    occurrences: dict[str, list[tuple[str, int]]] = {name: [] for name in rv_names}
    for fname in factor_names:
        in_comm = set().union(*commutative[fname]) if commutative[fname] else set()
        for pos, arg in enumerate(aligned[fname].args):
            slot = 0 if pos in in_comm else pos + 1
            occurrences[arg.name].append((fname, slot))

    rounds = 0
    while True:
        rounds += 1
        fac_sigs = {}
        for fname in factor_names:
            arg_colours = tuple(rv_col[a.name] for a in aligned[fname].args)
            fac_sigs[fname] = (arg_colours, fac_col[fname])
        palette = {sig: i for i, sig in enumerate(sorted(set(fac_sigs.values())))}
        new_fac = {fname: palette[fac_sigs[fname]] for fname in factor_names}

        rv_sigs = {}
        for rname in rv_names:
            entries = sorted((new_fac[fname], slot) for fname, slot in occurrences[rname])
            rv_sigs[rname] = (tuple(entries), rv_col[rname])
        palette = {sig: i for i, sig in enumerate(sorted(set(rv_sigs.values())))}
        new_rv = {rname: palette[rv_sigs[rname]] for rname in rv_names}

        stable = _partition_key(new_fac) == _partition_key(fac_col) and _partition_key(
            new_rv
        ) == _partition_key(rv_col)
        fac_col, rv_col = new_fac, new_rv
        if stable:
            break

    return Colouring(
        rv_colours=_canonical_tokens(rv_col),
        factor_colours=_canonical_tokens(fac_col),
        rearrangements=rearr,
        rounds=rounds,
    )
