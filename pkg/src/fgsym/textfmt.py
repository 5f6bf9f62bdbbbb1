"""Line-based text format for factor graphs.

Directives (whitespace-separated tokens, '#' starts a comment):

    range <name> <v1> <v2> ...
    rv <name> <range-name>
    factor <name> <rv1> ... <rvk> : <p1> <p2> ... <pM>
    evidence <rv-name> <value>

Potentials are decimals in canonical row order (first argument most
significant).  Serialization emits canonical decimal forms, so a file
already in canonical form round-trips byte-exactly.
"""

from __future__ import annotations

import os
from decimal import Decimal

from .errors import ParseError
from .model import FactorGraph, PotentialPool, Range, RandomVariable, build_factor
from .errors import FgError


def parse(text: str, tolerance=None) -> tuple[FactorGraph, dict[str, str]]:
    """Parse a factor-graph document; returns (graph, evidence)."""
    pool = PotentialPool(tolerance)
    ranges: dict[str, Range] = {}
    rvs: dict[str, RandomVariable] = {}
    factors = []
    evidence: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, rest = tokens[0], tokens[1:]
        if kind == "range":
            if len(rest) < 2:
                raise ParseError("range needs a name and at least one value", lineno)
            name = rest[0]
            if name in ranges:
                raise ParseError(f"duplicate range {name!r}", lineno)
            try:
                ranges[name] = Range(name, rest[1:])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif kind == "rv":
            if len(rest) != 2:
                raise ParseError("rv needs a name and a range name", lineno)
            name, range_name = rest
            if name in rvs:
                raise ParseError(f"duplicate rv {name!r}", lineno)
            if range_name not in ranges:
                raise ParseError(f"unknown range {range_name!r}", lineno)
            rvs[name] = RandomVariable(name, ranges[range_name])
        elif kind == "factor":
            if ":" not in rest:
                raise ParseError("factor needs ':' before its potentials", lineno)
            sep = rest.index(":")
            if sep < 1:
                raise ParseError("factor needs a name", lineno)
            name, arg_names, pot_tokens = rest[0], rest[1:sep], rest[sep + 1 :]
            args = []
            for a in arg_names:
                if a not in rvs:
                    raise ParseError(f"unknown rv {a!r} in factor {name!r}", lineno)
                args.append(rvs[a])
            try:
                for tok in pot_tokens:
                    Decimal(tok)
            except ArithmeticError:
                raise ParseError(f"bad decimal in factor {name!r}", lineno) from None
            try:
                factors.append(build_factor(name, args, pot_tokens, pool))
            except FgError as exc:
                raise ParseError(str(exc), lineno) from None
        elif kind == "evidence":
            if len(rest) != 2:
                raise ParseError("evidence needs an rv name and a value", lineno)
            name, value = rest
            if name not in rvs:
                raise ParseError(f"evidence for unknown rv {name!r}", lineno)
            if value not in rvs[name].range.values:
                raise ParseError(f"value {value!r} not in range of {name!r}", lineno)
            evidence[name] = value
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)
    try:
        fg = FactorGraph(rvs.values(), factors)
    except (FgError, ValueError) as exc:
        raise ParseError(str(exc)) from None
    return fg, evidence


def dumps(fg: FactorGraph, evidence: dict[str, str] | None = None) -> str:
    """Serialize a graph (and optional evidence) back to the text format."""
    lines = []
    seen_ranges: dict[tuple[str, ...], str] = {}
    for rv in fg.rvs.values():
        key = rv.range.values
        if key not in seen_ranges:
            seen_ranges[key] = rv.range.name
            lines.append(f"range {rv.range.name} " + " ".join(rv.range.values))
    for rv in fg.rvs.values():
        lines.append(f"rv {rv.name} {seen_ranges[rv.range.values]}")
    for f in fg.factors.values():
        pots = " ".join(f.pool.canonical(int(t)) for t in f.table)
        arg_part = " ".join(a.name for a in f.args)
        if arg_part:
            lines.append(f"factor {f.name} {arg_part} : {pots}")
        else:
            lines.append(f"factor {f.name} : {pots}")
    for name, value in (evidence or {}).items():
        lines.append(f"evidence {name} {value}")
    return "\n".join(lines) + "\n"


def load(path: str | os.PathLike, tolerance=None) -> tuple[FactorGraph, dict[str, str]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read(), tolerance)


def save(fg: FactorGraph, path: str | os.PathLike, evidence=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(fg, evidence))
