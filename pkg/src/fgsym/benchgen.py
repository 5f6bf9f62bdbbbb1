"""Seeded benchmark instances and the measurement harness.

Instances are pairs of Boolean-argument factors of arity n where each
table row independently receives one designated shared potential with
probability p and a fresh, never-reused value otherwise.  Exchangeable
pairs duplicate the table and randomly rearrange one argument list;
non-exchangeable pairs additionally replace one row's potential with a
fresh value, which makes that row's bucket multiset diverge, so the
bucket filter certifies the label.

All randomness flows from a master seed through a stable mixing function
(sha256 over "fgsym|master|n|p|kind|replicate"), so cells reproduce
independently of iteration order or worker scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Sequence

from .detect import DETECTORS, Budget
from .errors import DegenerateInstance
from .model import Factor, PotentialPool, Range, RandomVariable, build_factor, permute_args

BOOL_RANGE = Range("bool", ("true", "false"))
KINDS = ("exchangeable", "non-exchangeable")
ALGORITHMS = ("naive", "acp", "deft")
DEFAULT_MASTER_SEED = 20240

CSV_HEADER = [
    "algorithm",
    "n",
    "p",
    "kind",
    "seed",
    "verdict",
    "table_comparisons",
    "candidates",
    "time_ns",
    "budget_exhausted",
]

AGG_HEADER = [
    "algorithm",
    "n",
    "p",
    "kind",
    "instances",
    "completed",
    "budget_exhausted",
    "mean_table_comparisons",
    "mean_candidates",
    "mean_time_ns",
]


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    p: float
    kind: str
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")


@dataclass(frozen=True)
class BenchConfig:
    n_list: tuple[int, ...]
    p_list: tuple[float, ...]
    kinds: tuple[str, ...] = KINDS
    seeds_per_cell: int = 10
    algorithms: tuple[str, ...] = ALGORITHMS
    max_comparisons: int | None = None
    deadline_s: float | None = None
    jobs: int = 1
    master_seed: int = DEFAULT_MASTER_SEED

    def __post_init__(self):
        if not (self.n_list and self.p_list and self.kinds and self.algorithms):
            raise ValueError("n_list, p_list, kinds and algorithms must be nonempty")
        for algo in self.algorithms:
            if algo not in DETECTORS:
                raise ValueError(f"unknown algorithm {algo!r}")


@dataclass(frozen=True)
class BenchRecord:
    algorithm: str
    n: int
    p: float
    kind: str
    seed: int
    verdict: str
    table_comparisons: int
    candidates: int
    time_ns: int
    budget_exhausted: bool

    def sort_key(self):
        return (self.n, self.p, self.kind, self.seed, self.algorithm)

    def csv_row(self) -> list[str]:
        return [
            self.algorithm,
            str(self.n),
            repr(self.p),
            self.kind,
            str(self.seed),
            self.verdict,
            str(self.table_comparisons),
            str(self.candidates),
            str(self.time_ns),
            "true" if self.budget_exhausted else "false",
        ]


def instance_seed(master: int, n: int, p: float, kind: str, replicate: int) -> int:
    """Stable 64-bit per-instance seed: sha256("fgsym|m|n|p|kind|r")."""
    key = f"fgsym|{master}|{n}|{p!r}|{kind}|{replicate}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def _draw_potentials(n: int, p: float, rng: random.Random) -> list[Decimal]:
    shared = Decimal(1)
    fresh = 2
    out = []
    for _ in range(2**n):
        if rng.random() < p:
            out.append(shared)
        else:
            out.append(Decimal(fresh))
            fresh += 1
    return out


def _bool_rvs(n: int) -> list[RandomVariable]:
    return [RandomVariable(f"R{i + 1}", BOOL_RANGE) for i in range(n)]


def gen_factor(
    n: int, p: float, seed: int, name: str = "phi1", pool: PotentialPool | None = None
) -> Factor:
    """One Boolean factor of arity n; the seed fully determines the table."""
    rng = random.Random(seed)
    return build_factor(name, _bool_rvs(n), _draw_potentials(n, p, rng), pool)


def gen_exchangeable_pair(spec: InstanceSpec) -> tuple[Factor, Factor, tuple[int, ...]]:
    """A factor and a randomly rearranged copy; the hidden rearrangement is
    returned for test introspection only."""
    pool = PotentialPool()
    rng = random.Random(spec.seed)
    f1 = build_factor("phi1", _bool_rvs(spec.n), _draw_potentials(spec.n, spec.p, rng), pool)
    perm = list(range(spec.n))
    rng.shuffle(perm)
    f2 = permute_args(f1, perm, name="phi2")
    return f1, f2, tuple(perm)


def gen_nonexchangeable_pair(spec: InstanceSpec) -> tuple[Factor, Factor]:
    """A rearranged copy with one row's potential replaced by a fresh value,
    so one bucket's multiset diverges and the bucket filter rejects."""
    if spec.n < 1:
        raise DegenerateInstance("need at least one argument to diverge a bucket")
    pool = PotentialPool()
    rng = random.Random(spec.seed)
    f1 = build_factor("phi1", _bool_rvs(spec.n), _draw_potentials(spec.n, spec.p, rng), pool)
    perm = list(range(spec.n))
    rng.shuffle(perm)
    permuted = permute_args(f1, perm, name="phi2")
    row = rng.randrange(2**spec.n)
    potentials = [pool.value(int(t)) for t in permuted.table]
    potentials[row] = Decimal(2**spec.n + 2)  # beyond any value drawn above
    f2 = build_factor("phi2", permuted.args, potentials, pool)
    return f1, f2


def generate_pair(spec: InstanceSpec) -> tuple[Factor, Factor]:
    if spec.kind == "exchangeable":
        f1, f2, _ = gen_exchangeable_pair(spec)
        return f1, f2
    return gen_nonexchangeable_pair(spec)


def _bench_instance(payload) -> list[BenchRecord]:
    master, n, p, kind, replicate, algorithms, max_comparisons, deadline_s = payload
    seed = instance_seed(master, n, p, kind, replicate)
    spec = InstanceSpec(n=n, p=p, kind=kind, seed=seed)
    f1, f2 = generate_pair(spec)
    budget = Budget(max_comparisons=max_comparisons, deadline_s=deadline_s)
    records = []
    for algo in algorithms:
        result = DETECTORS[algo](f1, f2, budget)
        records.append(
            BenchRecord(
                algorithm=algo,
                n=n,
                p=p,
                kind=kind,
                seed=seed,
                verdict=result.verdict,
                table_comparisons=result.counters.table_comparisons,
                candidates=result.counters.candidates,
                time_ns=result.elapsed_ns,
                budget_exhausted=result.budget_exhausted,
            )
        )
    return records


def run_benchmark(config: BenchConfig) -> list[BenchRecord]:
    """All cells of the grid, one record per (algorithm, instance), sorted by
    (n, p, kind, seed, algorithm) regardless of execution order."""
    payloads = [
        (
            config.master_seed,
            n,
            p,
            kind,
            replicate,
            config.algorithms,
            config.max_comparisons,
            config.deadline_s,
        )
        for n in config.n_list
        for p in config.p_list
        for kind in config.kinds
        for replicate in range(config.seeds_per_cell)
    ]
    records: list[BenchRecord] = []
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for chunk in pool.map(_bench_instance, payloads):
                records.extend(chunk)
    else:
        for payload in payloads:
            records.extend(_bench_instance(payload))
    records.sort(key=BenchRecord.sort_key)
    return records


def write_records_csv(records: Sequence[BenchRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record.csv_row())


def write_aggregate_csv(records: Sequence[BenchRecord], path) -> None:
    """Per-cell means over completed (non-exhausted) records; cells where
    nothing completed get empty mean fields rather than a silent average."""
    cells: dict[tuple, list[BenchRecord]] = {}
    for record in records:
        cells.setdefault((record.algorithm, record.n, record.p, record.kind), []).append(record)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGG_HEADER)
        for key in sorted(cells, key=lambda k: (k[1], k[2], k[3], k[0])):
            group = cells[key]
            done = [r for r in group if not r.budget_exhausted]
            row = [key[0], str(key[1]), repr(key[2]), key[3], str(len(group)),
                   str(len(done)), str(len(group) - len(done))]
            if done:
                row += [
                    f"{sum(r.table_comparisons for r in done) / len(done):.3f}",
                    f"{sum(r.candidates for r in done) / len(done):.3f}",
                    f"{sum(r.time_ns for r in done) / len(done):.3f}",
                ]
            else:
                row += ["", "", ""]
            writer.writerow(row)


def aggregate_path(out_path) -> Path:
    return Path(out_path).with_suffix(".agg.csv")


def run_benchmark_to_csv(config: BenchConfig, out_path) -> list[BenchRecord]:
    records = run_benchmark(config)
    write_records_csv(records, out_path)
    write_aggregate_csv(records, aggregate_path(out_path))
    return records
