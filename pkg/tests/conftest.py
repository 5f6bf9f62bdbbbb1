import pathlib

import pytest

from fgsym import Range, RandomVariable, build_factor, load
from fgsym.model import PotentialPool

DATA = pathlib.Path(__file__).parent / "data"

BOOL = Range("bool", ("true", "false"))
TERNARY = Range("ternary", ("low", "medium", "high"))

# Value indices for readability: ranges list "true" first, so true == 0.
T, F = 0, 1


def bool_rvs(names):
    return [RandomVariable(name, BOOL) for name in names]


@pytest.fixture
def pool():
    return PotentialPool()


@pytest.fixture
def fig1(pool):
    """Two binary factors with identical tables over A,B / C,B."""
    a, b, c = bool_rvs("ABC")
    f1 = build_factor("phi1", [a, b], [1, 2, 3, 4], pool)
    f2 = build_factor("phi2", [c, b], [1, 2, 3, 4], pool)
    return f1, f2


@pytest.fixture
def fig2(pool):
    """The worked ternary pair: rearranging phi2 to R5,R6,R4 matches phi1."""
    r1, r2, r3, r4, r5, r6 = (RandomVariable(f"R{i}", BOOL) for i in range(1, 7))
    f1 = build_factor("phi1", [r1, r2, r3], [1, 2, 3, 4, 5, 6, 6, 7], pool)
    f2 = build_factor("phi2", [r4, r5, r6], [1, 3, 5, 6, 2, 4, 6, 7], pool)
    return f1, f2


@pytest.fixture
def fig1_graph():
    return load(DATA / "fig1.fg")


@pytest.fixture
def fig2_graph():
    return load(DATA / "fig2.fg")


@pytest.fixture
def fig3_graph():
    return load(DATA / "fig3.fg")
