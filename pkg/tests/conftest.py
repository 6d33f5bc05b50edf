import random
from fractions import Fraction

import pytest

from specfib import FibrationGeometry, IntersectionRingSpec, ring_from_spec


OCTIC_SPEC = IntersectionRingSpec(
    ("H", "l"),
    (
        ((8, 4), (4, 0)),
        ((4, 0), (0, 0)),
    ),
)


@pytest.fixture(scope="session")
def octic_ring():
    return ring_from_spec(OCTIC_SPEC)


@pytest.fixture(scope="session")
def octic_fib(octic_ring):
    return FibrationGeometry(ring=octic_ring, fiber=(0, 1), base_genus=0)


def random_fibered_ring(rng: random.Random, ndiv: int = 3):
    """Random threefold ring with a distinguished last divisor acting as a
    fiber class: every triple with two fiber indices vanishes."""
    n = ndiv
    f = n - 1
    triple = [[[0] * n for _ in range(n)] for _ in range(n)]
    import itertools

    for i, j, k in itertools.combinations_with_replacement(range(n), 3):
        if (i, j, k).count(f) >= 2:
            value = 0
        else:
            value = rng.randint(-4, 4)
        for a, b, c in itertools.permutations((i, j, k)):
            triple[a][b][c] = value
    names = tuple(f"D{i}" for i in range(n - 1)) + ("f",)
    spec = IntersectionRingSpec(
        names, tuple(tuple(tuple(row) for row in plane) for plane in triple)
    )
    ring = ring_from_spec(spec)
    fiber = tuple(Fraction(int(i == f)) for i in range(n))
    return FibrationGeometry(ring=ring, fiber=fiber, base_genus=rng.randint(0, 2))
