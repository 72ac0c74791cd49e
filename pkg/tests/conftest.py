from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from costshare import classes
from costshare.graph import Graph, Instance


def random_graph(rng: random.Random, n: int, m: int) -> Graph:
    """Connected simple graph; m is clamped to the feasible range."""
    m = max(n - 1, min(m, n * (n - 1) // 2))
    return classes.random_connected(n, m, rng)


def random_instance(rng: random.Random, n: int, m: int, top: int = 6, den: int = 3) -> Instance:
    g = random_graph(rng, n, m)
    return Instance(g, classes.random_terminals(g, rng), classes.random_costs(g, rng, top, den))


@st.composite
def small_graphs(draw, min_n: int = 3, max_n: int = 7):
    """Connected simple graphs on v0..v{n-1}."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(f"v{i}", f"v{j}") for i in range(n) for j in range(i + 1, n)]
    tree = [(f"v{draw(st.integers(0, k - 1))}", f"v{k}") for k in range(1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=2 * n, unique=True))
    chosen = list(dict.fromkeys([tuple(sorted(p)) for p in tree] + [tuple(sorted(p)) for p in extra]))
    return Graph.from_pairs(chosen, [f"v{i}" for i in range(n)])


@st.composite
def small_instances(draw, min_n: int = 3, max_n: int = 6):
    g = draw(small_graphs(min_n, max_n))
    vs = list(g.vertices)
    s1, t1 = draw(st.lists(st.sampled_from(vs), min_size=2, max_size=2, unique=True))
    s2, t2 = draw(st.lists(st.sampled_from(vs), min_size=2, max_size=2, unique=True))
    costs = {e.id: Fraction(draw(st.integers(0, 6)), draw(st.integers(1, 3))) for e in g.edges}
    return Instance(g, ((s1, t1), (s2, t2)), costs)


@pytest.fixture
def rng():
    return random.Random(12345)
