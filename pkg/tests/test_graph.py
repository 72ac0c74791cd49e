from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import random_graph, small_graphs
from costshare import classes
from costshare.errors import InvalidInstance, PathExplosion
from costshare.graph import (
    Edge,
    Graph,
    Instance,
    contract_zero_cost,
    enumerate_simple_paths,
    has_k4_minor,
    is_forest,
    longest_cycle_length,
    natural_key,
    path_in_forest,
    subdivide_unit,
)


# -- oracles ----------------------------------------------------------------------


def dfs_paths(g: Graph, s, t):
    """Recursive DFS over edge ids: every simple s-t path as an edge-id tuple."""
    out = []

    def go(v, seen, eids):
        if v == t:
            out.append(tuple(eids))
            return
        for e in g.edges:
            if v in (e.u, e.v):
                w = e.other(v)
                if w not in seen:
                    go(w, seen | {w}, eids + [e.id])

    go(s, {s}, [])
    return out


def brute_longest_cycle(g: Graph) -> int:
    """Try every ordered vertex subset (fixing its first vertex as the smallest)."""
    adj = {v: set() for v in g.vertices}
    multi = set()
    for e in g.edges:
        key = frozenset((e.u, e.v))
        if e.v in adj[e.u]:
            multi.add(key)
        adj[e.u].add(e.v)
        adj[e.v].add(e.u)
    best = 2 if multi else 0
    vs = list(g.vertices)
    for k in range(3, len(vs) + 1):
        for combo in itertools.combinations(vs, k):
            first, rest = combo[0], combo[1:]
            if any(
                all(b in adj[a] for a, b in zip((first,) + perm, perm + (first,)))
                for perm in itertools.permutations(rest)
            ):
                best = k
                break
    return best


def brute_k4_minor(g: Graph) -> bool:
    """K4 is a minor iff four disjoint connected branch sets are pairwise adjacent."""
    vs = list(g.vertices)
    adj = {v: set() for v in vs}
    for e in g.edges:
        adj[e.u].add(e.v)
        adj[e.v].add(e.u)

    def connected(part):
        part = set(part)
        if not part:
            return False
        start = next(iter(part))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in adj[x] & part:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == part

    for labels in itertools.product(range(5), repeat=len(vs)):
        # symmetry: branch set k's first vertex appears before branch set k+1's
        firsts = [labels.index(k) if k in labels else None for k in range(4)]
        if None in firsts or firsts != sorted(firsts):
            continue
        parts = [[v for v, lab in zip(vs, labels) if lab == k] for k in range(4)]
        if not all(connected(p) for p in parts):
            continue
        if all(any(adj[a] & set(parts[j]) for a in parts[i]) for i in range(4) for j in range(i + 1, 4)):
            return True
    return False


# -- Graph and Instance -------------------------------------------------------------


def test_natural_key_orders_numbers_numerically():
    assert sorted(["e10", "e2", "e1"], key=natural_key) == ["e1", "e2", "e10"]


def test_self_loop_rejected():
    with pytest.raises(InvalidInstance):
        Graph(["a"], [Edge("e", "a", "a")])


def test_duplicate_edge_id_rejected():
    with pytest.raises(InvalidInstance):
        Graph(["a", "b"], [Edge("e", "a", "b"), Edge("e", "b", "a")])


def test_parallel_edges_allowed():
    g = Graph(["a", "b"], [Edge("e0", "a", "b"), Edge("e1", "a", "b")])
    assert g.degree("a") == 2
    assert g.num_simple_edges() == 1
    assert g.edge_between("b", "a") == "e0"


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_adjacency_rebuild_matches(g):
    assert g.adjacency_consistent()
    rebuilt = {v: sorted(e.id for e in g.edges if v in (e.u, e.v)) for v in g.vertices}
    assert {v: sorted(eid for eid, _ in g.incident(v)) for v in g.vertices} == rebuilt


def test_instance_validation():
    g = Graph.from_pairs([("a", "b"), ("c", "d")])
    ok_costs = {"e0": 1, "e1": 2}
    with pytest.raises(InvalidInstance):
        Instance(g, (("a", "b"), ("a", "c")), ok_costs)  # a-c disconnected
    with pytest.raises(InvalidInstance):
        Instance(g, (("a", "a"), ("c", "d")), ok_costs)
    with pytest.raises(InvalidInstance):
        Instance(g, (("a", "x"), ("c", "d")), ok_costs)
    with pytest.raises(InvalidInstance):
        Instance(g, (("a", "b"), ("c", "d")), {"e0": -1, "e1": 2})
    with pytest.raises(InvalidInstance):
        Instance(g, (("a", "b"), ("c", "d")), {"e0": 1})
    inst = Instance(g, (("a", "b"), ("c", "d")), ok_costs)
    assert inst.cost["e1"] == Fraction(2)


# -- simple paths -------------------------------------------------------------------


def test_triangle_paths():
    g = Graph.from_pairs([("a", "b"), ("b", "c"), ("a", "c")])
    paths = enumerate_simple_paths(g, "a", "b")
    assert [p.vertices for p in paths] == [("a", "b"), ("a", "c", "b")]


def test_single_edge_one_path():
    g = Graph.from_pairs([("s", "t")])
    assert len(enumerate_simple_paths(g, "s", "t")) == 1


def test_fig1bc1_player2_paths_match_dfs_oracle():
    inst = classes.fig1bc1()
    s, t = inst.pair(2)
    ours = [p.edges for p in enumerate_simple_paths(inst.graph, s, t)]
    oracle = dfs_paths(inst.graph, s, t)
    assert sorted(ours) == sorted(oracle)
    assert len(ours) == len(oracle)


def test_random_graphs_paths_match_dfs_oracle():
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(3, 8)
        g = random_graph(rng, n, rng.randint(n - 1, min(n * (n - 1) // 2, 2 * n)))
        s, t = rng.sample(list(g.vertices), 2)
        ours = [p.edges for p in enumerate_simple_paths(g, s, t)]
        key = lambda seq: [natural_key(e) for e in seq]  # noqa: E731
        assert ours == sorted(dfs_paths(g, s, t), key=key)
        assert all(p.is_valid_in(g) for p in enumerate_simple_paths(g, s, t))


def test_path_explosion():
    g = classes.complete(7)
    with pytest.raises(PathExplosion):
        enumerate_simple_paths(g, "k0", "k1", cap=100)


# -- cycles and minors -------------------------------------------------------------


def test_longest_cycle_small_cases():
    assert longest_cycle_length(classes.path_graph(5)) == 0
    assert longest_cycle_length(classes.cycle(6)) == 6
    assert longest_cycle_length(classes.wheel(5)) == 6


@given(small_graphs(max_n=7))
@settings(max_examples=60, deadline=None)
def test_longest_cycle_matches_brute_force(g):
    assert longest_cycle_length(g) == brute_longest_cycle(g)


def test_longest_cycle_parallel_edges():
    g = Graph(["a", "b"], [Edge("e0", "a", "b"), Edge("e1", "a", "b")])
    assert longest_cycle_length(g) == 2


def test_k4_minor_known_graphs():
    assert has_k4_minor(classes.complete(4))
    assert not has_k4_minor(classes.cycle(8))
    assert has_k4_minor(classes.wheel(3))
    assert has_k4_minor(classes.wheel(9))
    assert not has_k4_minor(classes.fan(1))


@given(small_graphs(max_n=7))
@settings(max_examples=40, deadline=None)
def test_k4_minor_matches_branch_set_oracle(g):
    assert has_k4_minor(g) == brute_k4_minor(g)


def test_series_parallel_graphs_have_no_k4_minor():
    rng = random.Random(3)
    for _ in range(30):
        assert not has_k4_minor(classes.series_parallel(rng.randint(1, 25), rng))


# -- forests and transformations -----------------------------------------------------


def test_is_forest_and_path_in_forest():
    g = Graph.from_pairs([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])
    assert is_forest(["e0", "e1", "e3"], g)
    assert not is_forest(["e0", "e1", "e2"], g)
    p = path_in_forest(g, ["e0", "e1", "e3"], "a", "d")
    assert p.vertices == ("a", "b", "c", "d")
    assert path_in_forest(g, ["e0"], "a", "d") is None


def test_contract_zero_cost_fig1bc1():
    inst = contract_zero_cost(classes.fig1bc1())
    assert all(c > 0 for c in inst.cost.values())
    assert len(inst.graph.edges) == 9
    assert inst.terminals == (("n5", "n3"), ("n2", "n4"))


def test_subdivide_unit_keeps_costs_as_path_lengths():
    inst = subdivide_unit(classes.pos_lower_bound(1))
    assert set(inst.cost.values()) == {1}
    assert len(inst.graph.edges) == sum(classes.pos_lower_bound(1).cost.values())
