from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import random_instance, small_instances
from costshare import classes
from costshare.enforce import check_enforceable
from costshare.errors import NoEnforceableForest
from costshare.forests import (
    enumerate_forests,
    forest_from_edges,
    optimal_forests,
    price_of_stability,
    union_is_forest,
)
from costshare.graph import Graph, Instance, contract_zero_cost, is_forest, path_in_forest


def subset_oracle(inst: Instance) -> set:
    """Every edge subset that is acyclic, joins both pairs, and uses no edge
    off the two induced player paths."""
    g = inst.graph
    ids = [e.id for e in g.edges]
    out = set()
    for k in range(1, len(ids) + 1):
        for sub in itertools.combinations(ids, k):
            if not is_forest(sub, g):
                continue
            p1 = path_in_forest(g, sub, *inst.pair(1))
            p2 = path_in_forest(g, sub, *inst.pair(2))
            if p1 and p2 and p1.edge_set | p2.edge_set == frozenset(sub):
                out.add(frozenset(sub))
    return out


def min_connecting_cost(inst: Instance) -> Fraction:
    """Cheapest edge subset (any shape) connecting both pairs."""
    g = inst.graph
    best = None
    ids = [e.id for e in g.edges]
    for mask in range(1 << len(ids)):
        sub = [ids[j] for j in range(len(ids)) if mask >> j & 1]
        keep = Graph(g.vertices, [g.edge(e) for e in sub])
        if all(t in keep.component_of(s) for s, t in inst.terminals):
            c = inst.cost_of(sub)
            best = c if best is None else min(best, c)
    return best


@given(small_instances(max_n=6))
@settings(max_examples=40, deadline=None)
def test_forest_enumeration_matches_subset_oracle(inst):
    ours = {f.edges for f in enumerate_forests(inst)}
    assert ours == subset_oracle(inst)


def test_optimum_matches_brute_force_on_random_instances():
    rng = random.Random(5)
    for _ in range(15):
        inst = random_instance(rng, rng.randint(4, 6), rng.randint(5, 9))
        cost, opts = optimal_forests(inst)
        assert cost == min_connecting_cost(inst)
        assert all(f.cost == cost for f in opts)


def test_forest_order_is_by_cost_then_edges():
    inst = classes.pos_lower_bound(1)
    forests = enumerate_forests(inst)
    assert [f.sort_key() for f in forests] == sorted(f.sort_key() for f in forests)


def test_fig1bc1_forest_count_after_contracting_zero_edges():
    # The zero-cost edges only create duplicate forests that differ in free edges.
    assert len(enumerate_forests(contract_zero_cost(classes.fig1bc1()))) == 19


def test_fig1bc1_unique_optimum():
    cost, opts = optimal_forests(classes.fig1bc1())
    assert cost == 22
    assert len(opts) == 1
    assert sorted(opts[0].edges) == sorted(classes.FIG1BC1_OPT)


@pytest.mark.parametrize("x", [1, 2, 10, Fraction(1, 2)])
def test_pos_lower_bound_instance(x):
    inst = classes.pos_lower_bound(x)
    forests = enumerate_forests(inst)
    x = Fraction(x)
    assert forests[0].cost == 14 * x + 8
    assert forests[1].cost >= 15 * x + 8
    assert check_enforceable(inst, forests[0]).lp_optimum <= 14 * x + 7
    res = price_of_stability(inst)
    assert res.pos == (15 * x + 8) / (14 * x + 8)
    assert res.best_enforceable.cost == 15 * x + 8
    assert frozenset(classes.POS_ENFORCEABLE) in {f.edges for f in res.ties}


def test_pos_lower_bound_edge_costs_at_x1():
    costs = sorted(classes.pos_lower_bound(1).cost.values())
    assert costs == [2, 3, 3, 4, 5, 5, 6, 6, 9]


def test_pos_of_zero_cost_instance_is_one():
    g = Graph.from_pairs([("a", "b"), ("b", "c")])
    inst = Instance(g, (("a", "b"), ("b", "c")), {"e0": 0, "e1": 0})
    assert price_of_stability(inst).pos == 1


def test_forest_from_edges_errors():
    inst = classes.fig1_shapley()
    f = forest_from_edges(inst, ["s-t2", "t2-t1"])
    assert f.p1.vertices == ("s", "t2", "t1")
    with pytest.raises(ValueError):
        forest_from_edges(inst, ["s-t2", "t2-t1", "s-t1"])
    with pytest.raises(ValueError):
        forest_from_edges(inst, ["s-t2"])


def test_no_enforceable_forest_is_an_error_type():
    assert issubclass(NoEnforceableForest, Exception)


@given(small_instances())
@settings(max_examples=40, deadline=None)
def test_union_shortcut_matches_general_forest_test(inst):
    for p1 in inst.player_paths(1)[:15]:
        for p2 in inst.player_paths(2)[:15]:
            assert union_is_forest(p1, p2) == is_forest(p1.edge_set | p2.edge_set, inst.graph)


def test_shared_structure_cache_does_not_leak_costs():
    rng = random.Random(21)
    base = random_instance(rng, 6, 9)
    other = base.with_costs({e: c + 1 for e, c in base.cost.items()})
    first, second = enumerate_forests(base), enumerate_forests(other)
    assert {f.edges for f in first} == {f.edges for f in second}
    for f in second:
        assert f.cost == other.cost_of(f.edges)
