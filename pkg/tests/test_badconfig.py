from __future__ import annotations

import random
from fractions import Fraction

import pytest

from bc_oracle import any_pattern, pattern_occurs
from conftest import random_graph
from costshare import classes
from costshare.badconfig import (
    NO_BC,
    PREFILTER_CYCLE,
    PREFILTER_EDGES,
    PREFILTER_VERTICES,
    detect_bc,
    generate_witness,
    minimal_instance,
    orientations,
    prefilter,
    witness_costs,
)
from costshare.enforce import check_enforceable
from costshare.errors import SearchBudgetExceeded
from costshare.forests import optimal_forests, price_of_stability
from costshare.graph import Graph, Instance, subdivide_unit
from costshare.patterns import PATTERN_IDS, PATTERNS, minimal_embedding, validate_embedding

OPT_COST = {pid: (22 if pid in ("BC1a", "BC1b", "BC3") else 26) for pid in PATTERN_IDS}


def perturb(g: Graph, rng: random.Random, subdivisions: int = 2, extra: int = 2) -> Graph:
    """Subdivide a few edges and attach a few new vertices by random edges."""
    pairs = {tuple(sorted((e.u, e.v))) for e in g.edges}
    for k in range(subdivisions):
        a, b = rng.choice(sorted(pairs))
        pairs.discard((a, b))
        z = f"s{k}"
        pairs |= {(a, z), (b, z)}
    vertices = sorted({v for p in pairs for v in p})
    for k in range(extra):
        z = f"x{k}"
        for a in rng.sample(vertices, 2):
            pairs.add((a, z))
        vertices.append(z)
    return Graph.from_pairs(sorted(pairs))


def test_orientations_cover_both_players_and_directions():
    ors = orientations((("s1", "t1"), ("s2", "t2")))
    assert len(ors) == 8
    assert len(set(ors)) == 8
    for u, v, w, x in ors:
        assert {frozenset((u, v)), frozenset((w, x))} == {
            frozenset(("s1", "t1")),
            frozenset(("s2", "t2")),
        }


@pytest.mark.parametrize("pid", PATTERN_IDS)
def test_minimal_graph_detects_its_own_pattern_first(pid):
    inst = minimal_instance(pid)
    res = detect_bc(inst.graph, inst.terminals)
    assert res.embedding is not None
    assert validate_embedding(res.embedding, inst.graph)
    # detection reports the first pattern in the fixed order; the oracle agrees
    assert res.embedding.pattern == any_pattern(inst.graph, inst.terminals)
    assert pattern_occurs(inst.graph, inst.terminals, pid)


def test_detection_matches_topological_oracle_on_random_graphs():
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(7, 8)
        g = random_graph(rng, n, rng.randint(n + 2, 2 * n + 2))
        terms = classes.random_terminals(g, rng)
        for pid in PATTERN_IDS:
            found = detect_bc(g, terms, use_prefilter=False, patterns=(pid,)).embedding is not None
            assert found == pattern_occurs(g, terms, pid), (pid, g.edges, terms)


def test_detection_matches_oracle_on_perturbed_minimal_graphs():
    rng = random.Random(5)
    for pid in PATTERN_IDS:
        base = minimal_instance(pid)
        g = perturb(base.graph, rng)
        for terms in (base.terminals, classes.random_terminals(g, rng)):
            for other in PATTERN_IDS:
                found = detect_bc(g, terms, use_prefilter=False, patterns=(other,)).embedding is not None
                assert found == pattern_occurs(g, terms, other), (pid, other, terms)


def test_prefilter_never_hides_a_bad_configuration():
    rng = random.Random(2)
    fired = 0
    for _ in range(100):
        n = rng.randint(5, 8)
        g = random_graph(rng, n, rng.randint(n - 1, 2 * n))
        reason = prefilter(g)
        if reason is None:
            continue
        fired += 1
        terms = classes.random_terminals(g, rng)
        assert detect_bc(g, terms, use_prefilter=False).embedding is None, reason
    assert fired > 20


def test_prefilter_reasons():
    assert prefilter(classes.cycle(6)) == PREFILTER_VERTICES
    assert prefilter(classes.cycle(8)) == PREFILTER_EDGES
    assert prefilter(classes.fan(7)) in (PREFILTER_CYCLE, "k4-minor-free")
    # W6 has 7 vertices and a Hamiltonian cycle, so no prefilter applies
    assert prefilter(classes.wheel(6)) is None
    assert prefilter(classes.complete(6)) == PREFILTER_VERTICES
    # K4 with two triangles hanging off it: has a K4 minor, longest cycle 4
    k4 = [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]
    g = Graph.from_pairs(k4 + [("d", "e"), ("e", "f"), ("f", "d"), ("f", "g"), ("g", "h"), ("h", "f")])
    assert prefilter(g) == PREFILTER_CYCLE
    assert prefilter(classes.wheel(7)) is None


def test_wheel_with_seven_rim_vertices_has_no_bad_configuration():
    g = classes.wheel(7)
    rng = random.Random(0)
    for _ in range(60):
        terms = classes.random_terminals(g, rng)
        res = detect_bc(g, terms)
        assert res.embedding is None and res.reason == NO_BC
    assert res.to_json()["result"] == "none"


@pytest.mark.parametrize("make", [classes.bipartite_bc1a, classes.planar_bc1a])
def test_fixture_graphs_contain_bc1a(make):
    inst = make()
    res = detect_bc(inst.graph, inst.terminals)
    assert res.embedding.pattern == "BC1a"
    assert pattern_occurs(inst.graph, inst.terminals, "BC1a")


def test_complete_graph_is_not_efficient():
    g = classes.complete(7)
    verdict = classes.classify_efficiency(g, (("k0", "k1"), ("k2", "k3")))
    assert verdict.verdict == classes.NOT_EFFICIENT


def test_search_budget_is_enforced():
    g = classes.complete(8)
    with pytest.raises(SearchBudgetExceeded):
        detect_bc(g, (("k0", "k1"), ("k2", "k3")), search_cap=3)
    assert classes.classify_efficiency(g, (("k0", "k1"), ("k2", "k3")), search_cap=3).verdict == classes.UNKNOWN


def test_detection_is_deterministic():
    inst = classes.planar_bc1a()
    a = detect_bc(inst.graph, inst.terminals).to_json()
    b = detect_bc(inst.graph, inst.terminals).to_json()
    assert a == b


def test_witness_costs_put_slot_cost_on_first_edge():
    g, emb = minimal_embedding("BC1a")
    sub = Graph.from_pairs([(e.u, e.v) for e in g.edges])
    cost = witness_costs(emb, g)
    pat = PATTERNS["BC1a"]
    for s in pat.slots:
        edges = emb.slots[s.name].edges
        assert sum(cost[e] for e in edges) == s.cost
    total = sum(s.cost for s in pat.slots)
    assert all(c <= total for c in cost.values())
    assert len(sub.edges) == len(g.edges)


def test_witness_on_a_larger_graph_keeps_its_optimum():
    rng = random.Random(8)
    for pid in ("BC1a", "BC2c", "BC4b"):
        g = perturb(minimal_instance(pid).graph, rng, subdivisions=1, extra=1)
        res = detect_bc(g, minimal_instance(pid).terminals)
        inst = generate_witness(res.embedding, g)
        big = 1 + sum(s.cost for s in PATTERNS[res.embedding.pattern].slots)
        assert any(c == big for c in inst.cost.values())
        cost, opts = optimal_forests(inst)
        assert cost == OPT_COST[res.embedding.pattern] and len(opts) == 1
        assert price_of_stability(inst).pos > 1


@pytest.mark.parametrize("pid", ["BC1a", "BC2a", "BC3"])
def test_unit_subdivided_witness_stays_unenforceable(pid):
    inst = subdivide_unit(minimal_instance(pid))
    assert set(inst.cost.values()) == {Fraction(1)}
    cost, opts = optimal_forests(inst)
    assert cost == OPT_COST[pid] and len(opts) == 1
    assert not check_enforceable(inst, opts[0]).enforceable


def test_graphs_without_bad_configuration_have_pos_one():
    rng = random.Random(4)
    checked = 0
    while checked < 8:
        g = random_graph(rng, 7, rng.randint(9, 12))
        terms = classes.random_terminals(g, rng)
        if detect_bc(g, terms).embedding is not None:
            continue
        checked += 1
        for _ in range(5):
            inst = Instance(g, terms, classes.random_costs(g, rng))
            assert price_of_stability(inst).pos == 1


def test_six_vertex_graphs_agree_with_oracle():
    import networkx as nx

    rng = random.Random(12)
    graphs = [G for G in nx.graph_atlas_g() if G.number_of_nodes() == 6 and nx.is_connected(G)]
    for G in rng.sample(graphs, 40):
        g = Graph.from_pairs([(f"v{a}", f"v{b}") for a, b in G.edges()])
        terms = classes.random_terminals(g, rng)
        assert detect_bc(g, terms, use_prefilter=False).embedding is None
        assert any_pattern(g, terms) is None
