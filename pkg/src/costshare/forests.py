"""Steiner forests for two players: enumeration, optima and price of stability."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NoEnforceableForest
from .graph import DEFAULT_PATH_CAP, Instance, Path, is_forest, natural_key


@dataclass(frozen=True)
class SteinerForest:
    edges: frozenset
    p1: Path
    p2: Path
    cost: Fraction

    def path(self, player: int) -> Path:
        return self.p1 if player == 1 else self.p2

    def users(self, eid) -> frozenset:
        """S_e(P): the players whose path contains edge ``eid``."""
        return frozenset(i for i in (1, 2) if eid in self.path(i).edge_set)

    @property
    def sorted_edges(self) -> tuple:
        return tuple(sorted(self.edges, key=natural_key))

    def sort_key(self) -> tuple:
        return (self.cost, tuple(natural_key(e) for e in self.sorted_edges))


def union_is_forest(p1: Path, p2: Path) -> bool:
    """Whether the union of two simple paths is acyclic. Vertex-disjoint
    paths always are; otherwise the union is connected and is a tree exactly
    when it has one edge fewer than it has vertices."""
    shared = p1.vertex_set & p2.vertex_set
    if not shared:
        return True
    edges = len(p1.edge_set | p2.edge_set)
    return edges == len(p1.vertex_set | p2.vertex_set) - 1


def forest_from_paths(inst: Instance, p1: Path, p2: Path) -> SteinerForest | None:
    """The forest P1 u P2, or None if that union contains a cycle."""
    if not union_is_forest(p1, p2):
        return None
    edges = p1.edge_set | p2.edge_set
    return SteinerForest(edges, p1, p2, inst.cost_of(edges))


def forest_from_edges(inst: Instance, edge_ids) -> SteinerForest:
    """Build a forest from an edge set; it must be exactly P1 u P2."""
    from .graph import path_in_forest

    edges = frozenset(edge_ids)
    g = inst.graph
    if not is_forest(edges, g):
        raise ValueError("edge set contains a cycle")
    p1 = path_in_forest(g, edges, *inst.pair(1))
    p2 = path_in_forest(g, edges, *inst.pair(2))
    if p1 is None or p2 is None:
        raise ValueError("edge set does not connect both terminal pairs")
    if p1.edge_set | p2.edge_set != edges:
        raise ValueError("edge set has edges on neither player's path")
    return SteinerForest(edges, p1, p2, inst.cost_of(edges))


def enumerate_forests(inst: Instance, cap: int = DEFAULT_PATH_CAP) -> list:
    """All distinct acyclic unions of an s1-t1 path and an s2-t2 path,
    sorted by cost and then by edge set."""
    key = ("forests", cap)
    if key in inst._cache:
        return inst._cache[key]
    priced = [(inst.cost_of(edges), order, edges, p1, p2) for edges, p1, p2, order in _forest_shapes(inst, cap)]
    priced.sort(key=lambda t: t[:2])
    forests = [SteinerForest(edges, p1, p2, c) for c, _, edges, p1, p2 in priced]
    inst._cache[key] = forests
    return forests


def _forest_shapes(inst: Instance, cap: int) -> list:
    """Distinct acyclic path unions (edges, P1, P2, edge sort key); these do not
    depend on costs, so they are memoised on the graph. A forest determines
    both of its paths, so keeping the first pair per edge set loses nothing."""
    key = ("forest-shapes", inst.terminals, cap)
    store = inst.graph._structure
    if key in store:
        return store[key]
    paths1 = inst.player_paths(1, cap)
    paths2 = inst.player_paths(2, cap)
    seen = {}
    for p1 in paths1:
        for p2 in paths2:
            if union_is_forest(p1, p2):
                edges = p1.edge_set | p2.edge_set
                if edges not in seen:
                    order = tuple(natural_key(e) for e in sorted(edges, key=natural_key))
                    seen[edges] = (edges, p1, p2, order)
    store[key] = list(seen.values())
    return store[key]


def optimal_forests(inst: Instance, cap: int = DEFAULT_PATH_CAP) -> tuple:
    """(minimum cost, every forest attaining it)."""
    forests = enumerate_forests(inst, cap)
    best = forests[0].cost
    return best, [f for f in forests if f.cost == best]


@dataclass(frozen=True)
class PosResult:
    pos: Fraction
    opt_cost: Fraction
    best_enforceable: SteinerForest
    # every enforceable forest with the same (minimal) cost, in forest order
    ties: tuple = ()


def price_of_stability(inst: Instance, cap: int = DEFAULT_PATH_CAP) -> PosResult:
    """Cheapest enforceable forest divided by the optimum cost."""
    from .enforce import check_enforceable

    forests = enumerate_forests(inst, cap)
    opt = forests[0].cost
    found: list = []
    for f in forests:
        if found and f.cost > found[0].cost:
            break
        if check_enforceable(inst, f, cap, lexicographic=False).enforceable:
            found.append(f)
    if not found:
        raise NoEnforceableForest("no forest is enforceable")
    best = found[0]
    if opt == 0:
        if best.cost != 0:
            raise NoEnforceableForest("optimum costs 0 but no zero-cost forest is enforceable")
        return PosResult(Fraction(1), opt, best, tuple(found))
    return PosResult(best.cost / opt, opt, best, tuple(found))
