"""Graph families, named fixture instances, and the efficiency classifier."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import CostShareError, SearchBudgetExceeded
from .graph import Edge, Graph, Instance

FAMILIES = ("wheel", "fan", "cycle", "path", "complete")
FIXTURES = (
    "fig1-shapley",
    "fig1bc1",
    "pos-lower-bound",
    "bipartite-bc1a",
    "planar-bc1a",
)


class BadParameter(CostShareError, ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    family: str
    size: int = 0
    fixture: str | None = None


def _graph(pairs, vertices=()) -> Graph:
    """Graph whose edge ids are 'a-b' for an edge between a and b."""
    vs = set(vertices)
    edges = []
    for a, b in pairs:
        vs.update((a, b))
        edges.append(Edge(f"{a}-{b}", a, b))
    return Graph(vs, edges)


# -- families -------------------------------------------------------------------


def cycle(n: int) -> Graph:
    if n < 3:
        raise BadParameter("a cycle needs at least 3 vertices")
    return _graph([(f"c{i}", f"c{(i + 1) % n}") for i in range(n)])


def path_graph(n: int) -> Graph:
    """Path with n edges (n + 1 vertices)."""
    if n < 1:
        raise BadParameter("a path needs at least 1 edge")
    return _graph([(f"p{i}", f"p{i + 1}") for i in range(n)])


def wheel(n: int) -> Graph:
    """W_n: the cycle C_n plus a hub z adjacent to every rim vertex."""
    if n < 3:
        raise BadParameter("a wheel needs a rim of at least 3 vertices")
    rim = [(f"c{i}", f"c{(i + 1) % n}") for i in range(n)]
    return _graph(rim + [("z", f"c{i}") for i in range(n)])


def fan(n: int) -> Graph:
    """Path with n edges plus an apex z adjacent to all n + 1 path vertices."""
    if n < 1:
        raise BadParameter("a fan needs a path of at least 1 edge")
    spine = [(f"p{i}", f"p{i + 1}") for i in range(n)]
    return _graph(spine + [("z", f"p{i}") for i in range(n + 1)])


def complete(n: int) -> Graph:
    if n < 2:
        raise BadParameter("K_n needs n >= 2")
    return _graph([(f"k{i}", f"k{j}") for i in range(n) for j in range(i + 1, n)])


def series_parallel(n_ops: int, rng: random.Random) -> Graph:
    """Random K4-minor-free graph built from one edge by series and parallel
    compositions (subdivide an edge, or add a path of length 2 parallel to
    an edge). Parallel edges are avoided so the result is simple."""
    edges = [("a", "b")]
    counter = 0
    for _ in range(n_ops):
        u, v = rng.choice(edges)
        w = f"w{counter}"
        counter += 1
        if rng.random() < 0.5:
            edges.remove((u, v))
            edges += [(u, w), (w, v)]
        else:
            edges += [(u, w), (w, v)]
    return Graph.from_pairs(edges)


def random_connected(n: int, m: int, rng: random.Random) -> Graph:
    """Simple connected graph on v0..v{n-1} with m edges: a random spanning
    tree plus m - n + 1 further random edges."""
    if not n - 1 <= m <= n * (n - 1) // 2:
        raise BadParameter(f"no simple connected graph with {n} vertices and {m} edges")
    names = [f"v{i}" for i in range(n)]
    order = names[:]
    rng.shuffle(order)
    pairs = {tuple(sorted((order[k], rng.choice(order[:k])))) for k in range(1, n)}
    rest = [(a, b) for i, a in enumerate(names) for b in names[i + 1 :] if (a, b) not in pairs]
    pairs |= set(rng.sample(rest, m - len(pairs)))
    return _graph(sorted(pairs, key=lambda p: (int(p[0][1:]), int(p[1][1:]))), names)


def random_terminals(g: Graph, rng: random.Random) -> tuple:
    vs = list(g.vertices)
    return tuple(tuple(rng.sample(vs, 2)) for _ in range(2))


def random_costs(g: Graph, rng: random.Random, top: int = 6, den: int = 3) -> dict:
    """Random nonnegative rational costs p/q with p <= top and q <= den."""
    return {e.id: Fraction(rng.randint(0, top), rng.randint(1, den)) for e in g.edges}


# -- named fixtures -------------------------------------------------------------


def fig1_shapley(eps=Fraction(1, 4)) -> Instance:
    """Both players start at s; the shared route s-t2-t1 is optimal."""
    eps = Fraction(eps)
    g = _graph([("s", "t2"), ("t2", "t1"), ("s", "t1")])
    cost = {"s-t2": Fraction(2), "t2-t1": 1 + 2 * eps, "s-t1": 2 + eps}
    return Instance(g, (("s", "t1"), ("s", "t2")), cost)


def fig1_protocol(eps=Fraction(1, 4)):
    """The separable protocol under which the optimum of ``fig1_shapley`` is
    an equilibrium. A two-player protocol is fixed by one number per edge:
    what Player 1 pays when both players use it."""
    from .enforce import SeparableProtocol

    inst = fig1_shapley(eps)
    eps = Fraction(eps)
    p1_pays = {"s-t2": Fraction(0), "t2-t1": Fraction(0), "s-t1": 2 + eps}
    table = {}
    for eid, c in inst.cost.items():
        table[(eid, frozenset())] = {}
        table[(eid, frozenset({1}))] = {1: c}
        table[(eid, frozenset({2}))] = {2: c}
        table[(eid, frozenset({1, 2}))] = {1: p1_pays[eid], 2: c - p1_pays[eid]}
    return SeparableProtocol(table)


FIG1BC1_EDGES = [
    ("s1", "v3", 0),
    ("s2", "n2", 0),
    ("n2", "v3", 5),
    ("v3", "n5", 0),
    ("n5", "v4", 3),
    ("v4", "v6", 2),
    ("v6", "v7", 3),
    ("v7", "n3", 4),
    ("n3", "t1", 0),
    ("v7", "n4", 5),
    ("n4", "t2", 0),
    ("n5", "n3", 9),
    ("n2", "v6", 6),
    ("v4", "n4", 6),
]

# Optimal forest of fig1bc1 and an LP-optimal share vector for it (totals 9 and 12).
FIG1BC1_OPT = ["s1-v3", "s2-n2", "n2-v3", "v3-n5", "n5-v4", "v4-v6", "v6-v7", "v7-n3", "n3-t1", "v7-n4", "n4-t2"]
FIG1BC1_SHARES = {
    (1, "n5-v4"): 2,
    (1, "v4-v6"): 2,
    (1, "v6-v7"): 2,
    (1, "v7-n3"): 3,
    (2, "n2-v3"): 5,
    (2, "n5-v4"): 1,
    (2, "v4-v6"): 0,
    (2, "v6-v7"): 1,
    (2, "v7-n4"): 5,
}


def fig1bc1() -> Instance:
    g = _graph([(a, b) for a, b, _ in FIG1BC1_EDGES])
    cost = {f"{a}-{b}": Fraction(c) for a, b, c in FIG1BC1_EDGES}
    return Instance(g, (("s1", "t1"), ("s2", "t2")), cost)


def pos_lower_bound(x=1) -> Instance:
    x = Fraction(x)
    spec = [
        ("s2", "s1", 3 * x + 2),
        ("s1", "v4", 2 * x + 1),
        ("v4", "v6", x + 1),
        ("v6", "v7", 2 * x + 1),
        ("v7", "t1", 3 * x + 1),
        ("v7", "t2", 3 * x + 2),
        ("v4", "t2", 4 * x + 2),
        ("s2", "v6", 4 * x + 2),
        ("s1", "t1", 6 * x + 3),
    ]
    g = _graph([(a, b) for a, b, _ in spec])
    return Instance(g, (("s1", "t1"), ("s2", "t2")), {f"{a}-{b}": c for a, b, c in spec})


# Cheapest enforceable forest of the PoS instance: direct s1-t1 edge for
# Player 1, the route s2-v6-v4-t2 for Player 2.
POS_ENFORCEABLE = ["s1-t1", "s2-v6", "v4-v6", "v4-t2"]


def _unit(g: Graph, terminals) -> Instance:
    return Instance(g, terminals, {e.id: Fraction(1) for e in g.edges})


def bipartite_bc1a() -> Instance:
    spine = [("v3", "v4"), ("v4", "v5"), ("v5", "v6"), ("v6", "v7"), ("v7", "v8")]
    pairs = [("s1", "v3"), ("s2", "v3")] + spine + [("v8", "t1"), ("v8", "t2"), ("s2", "v7"), ("v4", "t1"), ("v6", "t2")]
    return _unit(_graph(pairs), (("s1", "t1"), ("s2", "t2")))


def planar_bc1a() -> Instance:
    spine = [("v3", "v4"), ("v4", "v6"), ("v6", "v7"), ("v7", "v8")]
    pairs = [("s1", "v3"), ("s2", "v3")] + spine + [("v8", "t1"), ("v8", "t2"), ("s2", "v7"), ("v4", "t1"), ("v6", "t2")]
    return _unit(_graph(pairs), (("s1", "t1"), ("s2", "t2")))


def fixture(name: str, x=1, eps=Fraction(1, 4)) -> Instance:
    if name == "fig1-shapley":
        return fig1_shapley(eps)
    if name == "fig1bc1":
        return fig1bc1()
    if name == "pos-lower-bound":
        return pos_lower_bound(x)
    if name == "bipartite-bc1a":
        return bipartite_bc1a()
    if name == "planar-bc1a":
        return planar_bc1a()
    if name.startswith("bc-minimal-"):
        from .badconfig import minimal_instance
        from .patterns import PATTERN_IDS

        pid = name[len("bc-minimal-"):]
        if pid not in PATTERN_IDS:
            raise BadParameter(f"unknown pattern {pid!r}")
        return minimal_instance(pid)
    raise BadParameter(f"unknown fixture {name!r}")


def generate(spec: FamilySpec):
    """Graph for a family, Instance for a fixture."""
    if spec.family == "paper-fixture":
        return fixture(spec.fixture or "")
    makers = {"wheel": wheel, "fan": fan, "cycle": cycle, "path": path_graph, "complete": complete}
    if spec.family not in makers:
        raise BadParameter(f"unknown family {spec.family!r}")
    return makers[spec.family](spec.size)


# -- classification ---------------------------------------------------------------

EFFICIENT = "Efficient"
NOT_EFFICIENT = "NotEfficient"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Classification:
    verdict: str
    embedding: object = None
    detail: str = ""


def classify_efficiency(g: Graph, terminals, search_cap: int | None = None) -> Classification:
    from .badconfig import DEFAULT_SEARCH_CAP, detect_bc

    try:
        result = detect_bc(g, terminals, search_cap=search_cap or DEFAULT_SEARCH_CAP)
    except SearchBudgetExceeded as exc:
        return Classification(UNKNOWN, None, str(exc))
    if result.embedding is None:
        return Classification(EFFICIENT, None, result.reason)
    return Classification(NOT_EFFICIENT, result.embedding, result.embedding.pattern)
