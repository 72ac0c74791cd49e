"""Undirected multigraphs, two-pair instances, and the structural queries the
rest of the package builds on (path/cycle enumeration, K4-minor test)."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .errors import InvalidInstance, PathExplosion

DEFAULT_PATH_CAP = 100_000

_CHUNK = re.compile(r"(\d+)")


def natural_key(x) -> tuple:
    """Sort key that orders ints numerically and strings like 'e2' < 'e10'."""
    if isinstance(x, int):
        return ((0, x, ""),)
    parts = _CHUNK.split(str(x))
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p != "")


@dataclass(frozen=True)
class Edge:
    id: Hashable
    u: Hashable
    v: Hashable

    def other(self, x):
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise ValueError(f"{x!r} is not an endpoint of edge {self.id!r}")


class Graph:
    """Immutable undirected multigraph. Self-loops are rejected; parallel edges
    are allowed as long as edge ids are unique."""

    def __init__(self, vertices: Iterable, edges: Iterable):
        vs = sorted(set(vertices), key=natural_key)
        es = []
        seen = set()
        vset = set(vs)
        for e in edges:
            e = e if isinstance(e, Edge) else Edge(*e)
            if e.id in seen:
                raise InvalidInstance(f"duplicate edge id {e.id!r}")
            if e.u == e.v:
                raise InvalidInstance(f"edge {e.id!r} is a self-loop")
            if e.u not in vset or e.v not in vset:
                raise InvalidInstance(f"edge {e.id!r} has an unknown endpoint")
            seen.add(e.id)
            es.append(e)
        es.sort(key=lambda e: natural_key(e.id))
        self._vertices = tuple(vs)
        self._edges = tuple(es)
        self._by_id = {e.id: e for e in es}
        self._adj = self._build_adjacency()
        # cost-independent query results (paths, forests), shared by every
        # Instance built on this graph
        self._structure: dict = {}

    def _build_adjacency(self) -> dict:
        adj: dict = {v: [] for v in self._vertices}
        for e in self._edges:
            adj[e.u].append((e.id, e.v))
            adj[e.v].append((e.id, e.u))
        return {v: tuple(lst) for v, lst in adj.items()}

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        return self._edges

    def edge(self, eid) -> Edge:
        return self._by_id[eid]

    def has_edge(self, eid) -> bool:
        return eid in self._by_id

    def incident(self, v) -> tuple:
        """(edge id, neighbour) pairs at v, ascending by edge id."""
        return self._adj[v]

    def degree(self, v) -> int:
        return len(self._adj[v])

    def neighbors(self, v) -> list:
        out = []
        for _, w in self._adj[v]:
            if w not in out:
                out.append(w)
        return sorted(out, key=natural_key)

    def simple_adjacency(self) -> dict:
        return {v: set(w for _, w in self._adj[v]) for v in self._vertices}

    def edge_between(self, a, b):
        """Smallest edge id joining a and b, or None."""
        for eid, w in self._adj[a]:
            if w == b:
                return eid
        return None

    def adjacency_consistent(self) -> bool:
        return self._adj == self._build_adjacency()

    def num_simple_edges(self) -> int:
        return len({frozenset((e.u, e.v)) for e in self._edges})

    def subgraph(self, edge_ids: Iterable) -> "Graph":
        es = [self._by_id[i] for i in edge_ids]
        return Graph(self._vertices, es)

    def component_of(self, v) -> set:
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for _, y in self._adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self):
        return hash((self._vertices, self._edges))

    def __repr__(self):
        return f"Graph(|V|={len(self._vertices)}, |E|={len(self._edges)})"

    @classmethod
    def from_pairs(cls, pairs: Iterable, vertices: Iterable = ()) -> "Graph":
        """Build a graph from (u, v) pairs; edge ids are 'e0', 'e1', ... in input order."""
        pairs = list(pairs)
        vs = set(vertices)
        for u, v in pairs:
            vs.update((u, v))
        return cls(vs, [Edge(f"e{i}", u, v) for i, (u, v) in enumerate(pairs)])


@dataclass(frozen=True)
class Path:
    vertices: tuple
    edges: tuple

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def __len__(self):
        return len(self.edges)

    def reversed(self) -> "Path":
        return Path(self.vertices[::-1], self.edges[::-1])

    def is_valid_in(self, g: Graph) -> bool:
        if len(self.vertices) != len(self.edges) + 1:
            return False
        if len(set(self.vertices)) != len(self.vertices):
            return False
        for i, eid in enumerate(self.edges):
            if not g.has_edge(eid):
                return False
            e = g.edge(eid)
            if {e.u, e.v} != {self.vertices[i], self.vertices[i + 1]}:
                return False
        return True


@dataclass(frozen=True)
class Instance:
    """Graph, two terminal pairs and exact nonnegative edge costs."""

    graph: Graph
    terminals: tuple  # ((s1, t1), (s2, t2))
    cost: Mapping
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        g = self.graph
        terms = tuple(tuple(p) for p in self.terminals)
        object.__setattr__(self, "terminals", terms)
        if len(terms) != 2 or any(len(p) != 2 for p in terms):
            raise InvalidInstance("terminals must be two (s, t) pairs")
        vset = set(g.vertices)
        for i, (s, t) in enumerate(terms, start=1):
            if s not in vset or t not in vset:
                raise InvalidInstance(f"terminal of player {i} is not a vertex")
            if s == t:
                raise InvalidInstance(f"player {i} has s == t")
        cost = {}
        for e in g.edges:
            if e.id not in self.cost:
                raise InvalidInstance(f"edge {e.id!r} has no cost")
            c = Fraction(self.cost[e.id])
            if c < 0:
                raise InvalidInstance(f"edge {e.id!r} has negative cost")
            cost[e.id] = c
        extra = set(self.cost) - set(cost)
        if extra:
            raise InvalidInstance(f"costs given for unknown edges {sorted(map(str, extra))}")
        object.__setattr__(self, "cost", cost)
        for i, (s, t) in enumerate(terms, start=1):
            if t not in g.component_of(s):
                raise InvalidInstance(f"terminals of player {i} are not connected")

    def __hash__(self):
        return hash((self.graph, self.terminals, tuple(sorted(self.cost.items(), key=lambda kv: natural_key(kv[0])))))

    def pair(self, player: int) -> tuple:
        return self.terminals[player - 1]

    def cost_of(self, edge_ids: Iterable) -> Fraction:
        return sum((self.cost[e] for e in edge_ids), Fraction(0))

    def player_paths(self, player: int, cap: int = DEFAULT_PATH_CAP) -> list:
        """All simple s_i-t_i paths (memoised on the graph)."""
        s, t = self.pair(player)
        key = ("paths", s, t, cap)
        store = self.graph._structure
        if key not in store:
            store[key] = enumerate_simple_paths(self.graph, s, t, cap)
        return store[key]

    def with_costs(self, cost: Mapping) -> "Instance":
        return Instance(self.graph, self.terminals, cost)


def enumerate_simple_paths(g: Graph, s, t, cap: int = DEFAULT_PATH_CAP) -> list:
    """All simple s-t paths, in lexicographic order of their edge-id sequences.

    Raises PathExplosion if there are more than ``cap`` of them.
    """
    if s == t:
        return [Path((s,), ())]
    out = []
    verts = [s]
    eids: list = []
    on_path = {s}
    # iterative DFS; each frame holds an iterator over incident edges
    stack = [iter(g.incident(s))]
    while stack:
        advanced = False
        for eid, w in stack[-1]:
            if w in on_path:
                continue
            if w == t:
                out.append(Path(tuple(verts) + (t,), tuple(eids) + (eid,)))
                if len(out) > cap:
                    raise PathExplosion(cap)
                continue
            verts.append(w)
            eids.append(eid)
            on_path.add(w)
            stack.append(iter(g.incident(w)))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if eids:
                eids.pop()
                on_path.discard(verts.pop())
    return out


def longest_cycle_length(g: Graph, cap: int = 10_000_000) -> int:
    """Length of a longest simple cycle; 0 for forests.

    Parallel edges count as a cycle of length 2. ``cap`` bounds the number of
    DFS steps and raises PathExplosion when exceeded.
    """
    adj = g.simple_adjacency()
    order = {v: i for i, v in enumerate(g.vertices)}
    best = 0
    pairs = set()
    for e in g.edges:
        key = frozenset((e.u, e.v))
        if key in pairs:
            best = 2
        pairs.add(key)
    n = len(g.vertices)
    steps = 0
    for s in g.vertices:
        # cycles whose smallest vertex is s
        allowed = {v for v in g.vertices if order[v] > order[s]}
        if len(allowed) + 1 <= best:
            break
        stack = [(s, iter(sorted(adj[s] & allowed, key=order.get)))]
        on_path = {s}
        while stack:
            v, it = stack[-1]
            nxt = None
            for w in it:
                if w not in on_path:
                    nxt = w
                    break
            if nxt is None:
                stack.pop()
                on_path.discard(v)
                continue
            steps += 1
            if steps > cap:
                raise PathExplosion(cap, "cycle-search steps")
            depth = len(stack) + 1
            if s in adj[nxt] and depth >= 3:
                best = max(best, depth)
                if best == n:
                    return best
            on_path.add(nxt)
            stack.append((nxt, iter(sorted((adj[nxt] & allowed) - on_path, key=order.get))))
        on_path.discard(s)
    return best


def has_k4_minor(g: Graph) -> bool:
    """True iff K4 is a minor of g.

    Series-parallel reduction: delete vertices of degree <= 1 and suppress
    degree-2 vertices (parallel edges merge). A graph is K4-minor-free iff
    this empties it; a nonempty remainder has minimum degree 3 and hence a K4
    minor.
    """
    adj = g.simple_adjacency()
    queue = [v for v in g.vertices if len(adj[v]) <= 2]
    while queue:
        v = queue.pop()
        if v not in adj or len(adj[v]) > 2:
            continue
        nbrs = list(adj.pop(v))
        for w in nbrs:
            adj[w].discard(v)
        if len(nbrs) == 2:
            a, b = nbrs
            adj[a].add(b)
            adj[b].add(a)
        for w in nbrs:
            if len(adj[w]) <= 2:
                queue.append(w)
    return bool(adj)


def is_forest(edge_ids: Iterable, g: Graph) -> bool:
    parent: dict = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    for eid in edge_ids:
        e = g.edge(eid)
        a, b = find(e.u), find(e.v)
        if a == b:
            return False
        parent[a] = b
    return True


def path_in_forest(g: Graph, edge_ids: Iterable, s, t):
    """The unique s-t path inside an acyclic edge set, or None if disconnected."""
    adj: dict = {}
    for eid in edge_ids:
        e = g.edge(eid)
        adj.setdefault(e.u, []).append((eid, e.v))
        adj.setdefault(e.v, []).append((eid, e.u))
    if s == t:
        return Path((s,), ())
    prev = {s: None}
    stack = [s]
    while stack:
        x = stack.pop()
        for eid, y in sorted(adj.get(x, ()), key=lambda p: natural_key(p[0])):
            if y not in prev:
                prev[y] = (x, eid)
                stack.append(y)
    if t not in prev:
        return None
    verts, eids = [t], []
    x = t
    while prev[x] is not None:
        x, eid = prev[x]
        verts.append(x)
        eids.append(eid)
    return Path(tuple(reversed(verts)), tuple(reversed(eids)))


def contract_zero_cost(inst: Instance) -> Instance:
    """Identify the endpoints of every zero-cost edge.

    Each merged vertex is named after its smallest member. Zero-cost edges
    disappear; parallel positive edges are kept.
    """
    g = inst.graph
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        if inst.cost[e.id] == 0:
            a, b = find(e.u), find(e.v)
            if a != b:
                lo, hi = sorted((a, b), key=natural_key)
                parent[hi] = lo
    rep = {v: find(v) for v in g.vertices}
    edges = [Edge(e.id, rep[e.u], rep[e.v]) for e in g.edges if inst.cost[e.id] != 0 and rep[e.u] != rep[e.v]]
    terms = tuple((rep[s], rep[t]) for s, t in inst.terminals)
    cost = {e.id: inst.cost[e.id] for e in edges}
    return Instance(Graph(set(rep.values()), edges), terms, cost)


def subdivide_unit(inst: Instance) -> Instance:
    """Replace each edge of integer cost k >= 1 by a path of k unit-cost edges.

    Zero-cost edges are contracted first, so every edge of the result costs 1.
    """
    base = contract_zero_cost(inst)
    vertices = list(base.graph.vertices)
    edges = []
    for e in base.graph.edges:
        c = base.cost[e.id]
        if c.denominator != 1:
            raise InvalidInstance("unit subdivision needs integer costs")
        k = int(c)
        chain = [e.u] + [f"{e.id}.{j}" for j in range(1, k)] + [e.v]
        vertices += chain[1:-1]
        for j in range(k):
            edges.append(Edge(f"{e.id}#{j}", chain[j], chain[j + 1]))
    return Instance(Graph(vertices, edges), base.terminals, {e.id: 1 for e in edges})
