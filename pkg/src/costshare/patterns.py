"""The nine Bad Configuration patterns and an independent validator.

A pattern is a small labelled graph whose edges ("slots") stand for paths.
Solid slots need at least one edge; dashed slots may collapse to a single
node. Pattern nodes:

    u, v, w, x   terminals (u-v one player, w-x the other)
    v3, v7       first and last node of the common middle M
    n5 / n1      start of q1 (on M when q1 is small, on the u-side when big)
    v4           start of q3 on M
    v6           end of q2 on M
    n2 / n9      start of q2 on the w-side
    n3, n4       end of q1 (v-side) and of q3 (x-side)
    n6, n7       junctions where q1 and q2 meet; in BC3 n7 (BC4: n2) is the
                 node where q1 leaves the w-side

Every slot carries the cost used by the witness construction; the cost is
put on the slot's first edge.

In the drawings the piece shared by q1 and q2 is dashed in every variant.
When it is a single node the two directions coincide, so the "opposite
direction" variants (BC2b, BC2d, BC4b) keep it as a solid slot here;
collapsed, they would just be BC2a, BC2c and BC4a.

The formal checker :func:`formal_types` works directly on the five paths
(P_u, P_l, q1, q2, q3) with edge-set cycle arithmetic and knows nothing
about slots, so it cross-checks both the tables and the search engine.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Edge, Graph, Path, is_forest, natural_key

PATTERN_IDS = ("BC1a", "BC1b", "BC2a", "BC2b", "BC2c", "BC2d", "BC3", "BC4a", "BC4b")


@dataclass(frozen=True)
class Slot:
    name: str
    a: str
    b: str
    dashed: bool
    cost: int
    host: str  # which of p_u, p_l, q1, q2, q3 the slot lies on


@dataclass(frozen=True)
class Pattern:
    id: str
    slots: tuple
    # each composite path as a sequence of (slot name, reversed?) pairs
    p_u: tuple
    p_l: tuple
    q1: tuple
    q2: tuple
    q3: tuple
    opt_cost: int
    lp_bound: int

    def slot(self, name: str) -> Slot:
        for s in self.slots:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def nodes(self) -> tuple:
        seen: list = []
        for s in self.slots:
            for n in (s.a, s.b):
                if n not in seen:
                    seen.append(n)
        return tuple(seen)

    @property
    def family(self) -> int:
        return int(self.id[2])


def _s(name, a, b, cost=0, host="p_u"):
    return Slot(name, a, b, False, cost, host)


def _d(name, a, b, host="p_u"):
    return Slot(name, a, b, True, 0, host)


def _fwd(*names):
    return tuple((n, False) for n in names)


def _small_forest(m1: int, ru: int):
    """Forest slots when q1 starts on the middle (BC1a, BC2a, BC2b)."""
    return (
        _d("Lu", "u", "v3"),
        _d("Ll_a", "w", "n2", "p_l"),
        _s("Ll_b", "n2", "v3", 5, "p_l"),
        _d("M0", "v3", "n5"),
        _s("M1", "n5", "v4", m1),
        _s("M2", "v4", "v6", 2),
        _s("M3", "v6", "v7", 3),
        _s("Ru_a", "v7", "n3", ru),
        _d("Ru_b", "n3", "v"),
        _s("Rl_a", "v7", "n4", 5, "p_l"),
        _d("Rl_b", "n4", "x", "p_l"),
    )


def _big_forest(m1: int, ru: int):
    """Forest slots when q1 starts on the u-side (BC1b, BC2c, BC2d)."""
    return (
        _d("Lu_a", "u", "n1"),
        _s("Lu_b", "n1", "v3", 0),
        _d("Ll_a", "w", "n2", "p_l"),
        _s("Ll_b", "n2", "v3", 5, "p_l"),
        _s("M1", "v3", "v4", m1),
        _s("M2", "v4", "v6", 2),
        _s("M3", "v6", "v7", 3),
        _s("Ru_a", "v7", "n3", ru),
        _d("Ru_b", "n3", "v"),
        _s("Rl_a", "v7", "n4", 5, "p_l"),
        _d("Rl_b", "n4", "x", "p_l"),
    )


def _walk_forest(m1: int, ru: int, q2s: str, y: str):
    """Forest slots when q1 first walks back along the w-side (BC3, BC4)."""
    return (
        _d("Lu", "u", "v3"),
        _d("Ll_a", "w", q2s, "p_l"),
        _s("Ll_b", q2s, y, 5, "p_l"),
        _s("Ll_c", y, "v3", 0, "p_l"),
        _s("M1", "v3", "v4", m1),
        _s("M2", "v4", "v6", 2),
        _s("M3", "v6", "v7", 3),
        _s("Ru_a", "v7", "n3", ru),
        _d("Ru_b", "n3", "v"),
        _s("Rl_a", "v7", "n4", 5, "p_l"),
        _d("Rl_b", "n4", "x", "p_l"),
    )


_PU_SMALL = _fwd("Lu", "M0", "M1", "M2", "M3", "Ru_a", "Ru_b")
_PL_SMALL = _fwd("Ll_a", "Ll_b", "M0", "M1", "M2", "M3", "Rl_a", "Rl_b")
_PU_BIG = _fwd("Lu_a", "Lu_b", "M1", "M2", "M3", "Ru_a", "Ru_b")
_PL_BIG = _fwd("Ll_a", "Ll_b", "M1", "M2", "M3", "Rl_a", "Rl_b")
_PU_WALK = _fwd("Lu", "M1", "M2", "M3", "Ru_a", "Ru_b")
_PL_WALK = _fwd("Ll_a", "Ll_b", "Ll_c", "M1", "M2", "M3", "Rl_a", "Rl_b")
_Q3 = _s("q3", "v4", "n4", 6, "q3")


def _bc2_q(q1_start: str, same: bool):
    if same:
        b1, b3 = _s("b1", "n2", "n6", 5, "q2"), _s("b3", "n7", "v6", 3, "q2")
        q2 = (("b1", False), ("a2", False), ("b3", False))
    else:
        b1, b3 = _s("b1", "n2", "n7", 5, "q2"), _s("b3", "n6", "v6", 3, "q2")
        q2 = (("b1", False), ("a2", True), ("b3", False))
    slots = (
        _s("a1", q1_start, "n6", 5, "q1"),
        _d("a2", "n6", "n7", "q1") if same else _s("a2", "n6", "n7", 0, "q1"),
        _s("a3", "n7", "n3", 6, "q1"),
        b1,
        b3,
        _Q3,
    )
    return slots, _fwd("a1", "a2", "a3"), q2


def _bc4_q(same: bool):
    if same:
        b1, b3 = _s("b1", "n9", "n6", 5, "q2"), _s("b3", "n7", "v6", 3, "q2")
        q2 = (("b1", False), ("a3", False), ("b3", False))
    else:
        b1, b3 = _s("b1", "n9", "n7", 5, "q2"), _s("b3", "n6", "v6", 3, "q2")
        q2 = (("b1", False), ("a3", True), ("b3", False))
    slots = (
        _s("a2", "n2", "n6", 5, "q1"),
        _d("a3", "n6", "n7", "q1") if same else _s("a3", "n6", "n7", 0, "q1"),
        _s("a4", "n7", "n3", 6, "q1"),
        b1,
        b3,
        _Q3,
    )
    return slots, (("Ll_c", True),) + _fwd("a2", "a3", "a4"), q2


def _build() -> dict:
    out = {}
    bc1_q = (_s("q1", "n5", "n3", 9, "q1"), _s("q2", "n2", "v6", 6, "q2"), _Q3)
    out["BC1a"] = Pattern("BC1a", _small_forest(3, 4) + bc1_q, _PU_SMALL, _PL_SMALL, _fwd("q1"), _fwd("q2"), _fwd("q3"), 22, 21)
    bc1b_q = (_s("q1", "n1", "n3", 9, "q1"), _s("q2", "n2", "v6", 6, "q2"), _Q3)
    out["BC1b"] = Pattern("BC1b", _big_forest(3, 4) + bc1b_q, _PU_BIG, _PL_BIG, _fwd("q1"), _fwd("q2"), _fwd("q3"), 22, 21)
    for pid, same in (("BC2a", True), ("BC2b", False)):
        qs, q1, q2 = _bc2_q("n5", same)
        out[pid] = Pattern(pid, _small_forest(5, 6) + qs, _PU_SMALL, _PL_SMALL, q1, q2, _fwd("q3"), 26, 25)
    for pid, same in (("BC2c", True), ("BC2d", False)):
        qs, q1, q2 = _bc2_q("n1", same)
        out[pid] = Pattern(pid, _big_forest(5, 6) + qs, _PU_BIG, _PL_BIG, q1, q2, _fwd("q3"), 26, 25)
    bc3_q = (_s("a2", "n7", "n3", 9, "q1"), _s("q2", "n2", "v6", 6, "q2"), _Q3)
    out["BC3"] = Pattern(
        "BC3", _walk_forest(3, 4, "n2", "n7") + bc3_q, _PU_WALK, _PL_WALK, (("Ll_c", True), ("a2", False)), _fwd("q2"), _fwd("q3"), 22, 21
    )
    for pid, same in (("BC4a", True), ("BC4b", False)):
        qs, q1, q2 = _bc4_q(same)
        out[pid] = Pattern(pid, _walk_forest(5, 6, "n9", "n2") + qs, _PU_WALK, _PL_WALK, q1, q2, _fwd("q3"), 26, 25)
    return out


PATTERNS = _build()


# -- embeddings -----------------------------------------------------------------


@dataclass
class BCEmbedding:
    pattern: str
    terminals: tuple  # the instance's ((s1, t1), (s2, t2))
    roles: dict  # u, v, w, x -> vertex
    node_map: dict  # pattern node -> vertex
    slots: dict  # slot name -> Path (directed a -> b)
    p_u: Path
    p_l: Path
    q1: Path
    q2: Path
    q3: Path

    @property
    def upper_player(self) -> int:
        """The player whose terminals play the roles u, v."""
        return 1 if {self.roles["u"], self.roles["v"]} == set(self.terminals[0]) else 2

    def edge_ids(self) -> set:
        out = set()
        for p in self.slots.values():
            out.update(p.edges)
        return out

    def to_json(self) -> dict:
        def pj(p: Path):
            return {"vertices": list(p.vertices), "edges": list(p.edges)}

        return {
            "pattern": self.pattern,
            "roles": dict(self.roles),
            "upper_player": self.upper_player,
            "node_map": {k: self.node_map[k] for k in sorted(self.node_map)},
            "slots": {k: pj(self.slots[k]) for k in sorted(self.slots)},
            "paths": {"P_u": pj(self.p_u), "P_l": pj(self.p_l), "q1": pj(self.q1), "q2": pj(self.q2), "q3": pj(self.q3)},
        }


def subpath(p: Path, a, b) -> Path:
    """The part of p between vertices a and b, directed from a to b."""
    i, j = p.vertices.index(a), p.vertices.index(b)
    if i <= j:
        return Path(p.vertices[i : j + 1], p.edges[i:j])
    return Path(p.vertices[j : i + 1], p.edges[j:i]).reversed()


def concat(parts) -> Path:
    verts: list = []
    edges: list = []
    for p in parts:
        if verts:
            if verts[-1] != p.vertices[0]:
                raise ValueError("paths do not join")
            verts.extend(p.vertices[1:])
        else:
            verts.extend(p.vertices)
        edges.extend(p.edges)
    return Path(tuple(verts), tuple(edges))


def compose(pattern: Pattern, slots: dict, recipe: tuple) -> Path:
    return concat(slots[n].reversed() if rev else slots[n] for n, rev in recipe)


def build_embedding(pattern_id: str, terminals, roles: dict, node_map: dict, hosts: dict) -> BCEmbedding:
    """Cut the five host paths into slot paths at the images of pattern nodes."""
    pat = PATTERNS[pattern_id]
    slots = {}
    for s in pat.slots:
        slots[s.name] = subpath(hosts[s.host], node_map[s.a], node_map[s.b])
    return BCEmbedding(
        pattern_id, tuple(tuple(t) for t in terminals), dict(roles), dict(node_map), slots,
        hosts["p_u"], hosts["p_l"], hosts["q1"], hosts["q2"], hosts["q3"],
    )


# -- minimal pattern graphs -------------------------------------------------------


def minimal_graph(pattern_id: str):
    """The pattern with every solid slot a single edge and every dashed slot
    collapsed. Returns (graph, terminals, node_map, slot edge ids).

    Player 1 plays u-v, Player 2 plays w-x. Edge ids are the slot names.
    """
    pat = PATTERNS[pattern_id]
    parent = {n: n for n in pat.nodes}

    def find(n):
        while parent[n] != n:
            n = parent[n]
        return n

    # collapse dashed slots; a terminal or the lower-numbered node names the class
    def rank(n):
        return (0 if n in "uvwx" else 1, natural_key(n))

    for s in pat.slots:
        if s.dashed:
            a, b = find(s.a), find(s.b)
            if a != b:
                keep, drop = sorted((a, b), key=rank)
                parent[drop] = keep
    node_map = {n: find(n) for n in pat.nodes}
    edges = [Edge(s.name, node_map[s.a], node_map[s.b]) for s in pat.slots if not s.dashed]
    g = Graph(set(node_map.values()), edges)
    terminals = ((node_map["u"], node_map["v"]), (node_map["w"], node_map["x"]))
    return g, terminals, node_map


def minimal_embedding(pattern_id: str) -> tuple:
    """(graph, embedding) of the minimal instantiation of a pattern."""
    pat = PATTERNS[pattern_id]
    g, terminals, node_map = minimal_graph(pattern_id)
    slots = {}
    for s in pat.slots:
        a, b = node_map[s.a], node_map[s.b]
        slots[s.name] = Path((a,), ()) if s.dashed else Path((a, b), (s.name,))
    roles = {r: node_map[r] for r in "uvwx"}
    emb = BCEmbedding(
        pattern_id, terminals, roles, node_map, slots,
        compose(pat, slots, pat.p_u), compose(pat, slots, pat.p_l),
        compose(pat, slots, pat.q1), compose(pat, slots, pat.q2), compose(pat, slots, pat.q3),
    )
    return g, emb


# -- formal check ---------------------------------------------------------------------


@dataclass
class _Frame:
    m_edges: frozenset
    lu: frozenset
    ru: frozenset
    ll: frozenset
    rl: frozenset
    lu_nodes: frozenset  # vertices of L_u other than the start of M
    ru_nodes: frozenset
    ll_nodes: frozenset
    rl_nodes: frozenset
    vf: frozenset  # all vertices of P_u and P_l
    notes: list = field(default_factory=list)


def _forest_frame(g: Graph, p_u: Path, p_l: Path):
    if not (p_u.is_valid_in(g) and p_l.is_valid_in(g)):
        return None
    if not is_forest(p_u.edge_set | p_l.edge_set, g):
        return None
    common = p_u.edge_set & p_l.edge_set
    if not common:
        return None
    iu = [k for k, e in enumerate(p_u.edges) if e in common]
    il = [k for k, e in enumerate(p_l.edges) if e in common]
    a, b, m = iu[0], il[0], len(iu)
    if iu[-1] - a + 1 != m or il[-1] - b + 1 != m:
        return None
    # same direction on M: the node sequences of M agree
    if p_u.vertices[a : a + m + 1] != p_l.vertices[b : b + m + 1]:
        return None
    return _Frame(
        m_edges=frozenset(common),
        lu=frozenset(p_u.edges[:a]),
        ru=frozenset(p_u.edges[a + m :]),
        ll=frozenset(p_l.edges[:b]),
        rl=frozenset(p_l.edges[b + m :]),
        lu_nodes=frozenset(p_u.vertices[:a]),
        ru_nodes=frozenset(p_u.vertices[a + m + 1 :]),
        ll_nodes=frozenset(p_l.vertices[:b]),
        rl_nodes=frozenset(p_l.vertices[b + m + 1 :]),
        vf=frozenset(p_u.vertices) | frozenset(p_l.vertices),
    )


def _cycle_with(g: Graph, host: Path, q: Path):
    """Edge set of the unique cycle q closes with host, with q directed along
    host; None if q does not close exactly one cycle with host."""
    if not q.is_valid_in(g) or len(q) == 0:
        return None, None
    hv = host.vertices
    if q.vertices[0] not in hv or q.vertices[-1] not in hv:
        return None, None
    if any(v in hv for v in q.vertices[1:-1]):
        return None, None
    if q.edge_set & host.edge_set:
        return None, None
    i, j = hv.index(q.vertices[0]), hv.index(q.vertices[-1])
    directed = q if i < j else q.reversed()
    lo, hi = min(i, j), max(i, j)
    return q.edge_set | frozenset(host.edges[lo:hi]), directed


def _shared_segment(p: Path, other: Path):
    """Subpath of p from its first to its last vertex lying on ``other``."""
    on = [k for k, v in enumerate(p.vertices) if v in set(other.vertices)]
    if not on:
        return None
    return Path(p.vertices[on[0] : on[-1] + 1], p.edges[on[0] : on[-1]])


def _same_subpath(x: Path, y: Path):
    """None if x, y differ as undirected paths, else True/False for same/opposite direction."""
    if x.vertices == y.vertices and x.edges == y.edges:
        return True
    if x.vertices == y.vertices[::-1] and x.edges == y.edges[::-1]:
        return False
    return None


def formal_types(g: Graph, terminals, roles: dict, p_u: Path, p_l: Path, q1: Path, q2: Path, q3: Path) -> set:
    """Every BC subtype that (P_u, P_l, q1, q2, q3) satisfies under ``roles``."""
    u, v, w, x = (roles[r] for r in "uvwx")
    pairs = [set(t) for t in terminals]
    if not ({u, v} in pairs and {w, x} in pairs and {u, v} != {w, x}):
        return set()
    if len({u, v, w, x}) < 2:
        return set()
    if p_u.vertices[0] != u or p_u.vertices[-1] != v or p_l.vertices[0] != w or p_l.vertices[-1] != x:
        return set()
    fr = _forest_frame(g, p_u, p_l)
    if fr is None or not fr.ru or not fr.ll or not fr.rl:
        return set()
    c1, q1d = _cycle_with(g, p_u, q1)
    c2, q2d = _cycle_with(g, p_l, q2)
    c3, q3d = _cycle_with(g, p_l, q3)
    if c1 is None or c2 is None or c3 is None:
        return set()
    M = fr.m_edges
    if not (c1 & fr.ru and c1 & M):
        return set()
    if not (c2 & fr.ll and c2 & M and M - c2):
        return set()
    if not (c3 & fr.rl and c3 & M and M - c3):
        return set()
    C = c2 & c3 & M
    if not C or not C <= c1:
        return set()
    if not ((M & c1 & c2) - C) or not ((M & c1 & c3) - C):
        return set()

    small = not (c1 & fr.lu)
    n1, n2, n3 = set(q1d.vertices), set(q2d.vertices), set(q3d.vertices)
    inner = lambda q: set(q.vertices[1:-1])  # noqa: E731
    off_forest = all(not (inner(q) & fr.vf) for q in (q1d, q2d, q3d))
    found = set()

    # BC1
    if off_forest and not (n1 & n2) and not (n1 & n3) and not (n2 & n3):
        found.add("BC1a" if small else "BC1b")

    # BC2
    if off_forest and not (n3 & n1) and not (n3 & n2) and n1 & n2:
        a2 = _shared_segment(q1d, q2d)
        b2 = _shared_segment(q2d, q1d)
        same = _same_subpath(a2, b2)
        if same is not None:
            found.add({(True, True): "BC2a", (True, False): "BC2b", (False, True): "BC2c", (False, False): "BC2d"}[(small, same)])

    # BC3 / BC4 share the walk-back conditions on q1
    if small and M <= c1:
        q23_ok = not ((n2 | n3) & (fr.lu_nodes | fr.ru_nodes))
        q1_ok = not (n1 & fr.rl_nodes)
        on_ll = [k for k, vv in enumerate(q1d.vertices) if vv in fr.ll_nodes]
        walk_ok = bool(on_ll) and q2d.vertices[0] not in n1
        if q23_ok and q1_ok and walk_ok:
            last = on_ll[-1]
            alpha1 = frozenset(q1d.edges[:last])
            if alpha1 <= c2:
                if not (n1 & n2) and not (n1 & n3) and not (n2 & n3):
                    found.add("BC3")
                if not (n3 & n1) and not (n3 & n2) and n1 & n2:
                    a3 = _shared_segment(q1d, q2d)
                    b2 = _shared_segment(q2d, q1d)
                    starts_after = q1d.vertices.index(a3.vertices[0]) > last
                    same = _same_subpath(a3, b2)
                    if same is not None and starts_after:
                        found.add("BC4a" if same else "BC4b")
    return found


# -- validation --------------------------------------------------------------------


def slot_structure_ok(emb: BCEmbedding, g: Graph) -> bool:
    """Slot images are paths between the mapped nodes, meet the solid/dashed
    rules, and are internally disjoint from each other and from branch nodes."""
    pat = PATTERNS.get(emb.pattern)
    if pat is None:
        return False
    nm = emb.node_map
    if set(nm) != set(pat.nodes) or any(nm[r] != emb.roles[r] for r in "uvwx"):
        return False
    # distinct pattern nodes may share a vertex only through collapsed dashed slots
    parent = {n: n for n in pat.nodes}

    def find(n):
        while parent[n] != n:
            n = parent[n]
        return n

    for s in pat.slots:
        p = emb.slots.get(s.name)
        if p is None or not p.is_valid_in(g):
            return False
        if p.vertices[0] != nm[s.a] or p.vertices[-1] != nm[s.b]:
            return False
        if len(p) == 0:
            if not s.dashed:
                return False
            parent[find(s.a)] = find(s.b)
    for a in pat.nodes:
        for b in pat.nodes:
            if a < b and nm[a] == nm[b] and find(a) != find(b):
                return False
    branch = set(nm.values())
    seen_inner: set = set()
    seen_edges: set = set()
    for s in pat.slots:
        p = emb.slots[s.name]
        inner = set(p.vertices[1:-1])
        if inner & branch or inner & seen_inner:
            return False
        if set(p.edges) & seen_edges:
            return False
        seen_inner |= inner
        seen_edges |= set(p.edges)
    for name, recipe in (("p_u", pat.p_u), ("p_l", pat.p_l), ("q1", pat.q1), ("q2", pat.q2), ("q3", pat.q3)):
        try:
            built = compose(pat, emb.slots, recipe)
        except ValueError:
            return False
        if built != getattr(emb, name):
            return False
    return True


def validate_embedding(emb: BCEmbedding, g: Graph) -> bool:
    """Re-check an embedding from scratch: slot structure plus the formal
    definition, which must classify it as exactly its own pattern type."""
    if not slot_structure_ok(emb, g):
        return False
    types = formal_types(g, emb.terminals, emb.roles, emb.p_u, emb.p_l, emb.q1, emb.q2, emb.q3)
    return emb.pattern in types
