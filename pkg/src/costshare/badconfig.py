"""Bad Configuration detection and witness cost functions.

The search is forest first. For every assignment of the roles u, v, w, x to
the terminals it lists the pairs (P_u, P_l) of simple paths that share a
common middle M of at least three edges traversed the same way, with
nonempty R_u, L_l and R_l and an acyclic union. For each such frame it looks
for the q-paths required by one pattern family, routing them through the
vertices outside the frame. Patterns are tried in their listing order, so
the first embedding reported is reproducible.

Parallel edges never matter here (every q-path joins two frame vertices at
distance at least two), so the search runs on the simple graph and maps
vertex paths back to the smallest edge id between consecutive vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, SearchBudgetExceeded
from .graph import Graph, Instance, Path, has_k4_minor, longest_cycle_length, natural_key
from .patterns import PATTERN_IDS, PATTERNS, BCEmbedding, build_embedding, minimal_embedding, validate_embedding

DEFAULT_SEARCH_CAP = 5_000_000

PREFILTER_VERTICES = "fewer-than-7-vertices"
PREFILTER_EDGES = "fewer-than-9-edges"
PREFILTER_K4 = "k4-minor-free"
PREFILTER_CYCLE = "longest-cycle-at-most-6"
NO_BC = "no-bc-by-search"
FOUND = "found"


@dataclass
class DetectResult:
    embedding: BCEmbedding | None
    reason: str
    expansions: int = 0

    def to_json(self) -> dict:
        if self.embedding is None:
            return {"result": "none", "prefilter": self.reason, "expansions": self.expansions}
        out = {"result": self.embedding.pattern, "expansions": self.expansions}
        out["embedding"] = self.embedding.to_json()
        return out


def orientations(terminals) -> list:
    """The eight role assignments (u, v, w, x), in a fixed order."""
    (s1, t1), (s2, t2) = terminals
    out = []
    for upper, lower in (((s1, t1), (s2, t2)), ((s2, t2), (s1, t1))):
        for u, v in (upper, upper[::-1]):
            for w, x in (lower, lower[::-1]):
                out.append((u, v, w, x))
    return out


def prefilter(g: Graph) -> str | None:
    """Name of the first structural reason that rules out every BC, if any."""
    if len(g.vertices) < 7:
        return PREFILTER_VERTICES
    if g.num_simple_edges() < 9:
        return PREFILTER_EDGES
    if not has_k4_minor(g):
        return PREFILTER_K4
    if longest_cycle_length(g) <= 6:
        return PREFILTER_CYCLE
    return None


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def tick(self, n: int = 1):
        self.used += n
        if self.used > self.cap:
            raise SearchBudgetExceeded(self.cap)


@dataclass
class _Frame:
    roles: tuple
    pu: tuple
    pl: tuple
    a: int  # index of the first middle vertex in pu
    b: int  # same in pl
    m: int  # number of middle edges
    outside: frozenset

    def mid(self, k: int):
        return self.pu[self.a + k]

    @property
    def ru(self) -> tuple:
        return self.pu[self.a + self.m + 1 :]

    @property
    def rl(self) -> tuple:
        return self.pl[self.b + self.m + 1 :]

    @property
    def lu(self) -> tuple:
        return self.pu[: self.a]


class _Searcher:
    def __init__(self, g: Graph, terminals, budget: _Budget):
        self.g = g
        self.terminals = terminals
        self.budget = budget
        adj = g.simple_adjacency()
        self.adj = {v: tuple(sorted(adj[v], key=natural_key)) for v in g.vertices}
        self._paths: dict = {}
        self._frames: dict = {}

    # -- path enumeration on the simple graph

    def vertex_paths(self, s, t, min_edges: int) -> list:
        key = (s, t)
        if key not in self._paths:
            out = []
            stack = [(s, iter(self.adj[s]))]
            on = {s}
            path = [s]
            while stack:
                v, it = stack[-1]
                nxt = next((w for w in it if w not in on), None)
                if nxt is None:
                    stack.pop()
                    on.discard(path.pop())
                    continue
                self.budget.tick()
                if nxt == t:
                    out.append(tuple(path) + (t,))
                    continue
                on.add(nxt)
                path.append(nxt)
                stack.append((nxt, iter(self.adj[nxt])))
            self._paths[key] = out
        return [p for p in self._paths[key] if len(p) - 1 >= min_edges]

    def routes(self, start, targets: dict, allowed: frozenset | set):
        """Paths from ``start`` to a vertex of ``targets`` with every inner
        vertex in ``allowed``; at least one edge. Lazy, deterministic."""
        path = [start]
        on = {start}
        stack = [iter(self.adj[start])]
        while stack:
            nxt = None
            for w in stack[-1]:
                if w in on:
                    continue
                self.budget.tick()
                if w in targets:
                    yield tuple(path) + (w,)
                if w in allowed:
                    nxt = w
                    break
            if nxt is None:
                stack.pop()
                if len(path) > 1:
                    on.discard(path.pop())
                continue
            on.add(nxt)
            path.append(nxt)
            stack.append(iter(self.adj[nxt]))

    # -- frames

    def frames(self, roles: tuple):
        """Frames for one role assignment, produced lazily and memoised."""
        if roles not in self._frames:
            self._frames[roles] = ([], self._gen_frames(roles))
        done, gen = self._frames[roles]
        yield from list(done)
        k = len(done)
        while True:
            if len(done) > k:
                # another consumer extended the list meanwhile
                yield from done[k:]
                k = len(done)
                continue
            fr = next(gen, None)
            if fr is None:
                return
            done.append(fr)
            k += 1
            yield fr

    def _gen_frames(self, roles: tuple):
        u, v, w, x = roles
        all_v = frozenset(self.g.vertices)
        for pu in self.vertex_paths(u, v, 4):
            on_pu = frozenset(pu)
            if w in on_pu or x in on_pu:
                continue
            free = all_v - on_pu
            for a in range(len(pu)):
                for m in range(3, len(pu) - 1 - a):
                    for left in self.routes(pu[a], {w: None}, free - {w, x}):
                        free_r = free - set(left) - {x}
                        for right in self.routes(pu[a + m], {x: None}, free_r):
                            pl = tuple(left[::-1]) + pu[a + 1 : a + m] + right
                            outside = free - set(left) - set(right)
                            yield _Frame(roles, pu, pl, a, len(left) - 1, m, outside)

    # -- pattern families

    def bc1(self, fr: _Frame, small: bool):
        m = fr.m
        ru = {z: None for z in fr.ru}
        rl = {z: None for z in fr.rl}
        starts = [(k, fr.mid(k)) for k in range(0, m - 2)] if small else [(-1, z) for z in fr.lu]
        for k1, q1s in starts:
            for q1 in self.routes(q1s, ru, fr.outside):
                used1 = set(q1)
                allowed3 = fr.outside - used1
                for k3 in range(max(k1, 0) + 1, m - 1):
                    for q3 in self.routes(fr.mid(k3), rl, allowed3):
                        allowed2 = allowed3 - set(q3)
                        ends = {fr.mid(k): k for k in range(k3 + 1, m)}
                        for q2s in fr.pl[: fr.b]:
                            for q2 in self.routes(q2s, ends, allowed2):
                                return self._emb("BC1a" if small else "BC1b", fr, q1, q2, q3)
        return None

    @staticmethod
    def _junction(q1: tuple, q2: tuple, skip: int = 0):
        """(J1, J2, same) if q2 meets q1[skip:] in one common subpath, else None."""
        inner1 = q1[skip:]
        pos1 = {z: k for k, z in enumerate(inner1)}
        hits = [k for k, z in enumerate(q2) if z in pos1]
        if not hits:
            return None
        if hits[-1] - hits[0] + 1 != len(hits):
            return None
        seg2 = q2[hits[0] : hits[-1] + 1]
        k0 = pos1[seg2[0]]
        k1 = pos1[seg2[-1]]
        lo, hi = min(k0, k1), max(k0, k1)
        seg1 = inner1[lo : hi + 1]
        if len(seg1) != len(seg2):
            return None
        if seg1 == seg2:
            return seg1[0], seg1[-1], True
        if seg1 == seg2[::-1]:
            return seg1[0], seg1[-1], False
        return None

    def bc2(self, fr: _Frame, small: bool, same: bool):
        m = fr.m
        ru = {z: None for z in fr.ru}
        rl = {z: None for z in fr.rl}
        starts = [(k, fr.mid(k)) for k in range(0, m - 2)] if small else [(-1, z) for z in fr.lu]
        pid = {(True, True): "BC2a", (True, False): "BC2b", (False, True): "BC2c", (False, False): "BC2d"}[(small, same)]
        for k1, q1s in starts:
            for q1 in self.routes(q1s, ru, fr.outside):
                if len(q1) < 3:
                    continue
                allowed3 = fr.outside - set(q1)
                for k3 in range(max(k1, 0) + 1, m - 1):
                    for q3 in self.routes(fr.mid(k3), rl, allowed3):
                        allowed2 = fr.outside - set(q3)
                        ends = {fr.mid(k): k for k in range(k3 + 1, m)}
                        for q2s in fr.pl[: fr.b]:
                            for q2 in self.routes(q2s, ends, allowed2):
                                j = self._junction(q1, q2)
                                if j is None:
                                    continue
                                single = j[0] == j[1]
                                if (j[2] or single) == same:
                                    return self._emb(pid, fr, q1, q2, q3, junction=j)
        return None

    def bc34(self, fr: _Frame, family: int, same: bool = True):
        m = fr.m
        ru = {z: None for z in fr.ru}
        rl = {z: None for z in fr.rl}
        b = fr.b
        pid = "BC3" if family == 3 else ("BC4a" if same else "BC4b")
        # q1 walks back from the start of M to pl[y] (y >= 1 so that q2 can start before it)
        for y in range(b - 1, 0, -1):
            walk = tuple(fr.pl[y : b + 1][::-1])
            for tail in self.routes(fr.pl[y], ru, fr.outside):
                q1 = walk + tail[1:]
                if family == 4 and len(tail) < 3:
                    continue
                allowed3 = fr.outside - set(q1)
                for k3 in range(1, m - 1):
                    for q3 in self.routes(fr.mid(k3), rl, allowed3):
                        ends = {fr.mid(k): k for k in range(k3 + 1, m)}
                        if family == 3:
                            allowed2 = allowed3 - set(q3)
                        else:
                            allowed2 = fr.outside - set(q3)
                        for q2s in fr.pl[:y]:
                            for q2 in self.routes(q2s, ends, allowed2):
                                if family == 3:
                                    return self._emb(pid, fr, q1, q2, q3, walk_end=fr.pl[y])
                                j = self._junction(q1, q2, skip=len(walk))
                                if j is None:
                                    continue
                                if (j[2] or j[0] == j[1]) == same:
                                    return self._emb(pid, fr, q1, q2, q3, junction=j, walk_end=fr.pl[y])
        return None

    # -- assembling an embedding

    def _path(self, verts: tuple) -> Path:
        return Path(tuple(verts), tuple(self.g.edge_between(a, b) for a, b in zip(verts, verts[1:])))

    def _emb(self, pid: str, fr: _Frame, q1, q2, q3, junction=None, walk_end=None) -> BCEmbedding:
        u, v, w, x = fr.roles
        nm = {"u": u, "v": v, "w": w, "x": x}
        nm["v3"] = fr.mid(0)
        nm["v7"] = fr.mid(fr.m)
        nm["v4"] = q3[0]
        nm["n4"] = q3[-1]
        nm["v6"] = q2[-1]
        nm["n3"] = q1[-1]
        fam = int(pid[2])
        if fam in (1, 2):
            nm["n2"] = q2[0]
            if pid in ("BC1a", "BC2a", "BC2b"):
                nm["n5"] = q1[0]
            else:
                nm["n1"] = q1[0]
        elif fam == 3:
            nm["n2"] = q2[0]
            nm["n7"] = walk_end
        else:
            nm["n9"] = q2[0]
            nm["n2"] = walk_end
        if junction is not None:
            nm["n6"], nm["n7"] = junction[0], junction[1]
        hosts = {
            "p_u": self._path(fr.pu),
            "p_l": self._path(fr.pl),
            "q1": self._path(q1),
            "q2": self._path(q2),
            "q3": self._path(q3),
        }
        roles = {r: nm[r] for r in "uvwx"}
        return build_embedding(pid, self.terminals, roles, nm, hosts)

    def search(self, pid: str, roles: tuple):
        for fr in self.frames(roles):
            if pid == "BC1a":
                r = self.bc1(fr, True)
            elif pid == "BC1b":
                r = self.bc1(fr, False)
            elif pid == "BC2a":
                r = self.bc2(fr, True, True)
            elif pid == "BC2b":
                r = self.bc2(fr, True, False)
            elif pid == "BC2c":
                r = self.bc2(fr, False, True)
            elif pid == "BC2d":
                r = self.bc2(fr, False, False)
            elif pid == "BC3":
                r = self.bc34(fr, 3)
            elif pid == "BC4a":
                r = self.bc34(fr, 4, True)
            else:
                r = self.bc34(fr, 4, False)
            if r is not None:
                return r
        return None


def detect_bc(
    g: Graph,
    terminals,
    search_cap: int = DEFAULT_SEARCH_CAP,
    use_prefilter: bool = True,
    patterns=PATTERN_IDS,
) -> DetectResult:
    """First Bad Configuration in (pattern, role assignment, frame) order, or none.

    Raises SearchBudgetExceeded once more than ``search_cap`` search steps
    have been spent.
    """
    terminals = tuple(tuple(t) for t in terminals)
    if use_prefilter:
        reason = prefilter(g)
        if reason is not None:
            return DetectResult(None, reason, 0)
    budget = _Budget(search_cap)
    s = _Searcher(g, terminals, budget)
    roles_list = orientations(terminals)
    for pid in patterns:
        for roles in roles_list:
            emb = s.search(pid, roles)
            if emb is not None:
                if not validate_embedding(emb, g):
                    raise ConsistencyError(f"search produced an invalid {pid} embedding")
                return DetectResult(emb, FOUND, budget.used)
    return DetectResult(None, NO_BC, budget.used)


# -- witnesses ----------------------------------------------------------------------


def witness_costs(emb: BCEmbedding, g: Graph) -> dict:
    """Slot costs on each slot's first edge, 0 on the rest of the slot, and
    1 + (sum of slot costs) on every edge outside the embedding."""
    pat = PATTERNS[emb.pattern]
    cost = {}
    total = 0
    for s in pat.slots:
        p = emb.slots[s.name]
        for k, e in enumerate(p.edges):
            cost[e] = Fraction(s.cost if k == 0 else 0)
        total += s.cost
    big = Fraction(1 + total)
    for e in g.edges:
        cost.setdefault(e.id, big)
    return cost


def generate_witness(emb: BCEmbedding, g: Graph) -> Instance:
    return Instance(g, emb.terminals, witness_costs(emb, g))


def minimal_instance(pattern_id: str) -> Instance:
    """Minimal pattern graph of ``pattern_id`` with its witness costs."""
    g, emb = minimal_embedding(pattern_id)
    return generate_witness(emb, g)
