"""Normal forms for LP(F) share vectors.

Edges of F are numbered 1..|F| segment by segment: Player 1's part before
the common middle, Player 2's part before it, the middle P1 n P2, Player 1's
part after it, Player 2's part after it. Each segment is numbered along the
direction of its path, and Player 2's path is reversed if needed so both
players traverse the middle the same way.

* pushed left (PL): no player can move share mass from a later edge of
  their path to an earlier one while staying LP-feasible.
* CHANGE(j, i) on middle edges j < i: Player 2 takes eps more on e_i and eps
  less on e_j, Player 1 does the opposite.
* maximized for Player 2: Player 2's total is maximal among optima that
  keep the first not-fully-paid edge, and no CHANGE(j, i) is feasible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .enforce import PLAYERS, CostShares, ForestLP, build_lp, unpaid_edges
from .errors import ConsistencyError, IndexOutOfSegment, InfeasibleShares
from .forests import SteinerForest
from .graph import DEFAULT_PATH_CAP, Instance
from .lp import EQ, LE, LinearProgram, is_feasible_point, max_step, solve, solve_lexicographic


@dataclass(frozen=True)
class EdgeOrdering:
    order: tuple  # order[k - 1] is the edge with number k
    l1: int
    l2: int
    m: int
    r1: int
    r2: int
    swapped: bool  # Player 2's path was read from t2 to s2
    p1_edges: tuple  # Player 1's edges in path direction
    p2_edges: tuple  # Player 2's edges in (possibly reversed) path direction

    def index(self, eid) -> int:
        return self.order.index(eid) + 1

    def edge(self, k: int):
        return self.order[k - 1]

    @property
    def middle_range(self) -> range:
        lo = self.l1 + self.l2 + 1
        return range(lo, lo + self.m)

    def player_edges(self, player: int) -> tuple:
        return self.p1_edges if player == 1 else self.p2_edges

    def to_json(self) -> dict:
        return {
            "order": list(self.order),
            "segments": {"l1": self.l1, "l2": self.l2, "m": self.m, "r1": self.r1, "r2": self.r2},
            "swapped_s2_t2": self.swapped,
        }


def compute_ordering(inst: Instance, f: SteinerForest) -> EdgeOrdering:
    p1 = list(f.p1.edges)
    p2 = list(f.p2.edges)
    common = set(p1) & set(p2)
    if not common:
        order = tuple(p1 + p2)
        return EdgeOrdering(order, len(p1), len(p2), 0, 0, 0, False, tuple(p1), tuple(p2))
    idx1 = [k for k, e in enumerate(p1) if e in common]
    a1, b1 = idx1[0], idx1[-1]
    if b1 - a1 + 1 != len(common):
        raise ConsistencyError("the common part of the two paths is not contiguous")
    middle = p1[a1 : b1 + 1]
    swapped = False
    idx2 = [k for k, e in enumerate(p2) if e in common]
    a2 = idx2[0]
    if len(middle) > 1 and p2[a2] != middle[0]:
        p2.reverse()
        swapped = True
    elif len(middle) == 1:
        # a single shared edge: compare the traversal direction vertex-wise
        v1 = f.p1.vertices[a1]
        v2 = f.p2.vertices[a2]
        if v1 != v2:
            p2.reverse()
            swapped = True
    idx2 = [k for k, e in enumerate(p2) if e in common]
    a2, b2 = idx2[0], idx2[-1]
    if p2[a2 : b2 + 1] != middle:
        raise ConsistencyError("the players traverse the common part differently")
    left1, right1 = p1[:a1], p1[b1 + 1 :]
    left2, right2 = p2[:a2], p2[b2 + 1 :]
    order = tuple(left1 + left2 + middle + right1 + right2)
    return EdgeOrdering(order, len(left1), len(left2), len(middle), len(right1), len(right2), swapped, tuple(p1), tuple(p2))


def _check_feasible(flp: ForestLP, shares: CostShares) -> list:
    x = flp.vector(shares)
    if not is_feasible_point(flp.lp, x):
        raise InfeasibleShares("shares are not feasible for LP(F)")
    return x


def max_transfer(flp: ForestLP, x: list, player: int, to_edge, from_edge) -> Fraction:
    """Largest eps for which moving eps of ``player``'s share from ``from_edge``
    to ``to_edge`` keeps x feasible."""
    d = [Fraction(0)] * len(x)
    d[flp.index[(player, to_edge)]] = Fraction(1)
    d[flp.index[(player, from_edge)]] = Fraction(-1)
    return max_step(flp.lp, x, d)


@dataclass(frozen=True)
class PushViolation:
    player: int
    earlier: object
    later: object
    eps: Fraction


def pl_violations(inst: Instance, f: SteinerForest, shares: CostShares, cap: int = DEFAULT_PATH_CAP) -> list:
    flp = build_lp(inst, f, cap)
    x = _check_feasible(flp, shares)
    ordering = compute_ordering(inst, f)
    out = []
    for i in PLAYERS:
        edges = ordering.player_edges(i)
        for a, e in enumerate(edges):
            for g in edges[a + 1 :]:
                eps = max_transfer(flp, x, i, e, g)
                if eps:
                    out.append(PushViolation(i, e, g, eps))
    return out


def is_pushed_left(inst: Instance, f: SteinerForest, shares: CostShares, cap: int = DEFAULT_PATH_CAP):
    """(True, None) if PL holds, else (False, first violating transfer)."""
    bad = pl_violations(inst, f, shares, cap)
    return (not bad, bad[0] if bad else None)


def _restricted_max(flp: ForestLP, x: list, free: list, objective_pos: int, keep_sum: Fraction):
    """Maximise x[objective_pos] over the variables ``free`` (others fixed at
    x) subject to LP(F) and sum(free) == keep_sum."""
    k = len(free)
    where = {j: t for t, j in enumerate(free)}
    fixed = [v if j not in where else Fraction(0) for j, v in enumerate(x)]
    obj = [Fraction(0)] * k
    obj[where[objective_pos]] = Fraction(1)
    sub = LinearProgram(k, obj)
    for c in flp.lp.constraints:
        row = [c.coeffs[j] for j in free]
        if not any(row):
            continue
        rhs = c.rhs - c.lhs(fixed)
        sub.add(row, c.relation, rhs)
    sub.add([1] * k, EQ, keep_sum)
    sol = solve(sub)
    if not sol.optimal:
        raise ConsistencyError("restricted push LP has no optimum")
    return sol


def push_left(
    inst: Instance, f: SteinerForest, shares: CostShares, cap: int = DEFAULT_PATH_CAP, max_rounds: int | None = None
) -> CostShares:
    """Push every player's shares as far left as LP(F) allows.

    For each player and each position a along their path, the share on the
    a-th edge is maximised while the shares before it, the other player's
    shares and the total on positions a, a+1, ... stay fixed. A round does
    this for both players; rounds repeat until nothing changes. A share is
    only rewritten when its maximum strictly exceeds the current value, so a
    vector that is already pushed left comes back unchanged.
    """
    flp = build_lp(inst, f, cap)
    x = _check_feasible(flp, shares)
    ordering = compute_ordering(inst, f)
    rounds = max_rounds if max_rounds is not None else 4 * len(f.edges) + 4
    for _ in range(rounds):
        changed = False
        for i in PLAYERS:
            positions = [flp.index[(i, e)] for e in ordering.player_edges(i)]
            for a, pos in enumerate(positions):
                suffix = positions[a:]
                if len(suffix) == 1:
                    continue
                total = sum((x[j] for j in suffix), Fraction(0))
                if total == x[pos]:
                    continue
                sol = _restricted_max(flp, x, suffix, pos, total)
                if sol.values[0] > x[pos]:
                    for t, j in enumerate(suffix):
                        x[j] = sol.values[t]
                    changed = True
        if not changed:
            return flp.shares(x)
    raise ConsistencyError("push_left did not reach a fixed point within its round cap")


def _middle_keys(ordering: EdgeOrdering, j: int, i: int):
    mid = ordering.middle_range
    if j not in mid or i not in mid:
        raise IndexOutOfSegment(f"indices {j}, {i} are not both in the middle segment {mid.start}..{mid.stop - 1}")
    if not j < i:
        raise IndexOutOfSegment("CHANGE(j, i) needs j < i")
    return ordering.edge(j), ordering.edge(i)


def _change_direction(flp: ForestLP, ej, ei) -> list:
    d = [Fraction(0)] * len(flp.variables)
    d[flp.index[(2, ei)]] += 1
    d[flp.index[(1, ej)]] += 1
    d[flp.index[(2, ej)]] -= 1
    d[flp.index[(1, ei)]] -= 1
    return d


def change_feasible(
    inst: Instance, f: SteinerForest, shares: CostShares, j: int, i: int, cap: int = DEFAULT_PATH_CAP
) -> tuple:
    """(eps > 0, eps): the largest step of CHANGE(j, i) that stays feasible."""
    ordering = compute_ordering(inst, f)
    ej, ei = _middle_keys(ordering, j, i)
    flp = build_lp(inst, f, cap)
    x = _check_feasible(flp, shares)
    eps = max_step(flp.lp, x, _change_direction(flp, ej, ei))
    if eps is None:
        raise ConsistencyError("CHANGE step is unbounded")
    return eps > 0, eps


def apply_change(inst: Instance, f: SteinerForest, shares: CostShares, j: int, i: int, eps, cap: int = DEFAULT_PATH_CAP) -> CostShares:
    ordering = compute_ordering(inst, f)
    ej, ei = _middle_keys(ordering, j, i)
    out = shares.copy()
    out[(2, ei)] = out[(2, ei)] + eps
    out[(1, ej)] = out[(1, ej)] + eps
    out[(2, ej)] = out[(2, ej)] - eps
    out[(1, ei)] = out[(1, ei)] - eps
    return out


def first_unpaid(inst: Instance, f: SteinerForest, shares: CostShares, ordering: EdgeOrdering | None = None):
    """Order index of the first edge whose shares fall short of its cost, or None."""
    ordering = ordering or compute_ordering(inst, f)
    short = {e for e, _ in unpaid_edges(inst, f, shares)}
    for k, e in enumerate(ordering.order, start=1):
        if e in short:
            return k
    return None


@dataclass
class Max2Result:
    shares: CostShares
    ordering: EdgeOrdering
    first_unpaid: int | None
    case: str | None  # "L", "M", "R" by the segment of the first unpaid edge
    vacuous: list = field(default_factory=list)
    passes: int = 0


def _max_player2_keeping(flp: ForestLP, inst: Instance, ordering: EdgeOrdering, optimum: Fraction, k: int | None):
    """max Player 2's total over LP(F)-optima whose edges numbered < k are fully paid."""
    lp = flp.lp.with_objective(flp.player_vector(2))
    lp.add(flp.lp.objective, EQ, optimum)
    if k is not None:
        for e in ordering.order[: k - 1]:
            row = {flp.index[key]: 1 for key in ((1, e), (2, e)) if key in flp.index}
            lp.add(row, EQ, inst.cost[e])
    sol = solve(lp)
    if not sol.optimal:
        raise ConsistencyError("restricted Player-2 LP has no optimum")
    return sol


def no_change_feasible(inst: Instance, f: SteinerForest, shares: CostShares, cap: int = DEFAULT_PATH_CAP) -> bool:
    ordering = compute_ordering(inst, f)
    mid = list(ordering.middle_range)
    for a, j in enumerate(mid):
        for i in mid[a + 1 :]:
            if change_feasible(inst, f, shares, j, i, cap)[0]:
                return False
    return True


def maximize_for_player2(inst: Instance, f: SteinerForest, cap: int = DEFAULT_PATH_CAP) -> Max2Result:
    flp = build_lp(inst, f, cap)
    ordering = compute_ordering(inst, f)
    start = solve_lexicographic(flp.lp, flp.player_vector(2))
    optimum = start.primary_objective
    shares = push_left(inst, f, flp.shares(start.values), cap)
    k = first_unpaid(inst, f, shares, ordering)
    while True:
        sol = _max_player2_keeping(flp, inst, ordering, optimum, k)
        shares = flp.shares(sol.values)
        k_new = first_unpaid(inst, f, shares, ordering)
        if k_new == k:
            break
        if k is not None and (k_new is None or k_new < k):
            raise ConsistencyError("the first unpaid edge moved left")
        k = k_new

    # Algorithm Change: sweep i from the right end of the middle, j below it
    mid = list(ordering.middle_range)
    cap_passes = max(1, len(f.edges) ** 2)
    passes = 0
    while True:
        passes += 1
        if passes > cap_passes:
            raise ConsistencyError("Algorithm Change exceeded its |F|^2 pass cap")
        changed = False
        for i in reversed(mid):
            for j in reversed(range(mid[0], i)) if mid else ():
                ok, eps = change_feasible(inst, f, shares, j, i, cap)
                if ok:
                    shares = apply_change(inst, f, shares, j, i, eps, cap)
                    changed = True
        if not changed:
            break

    best = _max_player2_keeping(flp, inst, ordering, optimum, k).objective
    if shares.total(2) != best or shares.total() != optimum:
        raise ConsistencyError("Player 2's total is not maximal after the change loop")
    if first_unpaid(inst, f, shares, ordering) != k:
        raise ConsistencyError("the first unpaid edge moved during the change loop")
    if not no_change_feasible(inst, f, shares, cap):
        raise ConsistencyError("a CHANGE step is still feasible")

    case = None
    if k is not None:
        if k <= ordering.l1 + ordering.l2:
            case = "L"
        elif k in ordering.middle_range:
            case = "M"
        else:
            case = "R"
    vacuous = []
    if ordering.m < 2:
        vacuous.append("NC")
    if k is None:
        vacuous.append("first-unpaid")
    return Max2Result(shares, ordering, k, case, vacuous, passes)
