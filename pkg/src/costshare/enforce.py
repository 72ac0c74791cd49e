"""LP(F), the enforceability test, and the explicit separable protocol.

For a forest F with player paths P1, P2 the program has one share variable
xi[i, e] per player i and edge e of P_i, and three families of rows:

* capacity:   sum over users of e of xi[i, e] <= c(e)
* deviation:  sum_{e in P_i minus P'} xi[i, e] <= c(P' minus P_i)
  for every simple s_i-t_i path P'
* xi >= 0

F can be made a Nash equilibrium of some separable protocol exactly when the
optimum of this program equals c(F).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .errors import InfeasibleShares, NotBudgetBalanced
from .forests import SteinerForest
from .graph import DEFAULT_PATH_CAP, Instance, Path, natural_key
from .lp import LE, LinearProgram, is_feasible_point, solve, solve_lexicographic

PLAYERS = (1, 2)


@dataclass
class CostShares:
    """xi[(player, edge)], defined exactly on the edges of each player's path."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key) -> Fraction:
        return self.values.get(key, Fraction(0))

    def __setitem__(self, key, value):
        self.values[key] = Fraction(value)

    def __eq__(self, other):
        if not isinstance(other, CostShares):
            return NotImplemented
        return self.values == other.values

    @classmethod
    def for_forest(cls, f: SteinerForest, given: Mapping = ()) -> "CostShares":
        """Shares on every (player, edge of P_i); unspecified entries are 0."""
        given = dict(given)
        return cls({k: Fraction(given.get(k, 0)) for k in share_variables(f)})

    def copy(self) -> "CostShares":
        return CostShares(dict(self.values))

    def total(self, player: int | None = None) -> Fraction:
        return sum((v for (i, _), v in self.values.items() if player is None or i == player), Fraction(0))

    def on_edge(self, eid) -> Fraction:
        return sum((v for (_, e), v in self.values.items() if e == eid), Fraction(0))

    def to_json(self) -> list:
        items = sorted(self.values.items(), key=lambda kv: (kv[0][0], natural_key(kv[0][1])))
        return [{"player": i, "edge": e, "share": str(v)} for (i, e), v in items]


# -- LP(F) ------------------------------------------------------------------


@dataclass
class ForestLP:
    """LP(F) plus the bookkeeping that maps variables and rows back to the game."""

    lp: LinearProgram
    variables: list  # position -> (player, edge id)
    index: dict  # (player, edge id) -> position

    def vector(self, shares: CostShares) -> list:
        return [shares[k] for k in self.variables]

    def shares(self, values) -> CostShares:
        return CostShares({k: Fraction(v) for k, v in zip(self.variables, values)})

    def player_vector(self, player: int) -> list:
        return [Fraction(1) if k[0] == player else Fraction(0) for k in self.variables]


def share_variables(f: SteinerForest) -> list:
    """Variable order: Player 1's edges along P1, then Player 2's along P2."""
    return [(i, e) for i in PLAYERS for e in f.path(i).edges]


def build_lp(inst: Instance, f: SteinerForest, cap: int = DEFAULT_PATH_CAP) -> ForestLP:
    key = ("lp", f.edges, cap)
    if key in inst._cache:
        return inst._cache[key]
    variables = share_variables(f)
    index = {k: j for j, k in enumerate(variables)}
    n = len(variables)
    lp = LinearProgram(n, [1] * n, names=[f"xi{i},{e}" for i, e in variables])
    for e in f.sorted_edges:
        row = {index[(i, e)]: 1 for i in f.users(e)}
        lp.add(row, LE, inst.cost[e], tag=("capacity", e))
    for i in PLAYERS:
        own = f.path(i)
        own_set = own.edge_set
        for alt in inst.player_paths(i, cap):
            if alt.edges == own.edges:
                continue
            alt_set = alt.edge_set
            row = {index[(i, e)]: 1 for e in own.edges if e not in alt_set}
            rhs = inst.cost_of(e for e in alt.edges if e not in own_set)
            lp.add(row, LE, rhs, tag=("deviation", i, alt))
    out = ForestLP(lp, variables, index)
    inst._cache[key] = out
    return out


@dataclass
class EnforceReport:
    lp_optimum: Fraction
    forest_cost: Fraction
    enforceable: bool
    shares: CostShares
    unpaid_edges: list  # (edge id, deficit)

    def to_json(self) -> dict:
        return {
            "lp_optimum": str(self.lp_optimum),
            "forest_cost": str(self.forest_cost),
            "enforceable": self.enforceable,
            "shares": self.shares.to_json(),
            "unpaid_edges": [{"edge": e, "deficit": str(d)} for e, d in self.unpaid_edges],
        }


def unpaid_edges(inst: Instance, f: SteinerForest, shares: CostShares) -> list:
    out = []
    for e in f.sorted_edges:
        deficit = inst.cost[e] - sum((shares[(i, e)] for i in f.users(e)), Fraction(0))
        if deficit:
            out.append((e, deficit))
    return out


def check_enforceable(
    inst: Instance, f: SteinerForest, cap: int = DEFAULT_PATH_CAP, lexicographic: bool = True
) -> EnforceReport:
    """Solve LP(F) and compare its optimum with c(F).

    With ``lexicographic`` (the default) the returned shares maximise Player 2's
    total among all optima, which makes reports deterministic and reusable.
    """
    flp = build_lp(inst, f, cap)
    if lexicographic:
        sol = solve_lexicographic(flp.lp, flp.player_vector(2))
        optimum = sol.primary_objective
    else:
        sol = solve(flp.lp)
        optimum = sol.objective
    shares = flp.shares(sol.values)
    unpaid = unpaid_edges(inst, f, shares)
    return EnforceReport(optimum, f.cost, optimum == f.cost, shares, unpaid)


def shares_feasible(inst: Instance, f: SteinerForest, shares: CostShares, cap: int = DEFAULT_PATH_CAP) -> bool:
    flp = build_lp(inst, f, cap)
    extra = set(shares.values) - set(flp.index)
    if extra and any(shares.values[k] for k in extra):
        return False
    return is_feasible_point(flp.lp, flp.vector(shares))


# -- protocols ----------------------------------------------------------------

SUBSETS = (frozenset(), frozenset({1}), frozenset({2}), frozenset({1, 2}))


@dataclass
class SeparableProtocol:
    """Per-edge, per-user-set cost shares: table[(edge, users)][player]."""

    table: dict

    def share(self, eid, users: frozenset, player: int) -> Fraction:
        if player not in users:
            return Fraction(0)
        return self.table[(eid, frozenset(users))].get(player, Fraction(0))

    def is_budget_balanced(self, inst: Instance) -> bool:
        for (e, users), row in self.table.items():
            if any(v < 0 for v in row.values()) or set(row) - set(users):
                return False
            paid = sum(row.values(), Fraction(0))
            if paid != (inst.cost[e] if users else 0):
                return False
        return True

    def to_json(self) -> list:
        out = []
        for (e, users), row in sorted(self.table.items(), key=lambda kv: (natural_key(kv[0][0]), sorted(kv[0][1]))):
            out.append({"edge": e, "users": sorted(users), "shares": {str(i): str(v) for i, v in sorted(row.items())}})
        return out


def emit_protocol(
    inst: Instance, f: SteinerForest, shares: CostShares, edges: Iterable | None = None
) -> SeparableProtocol:
    """The protocol that makes F an equilibrium, given (BB)-satisfying shares.

    For edge e with S = S_e(P) and a user set S':
    S' == S pays the shares; otherwise the smallest player of S' minus S pays
    c(e) if S' is not a subset of S; if S' is a proper subset of S its
    smallest player pays c(e).
    """
    bad = unpaid_edges(inst, f, shares)
    if bad:
        raise NotBudgetBalanced(f"shares do not cover edges {[e for e, _ in bad]}")
    if any(v < 0 for v in shares.values.values()):
        raise InfeasibleShares("negative share")
    table = {}
    for e in inst.graph.edges if edges is None else (inst.graph.edge(x) for x in edges):
        eid = e.id
        s = f.users(eid)
        c = inst.cost[eid]
        for sub in SUBSETS:
            if not sub:
                table[(eid, sub)] = {}
            elif sub == s:
                table[(eid, sub)] = {i: shares[(i, eid)] for i in sub}
            else:
                outsiders = sub - s
                payer = min(outsiders) if outsiders else min(sub)
                table[(eid, sub)] = {i: (c if i == payer else Fraction(0)) for i in sub}
    return SeparableProtocol(table)


def shapley_protocol(inst: Instance) -> SeparableProtocol:
    """Equal split among the users of each edge."""
    table = {}
    for e in inst.graph.edges:
        for sub in SUBSETS:
            table[(e.id, sub)] = {i: inst.cost[e.id] / len(sub) for i in sub}
    return SeparableProtocol(table)


def player_cost(protocol: SeparableProtocol, paths: Mapping, player: int) -> Fraction:
    """What ``player`` pays in the profile ``paths`` ({player: Path})."""
    other = paths[3 - player].edge_set
    total = Fraction(0)
    for e in paths[player].edges:
        users = frozenset({player, 3 - player}) if e in other else frozenset({player})
        total += protocol.share(e, users, player)
    return total


def is_pne(inst: Instance, protocol: SeparableProtocol, p1: Path, p2: Path, cap: int = DEFAULT_PATH_CAP) -> bool:
    profile = {1: p1, 2: p2}
    for i in PLAYERS:
        current = player_cost(protocol, profile, i)
        for alt in inst.player_paths(i, cap):
            trial = dict(profile)
            trial[i] = alt
            if player_cost(protocol, trial, i) < current:
                return False
    return True


def verify_pne(inst: Instance, f: SteinerForest, protocol: SeparableProtocol, cap: int = DEFAULT_PATH_CAP) -> bool:
    """No player can strictly lower their payment by switching paths."""
    return is_pne(inst, protocol, f.p1, f.p2, cap)


def pure_nash_profiles(inst: Instance, protocol: SeparableProtocol, cap: int = DEFAULT_PATH_CAP) -> list:
    """Every pure equilibrium (P1, P2) over simple paths, with its total cost."""
    out = []
    for p1, p2 in product(inst.player_paths(1, cap), inst.player_paths(2, cap)):
        if is_pne(inst, protocol, p1, p2, cap):
            out.append((p1, p2, inst.cost_of(p1.edge_set | p2.edge_set)))
    return out
