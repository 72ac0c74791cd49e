"""End-to-end checks on the pinned fixtures, small enough to run in seconds.

``costshare selftest`` prints one row per check. The randomized rows use
reduced sample sizes; the full-size runs live in the test suite.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import classes
from .badconfig import detect_bc, generate_witness, minimal_instance
from .enforce import (
    CostShares,
    check_enforceable,
    pure_nash_profiles,
    shapley_protocol,
    shares_feasible,
    verify_pne,
)
from .errors import CostShareError
from .forests import optimal_forests, price_of_stability
from .graph import DEFAULT_PATH_CAP, Instance
from .lp import LE, LinearProgram, solve, vertex_enumeration
from .patterns import PATTERN_IDS
from .transform import is_pushed_left, maximize_for_player2, no_change_feasible, push_left

WITNESS_OPT = {"BC1a": 22, "BC1b": 22, "BC3": 22}  # every other type: 26


@dataclass
class CheckRow:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


def check_fig1bc1(cap: int = DEFAULT_PATH_CAP) -> CheckRow:
    inst = classes.fig1bc1()
    cost, opts = optimal_forests(inst, cap)
    rep = check_enforceable(inst, opts[0], cap)
    reference = CostShares.for_forest(opts[0], classes.FIG1BC1_SHARES)
    ok = (
        cost == 22
        and len(opts) == 1
        and sorted(opts[0].edges) == sorted(classes.FIG1BC1_OPT)
        and rep.lp_optimum == 21
        and not rep.enforceable
        and shares_feasible(inst, opts[0], reference, cap)
        and reference.total(1) == 9
        and reference.total(2) == 12
    )
    return CheckRow("fig1bc1-opt-not-enforceable", ok, f"OPT={cost} count={len(opts)} LP={rep.lp_optimum}")


def check_pos_bound(cap: int = DEFAULT_PATH_CAP) -> CheckRow:
    details = []
    ok = True
    for x in (1, 2, 10):
        res = price_of_stability(classes.pos_lower_bound(x), cap)
        want = Fraction(15 * x + 8, 14 * x + 8)
        ties = [sorted(f.edges) for f in res.ties]
        ok &= res.pos == want and res.opt_cost == 14 * x + 8 and sorted(classes.POS_ENFORCEABLE) in ties
        details.append(f"x={x}:{res.pos}")
    return CheckRow("pos-lower-bound", ok, " ".join(details))


def check_witnesses(cap: int = DEFAULT_PATH_CAP) -> CheckRow:
    bad = []
    for pid in PATTERN_IDS:
        inst = minimal_instance(pid)
        want = WITNESS_OPT.get(pid, 26)
        cost, opts = optimal_forests(inst, cap)
        rep = check_enforceable(inst, opts[0], cap)
        if cost != want or len(opts) != 1 or rep.lp_optimum > want - 1 or rep.enforceable:
            bad.append(pid)
        elif price_of_stability(inst, cap).pos <= 1:
            bad.append(pid)
    return CheckRow("witness-tables", not bad, "failed: " + ",".join(bad) if bad else "9 types")


def check_fig1(cap: int = DEFAULT_PATH_CAP) -> CheckRow:
    eps = Fraction(1, 4)
    inst = classes.fig1_shapley(eps)
    cost, opts = optimal_forests(inst, cap)
    opt = opts[0]
    shapley = shapley_protocol(inst)
    pnes = pure_nash_profiles(inst, shapley, cap)
    xi = classes.fig1_protocol(eps)
    ok = (
        cost == 3 + 2 * eps
        and len(opts) == 1
        and not verify_pne(inst, opt, shapley, cap)
        and len(pnes) == 1
        and pnes[0][2] == 4 + eps
        and verify_pne(inst, opt, xi, cap)
        and xi.is_budget_balanced(inst)
        and check_enforceable(inst, opt, cap).enforceable
    )
    ratio = pnes[0][2] / cost if pnes else None
    return CheckRow("fig1-shapley-vs-protocol", ok, f"Shapley PNE ratio {ratio}")


def check_soundness(rng: random.Random, graphs: int = 6, costs: int = 5, cap: int = DEFAULT_PATH_CAP, search_cap=None) -> CheckRow:
    found = 0
    for _ in range(graphs):
        n = rng.randint(7, 9)
        g = classes.random_connected(n, rng.randint(2 * n, 3 * n - 2), rng)
        terms = classes.random_terminals(g, rng)
        res = detect_bc(g, terms, search_cap) if search_cap else detect_bc(g, terms)
        if res.embedding is not None:
            found += 1
            if price_of_stability(generate_witness(res.embedding, g), cap).pos <= 1:
                return CheckRow("bc-soundness", False, f"witness with pos 1 for {res.embedding.pattern}")
        else:
            for _ in range(costs):
                inst = Instance(g, terms, classes.random_costs(g, rng))
                if price_of_stability(inst, cap).pos != 1:
                    return CheckRow("bc-soundness", False, "no BC found but pos > 1")
    return CheckRow("bc-soundness", True, f"{graphs} graphs, {found} with a BC")


def check_small_graphs(rng: random.Random, samples: int = 40) -> CheckRow:
    for _ in range(samples):
        n = rng.randint(4, 6)
        g = classes.random_connected(n, rng.randint(n - 1, n * (n - 1) // 2), rng)
        res = detect_bc(g, classes.random_terminals(g, rng), use_prefilter=False)
        if res.embedding is not None:
            return CheckRow("small-graphs-none", False, f"BC on {n} vertices")
    return CheckRow("small-graphs-none", True, f"{samples} graphs, search without prefilters")


def check_classes(rng: random.Random) -> CheckRow:
    verdicts = set()
    for make in (classes.wheel, classes.fan):
        for n in range(3, 10):
            g = make(n)
            for _ in range(5):
                verdicts.add(classes.classify_efficiency(g, classes.random_terminals(g, rng)).verdict)
    for _ in range(5):
        g = classes.series_parallel(rng.randint(5, 12), rng)
        verdicts.add(classes.classify_efficiency(g, classes.random_terminals(g, rng)).verdict)
    fixtures_ok = all(
        classes.classify_efficiency(i.graph, i.terminals).detail == "BC1a"
        for i in (classes.bipartite_bc1a(), classes.planar_bc1a())
    )
    ok = verdicts == {classes.EFFICIENT} and fixtures_ok
    return CheckRow("class-properties", ok, f"verdicts {sorted(verdicts)}, fixtures BC1a={fixtures_ok}")


def check_transform(rng: random.Random, instances: int = 4, cap: int = DEFAULT_PATH_CAP) -> CheckRow:
    for _ in range(instances):
        g = classes.random_connected(6, rng.randint(7, 10), rng)
        inst = Instance(g, classes.random_terminals(g, rng), classes.random_costs(g, rng, top=5, den=1))
        f = optimal_forests(inst, cap)[1][0]
        base = check_enforceable(inst, f, cap).shares
        pl = push_left(inst, f, base, cap)
        if pl.total() != base.total() or push_left(inst, f, pl, cap) != pl or not is_pushed_left(inst, f, pl, cap)[0]:
            return CheckRow("transform-properties", False, "push_left property failed")
        try:
            res = maximize_for_player2(inst, f, cap)
        except CostShareError as exc:
            return CheckRow("transform-properties", False, str(exc))
        if not no_change_feasible(inst, f, res.shares, cap):
            return CheckRow("transform-properties", False, "a CHANGE step is still feasible")
    return CheckRow("transform-properties", True, f"{instances} instances")


def random_lp(rng: random.Random, n: int, m: int) -> LinearProgram:
    """Bounded random LP: random rows plus a box constraint on every variable."""
    lp = LinearProgram(n, [rng.randint(-3, 5) for _ in range(n)])
    for _ in range(m):
        lp.add([rng.randint(-2, 4) for _ in range(n)], LE, rng.randint(0, 8))
    for j in range(n):
        lp.add({j: 1}, LE, rng.randint(1, 6))
    return lp


def check_lp(rng: random.Random, count: int = 15) -> CheckRow:
    for _ in range(count):
        lp = random_lp(rng, rng.randint(2, 3), rng.randint(1, 3))
        sol = solve(lp)
        if not sol.optimal or sol.objective != vertex_enumeration(lp):
            return CheckRow("simplex-vs-vertex-enumeration", False, lp.dump())
    return CheckRow("simplex-vs-vertex-enumeration", True, f"{count} programs")


def run_selftest(seed: int = 0, path_cap: int = DEFAULT_PATH_CAP, search_cap=None) -> list:
    rng = random.Random(seed)
    return [
        check_fig1bc1(path_cap),
        check_pos_bound(path_cap),
        check_witnesses(path_cap),
        check_fig1(path_cap),
        check_soundness(rng, cap=path_cap, search_cap=search_cap),
        check_small_graphs(rng),
        check_classes(rng),
        check_transform(rng, cap=path_cap),
        check_lp(rng),
    ]
