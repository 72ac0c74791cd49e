from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import random_instance, small_instances
from costshare import classes
from costshare.enforce import (
    CostShares,
    build_lp,
    check_enforceable,
    emit_protocol,
    player_cost,
    pure_nash_profiles,
    shapley_protocol,
    shares_feasible,
    verify_pne,
)
from costshare.errors import NotBudgetBalanced
from costshare.forests import enumerate_forests, forest_from_edges, optimal_forests

EPS = Fraction(1, 4)


def deviation_ok(inst, f, shares) -> bool:
    """Direct check of every deviation inequality, without the LP object."""
    for i in (1, 2):
        own = f.path(i)
        for alt in inst.player_paths(i):
            paid = sum((shares[(i, e)] for e in own.edges if e not in alt.edge_set), Fraction(0))
            if paid > inst.cost_of(e for e in alt.edges if e not in own.edge_set):
                return False
    return True


# -- the fig1bc1 instance -------------------------------------------------------------


def test_fig1bc1_lp_optimum_is_21():
    inst = classes.fig1bc1()
    f = optimal_forests(inst)[1][0]
    rep = check_enforceable(inst, f)
    assert rep.lp_optimum == 21
    assert rep.forest_cost == 22
    assert not rep.enforceable
    assert sum(d for _, d in rep.unpaid_edges) == 1


def test_fig1bc1_reference_shares_are_optimal():
    inst = classes.fig1bc1()
    f = forest_from_edges(inst, classes.FIG1BC1_OPT)
    shares = CostShares.for_forest(f, classes.FIG1BC1_SHARES)
    assert shares.total(1) == 9
    assert shares.total(2) == 12
    assert shares_feasible(inst, f, shares)
    assert deviation_ok(inst, f, shares)
    assert shares.total() == check_enforceable(inst, f).lp_optimum


def test_fig1bc1_lp_shares_cannot_form_a_protocol():
    inst = classes.fig1bc1()
    f = optimal_forests(inst)[1][0]
    with pytest.raises(NotBudgetBalanced):
        emit_protocol(inst, f, check_enforceable(inst, f).shares)


def test_lp_has_one_row_per_edge_and_alternative():
    inst = classes.fig1bc1()
    f = optimal_forests(inst)[1][0]
    flp = build_lp(inst, f)
    alternatives = len(inst.player_paths(1)) + len(inst.player_paths(2)) - 2
    assert len(flp.lp.constraints) == len(f.edges) + alternatives
    assert len(flp.variables) == len(f.p1.edges) + len(f.p2.edges)


# -- the Shapley example --------------------------------------------------------------


def test_shapley_opt_is_not_an_equilibrium():
    inst = classes.fig1_shapley(EPS)
    cost, opts = optimal_forests(inst)
    assert cost == 3 + 2 * EPS
    assert len(opts) == 1
    proto = shapley_protocol(inst)
    assert proto.is_budget_balanced(inst)
    assert not verify_pne(inst, opts[0], proto)
    # Player 1 pays 1 + (1 + 2 eps) on the optimum, more than the direct 2 + eps
    assert player_cost(proto, {1: opts[0].p1, 2: opts[0].p2}, 1) == 2 + 2 * EPS


def test_shapley_unique_equilibrium_cost():
    inst = classes.fig1_shapley(EPS)
    pnes = pure_nash_profiles(inst, shapley_protocol(inst))
    assert len(pnes) == 1
    p1, p2, cost = pnes[0]
    assert p1.edges == ("s-t1",) and p2.edges == ("s-t2",)
    assert cost == 4 + EPS
    assert cost / (3 + 2 * EPS) == Fraction(17, 14)


def test_fixture_protocol_makes_opt_an_equilibrium():
    inst = classes.fig1_shapley(EPS)
    f = optimal_forests(inst)[1][0]
    proto = classes.fig1_protocol(EPS)
    assert proto.is_budget_balanced(inst)
    assert verify_pne(inst, f, proto)
    assert check_enforceable(inst, f).enforceable


# -- protocols from LP shares --------------------------------------------------------


@given(small_instances(max_n=6))
@settings(max_examples=40, deadline=None)
def test_emitted_protocol_is_an_equilibrium(inst):
    for f in enumerate_forests(inst)[:4]:
        rep = check_enforceable(inst, f)
        assert deviation_ok(inst, f, rep.shares)
        if rep.enforceable:
            proto = emit_protocol(inst, f, rep.shares)
            assert proto.is_budget_balanced(inst)
            assert verify_pne(inst, f, proto)
        else:
            assert rep.lp_optimum < f.cost
            assert rep.unpaid_edges


def test_equilibrium_of_any_protocol_gives_feasible_lp_shares():
    """Read the shares of a PNE under Shapley back as LP(F) shares."""
    rng = random.Random(11)
    checked = 0
    for _ in range(30):
        inst = random_instance(rng, 5, rng.randint(5, 8))
        proto = shapley_protocol(inst)
        for p1, p2, _ in pure_nash_profiles(inst, proto):
            f = next((f for f in enumerate_forests(inst) if f.p1 == p1 and f.p2 == p2), None)
            if f is None:
                continue  # the union of the two paths has a cycle
            shares = CostShares.for_forest(
                f, {(i, e): proto.share(e, f.users(e), i) for i in (1, 2) for e in f.path(i).edges}
            )
            assert shares_feasible(inst, f, shares)
            assert check_enforceable(inst, f).enforceable
            checked += 1
    assert checked > 0


def test_lexicographic_shares_maximise_player2():
    inst = classes.fig1bc1()
    f = optimal_forests(inst)[1][0]
    lex = check_enforceable(inst, f)
    plain = check_enforceable(inst, f, lexicographic=False)
    assert lex.lp_optimum == plain.lp_optimum
    assert lex.shares.total(2) >= plain.shares.total(2)
    assert lex.shares.total(2) == 12


def test_report_json_uses_fraction_strings():
    inst = classes.fig1_shapley(EPS)
    f = optimal_forests(inst)[1][0]
    doc = check_enforceable(inst, f).to_json()
    assert doc["lp_optimum"] == "7/2"
    assert doc["enforceable"] is True
    assert all(isinstance(s["share"], str) for s in doc["shares"])
