"""CG tables, functionals, evaluation, lifting, and the catalog."""

import random
from fractions import Fraction as F

import pytest

from bellpoly.bell import BellFunctional, CgTable, catalog, cg_to_functional, \
    evaluate, lift_to_pair
from bellpoly.polytopes import enumerate_local_deterministic
from bellpoly.scenario import (
    Behavior,
    DimensionError,
    PartySubset,
    Scenario,
    SignalingError,
    convex_combination,
    deterministic_behavior,
    marginalize,
    pr_box,
    uniform_behavior,
)

CHSH_SCENARIO = Scenario((2, 2), (2, 2))
TRI222 = Scenario((2, 2, 2), (2, 2, 2))


def cg_value_oracle(table: CgTable, behavior: Behavior) -> F:
    """Direct CG arithmetic: marginals summed from the table, joints read off.

    Independent of cg_to_functional; marginals are taken at the other
    side's first input (equivalent for nonsignaling input).
    """
    total = F(0)
    for u in range(table.m):
        total += table.row_coeffs[u] * sum(behavior.at((u, 0), (0, y)) for y in (0, 1))
    for v in range(table.m):
        total += table.col_coeffs[v] * sum(behavior.at((0, v), (x, 0)) for x in (0, 1))
    for u in range(table.m):
        for v in range(table.m):
            total += table.body[u][v] * behavior.at((u, v), (0, 0))
    return total


def random_ns_behaviors(scenario, count, seed):
    """Rational mixtures of deterministic vertices (exact, nonsignaling)."""
    rng = random.Random(seed)
    vm = enumerate_local_deterministic(scenario)
    out = []
    for _ in range(count):
        k = rng.randrange(2, 5)
        picks = [rng.randrange(vm.count) for _ in range(k)]
        raw = [rng.randrange(1, 6) for _ in range(k)]
        total = sum(raw)
        out.append(convex_combination(
            [(F(w, total), vm.column(j)) for w, j in zip(raw, picks)]))
    return out


# ---------------------------------------------------------------------------
# Catalog fidelity
# ---------------------------------------------------------------------------

def test_catalog_names():
    assert set(catalog()) == {"CH", "I4422_11", "I4422_3"}


def test_catalog_ch_table():
    ch = catalog()["CH"]
    assert ch.row_coeffs == (F(-1), F(0))
    assert ch.col_coeffs == (F(-1), F(0))
    assert ch.body == ((F(1), F(1)), (F(1), F(-1)))
    assert ch.bound == 0


def test_catalog_i4422_11_table():
    t = catalog()["I4422_11"]
    assert t.row_coeffs == (F(-2), F(-1), F(-1), F(0))
    assert t.col_coeffs == (F(-2), F(-1), F(-1), F(0))
    assert t.body == (
        (F(1), F(1), F(1), F(2)),
        (F(1), F(0), F(2), F(-1)),
        (F(1), F(2), F(-1), F(-1)),
        (F(2), F(-1), F(-1), F(-1)),
    )
    assert t.body[0][3] == 2
    assert t.bound == 0


def test_catalog_i4422_3_table():
    t = catalog()["I4422_3"]
    assert t.row_coeffs == (F(-1), F(0), F(0), F(0))
    assert t.col_coeffs == (F(-2), F(-1), F(-1), F(0))
    assert t.body == (
        (F(1), F(1), F(1), F(1)),
        (F(0), F(1), F(0), F(-1)),
        (F(1), F(-1), F(1), F(-1)),
        (F(1), F(0), F(-1), F(0)),
    )
    assert t.bound == 0


def test_cg_table_shape_validation():
    with pytest.raises(DimensionError):
        CgTable("bad", (F(1),), (F(1), F(0)), ((F(0),),), F(0))


# ---------------------------------------------------------------------------
# cg_to_functional
# ---------------------------------------------------------------------------

def test_ch_on_uniform():
    ch = cg_to_functional(catalog()["CH"])
    assert evaluate(ch, uniform_behavior(CHSH_SCENARIO)) == F(-1, 2)


def test_i4422_11_on_uniform():
    f = cg_to_functional(catalog()["I4422_11"])
    assert evaluate(f, uniform_behavior(Scenario((4, 4), (2, 2)))) == F(-9, 4)


def test_i4422_3_on_all_first_outputs():
    f = cg_to_functional(catalog()["I4422_3"])
    s = Scenario((4, 4), (2, 2))
    b = deterministic_behavior(s, [(0, 0, 0, 0), (0, 0, 0, 0)])
    assert evaluate(f, b) == F(-1)


def test_functional_matches_cg_oracle_on_random_ns_behaviors():
    for name, table in catalog().items():
        f = cg_to_functional(table)
        for b in random_ns_behaviors(f.scenario, 8, seed=hash(name) % 10000):
            assert evaluate(f, b) == cg_value_oracle(table, b)


def test_functional_matches_cg_oracle_on_pr_box():
    ch = catalog()["CH"]
    assert cg_value_oracle(ch, pr_box()) == F(1, 2)
    assert evaluate(cg_to_functional(ch), pr_box()) == F(1, 2)


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def test_evaluate_rejects_scenario_mismatch():
    ch = cg_to_functional(catalog()["CH"])
    with pytest.raises(DimensionError):
        evaluate(ch, uniform_behavior(Scenario((4, 4), (2, 2))))


def test_evaluate_flags_signaling():
    ch = cg_to_functional(catalog()["CH"])
    p = [F(0)] * CHSH_SCENARIO.dim
    for u, v in CHSH_SCENARIO.all_inputs():
        p[CHSH_SCENARIO.index((u, v), (v, 0))] = F(1)
    with pytest.raises(SignalingError):
        evaluate(ch, Behavior(CHSH_SCENARIO, tuple(p)))


def test_evaluate_is_linear():
    ch = cg_to_functional(catalog()["CH"])
    b1, b2 = random_ns_behaviors(CHSH_SCENARIO, 2, seed=7)
    lam = F(2, 5)
    mixed = convex_combination([(lam, b1), (1 - lam, b2)])
    assert evaluate(ch, mixed) == lam * evaluate(ch, b1) + (1 - lam) * evaluate(ch, b2)


def test_ch_local_maximum_is_zero():
    ch = cg_to_functional(catalog()["CH"])
    vm = enumerate_local_deterministic(CHSH_SCENARIO)
    values = [evaluate(ch, vm.column(j)) for j in range(vm.count)]
    assert max(values) == 0


# ---------------------------------------------------------------------------
# lift_to_pair
# ---------------------------------------------------------------------------

def pr_with_uniform_spectator():
    box = pr_box()
    p = []
    for u in TRI222.all_inputs():
        for x in TRI222.all_outputs():
            p.append(box.at(u[:2], x[:2]) * F(1, 2))
    return Behavior(TRI222, tuple(p))


def test_lift_ch_on_pr_product():
    ch = cg_to_functional(catalog()["CH"])
    lifted = lift_to_pair(ch, TRI222, PartySubset((0, 1)))
    assert evaluate(lifted, pr_with_uniform_spectator()) == F(1, 2)


def test_lift_then_evaluate_equals_marginalize_then_evaluate():
    ch = cg_to_functional(catalog()["CH"])
    behaviors = random_ns_behaviors(TRI222, 100, seed=23)
    behaviors.append(pr_with_uniform_spectator())
    for pair in (PartySubset((0, 1)), PartySubset((0, 2)), PartySubset((1, 2))):
        lifted = lift_to_pair(ch, TRI222, pair)
        for b in behaviors:
            assert evaluate(lifted, b) == evaluate(ch, marginalize(b, pair))


def test_lift_on_swap_symmetric_behavior():
    # A behavior symmetric under exchanging parties 0 and 2 gives the
    # same value on the {0,2} lift of a symmetric functional regardless
    # of which end plays which role (canonical ascending order).
    ch = cg_to_functional(catalog()["CH"])
    b = uniform_behavior(TRI222)
    lifted = lift_to_pair(ch, TRI222, PartySubset((0, 2)))
    assert evaluate(lifted, b) == evaluate(ch, marginalize(b, PartySubset((0, 2))))


def test_lift_rejects_mismatched_pair():
    f = cg_to_functional(catalog()["I4422_11"])
    with pytest.raises(DimensionError):
        lift_to_pair(f, TRI222, PartySubset((0, 1)))


def test_functional_dimension_check():
    with pytest.raises(DimensionError):
        BellFunctional("bad", CHSH_SCENARIO, tuple(F(0) for _ in range(5)), F(0))
