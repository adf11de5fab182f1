"""Scenarios, behaviors, validation, nonsignaling, marginalization."""

import itertools
from fractions import Fraction as F

import pytest

from bellpoly.scenario import (
    Behavior,
    DimensionError,
    InvalidBehaviorError,
    PartySubset,
    Scenario,
    SignalingError,
    check_nonsignaling,
    convex_combination,
    deterministic_behavior,
    marginalize,
    pr_box,
    uniform_behavior,
    validate,
)

CHSH_SCENARIO = Scenario((2, 2), (2, 2))
TRI222 = Scenario((2, 2, 2), (2, 2, 2))


# ---------------------------------------------------------------------------
# Scenario structure and indexing
# ---------------------------------------------------------------------------

def test_scenario_dimensions():
    assert CHSH_SCENARIO.dim == 16
    assert Scenario((4, 4), (2, 2)).dim == 64
    assert Scenario((4, 4, 4), (2, 2, 2)).dim == 512
    assert Scenario((3,), (2,)).dim == 6


@pytest.mark.parametrize("inputs,outputs", [((0,), (2,)), ((2,), (1,)), ((2, 2), (2,)), ((), ())])
def test_scenario_rejects_bad_shapes(inputs, outputs):
    with pytest.raises(DimensionError):
        Scenario(inputs, outputs)


def test_index_convention_inputs_major():
    s = Scenario((2, 3), (2, 2))
    # index = flat(u) * 4 + flat(x), party 0 most significant in both
    assert s.index((0, 0), (0, 0)) == 0
    assert s.index((0, 0), (0, 1)) == 1
    assert s.index((0, 0), (1, 0)) == 2
    assert s.index((0, 1), (0, 0)) == 4
    assert s.index((1, 0), (0, 0)) == 3 * 4
    assert s.index((1, 2), (1, 1)) == (1 * 3 + 2) * 4 + 3


def test_index_round_trip():
    s = Scenario((2, 3), (3, 2))
    seen = set()
    for u in s.all_inputs():
        for x in s.all_outputs():
            i = s.index(u, x)
            seen.add(i)
            flat_u, flat_x = divmod(i, s.joint_outputs)
            assert s.input_from_flat(flat_u) == u
            assert s.output_from_flat(flat_x) == x
    assert seen == set(range(s.dim))


def test_index_rejects_out_of_range():
    with pytest.raises(DimensionError):
        CHSH_SCENARIO.index((0, 2), (0, 0))
    with pytest.raises(DimensionError):
        CHSH_SCENARIO.index((0,), (0, 0))


def test_party_subset_validation():
    PartySubset((0, 2))
    with pytest.raises(DimensionError):
        PartySubset((2, 0))
    with pytest.raises(DimensionError):
        PartySubset((1, 1))
    with pytest.raises(DimensionError):
        PartySubset(())
    with pytest.raises(DimensionError):
        PartySubset((0, 2)).validate_for(CHSH_SCENARIO)


def test_restrict():
    s = Scenario((2, 3, 4), (2, 2, 3))
    assert s.restrict(PartySubset((0, 2))) == Scenario((2, 4), (2, 3))


# ---------------------------------------------------------------------------
# Behavior construction and validation
# ---------------------------------------------------------------------------

def test_behavior_dimension_mismatch_is_structural():
    with pytest.raises(DimensionError):
        Behavior(CHSH_SCENARIO, tuple(F(0) for _ in range(15)))


def test_behavior_rejects_floats():
    with pytest.raises(TypeError):
        Behavior(Scenario((1,), (2,)), (0.5, 0.5))


def test_uniform_validates():
    for s in (CHSH_SCENARIO, TRI222, Scenario((3, 2), (2, 4))):
        assert validate(uniform_behavior(s)).ok


def test_negative_entry_reported_with_index():
    p = list(uniform_behavior(CHSH_SCENARIO).p)
    p[5] = F(-1, 4)
    p[4] = F(3, 4)  # keep the block normalized
    report = validate(Behavior(CHSH_SCENARIO, tuple(p)))
    assert not report.ok
    assert report.negative_entries == ((5, F(-1, 4)),)
    assert report.unnormalized_inputs == ()


def test_unnormalized_block_names_the_input():
    p = list(uniform_behavior(CHSH_SCENARIO).p)
    for k in range(4):
        p[1 * 4 + k] = F(3, 8)  # block of joint input (0, 1) sums to 3/2
    report = validate(Behavior(CHSH_SCENARIO, tuple(p)))
    assert not report.ok
    assert report.unnormalized_inputs == (((0, 1), F(3, 2)),)


# ---------------------------------------------------------------------------
# Nonsignaling
# ---------------------------------------------------------------------------

def brute_force_bipartite_ns(behavior) -> bool:
    """Independent check of the defining marginal equalities, bipartite case."""
    s = behavior.scenario
    (ma, mb), (oa, ob) = s.inputs, s.outputs
    for x in range(oa):
        for u in range(ma):
            totals = {
                v: sum(behavior.at((u, v), (x, y)) for y in range(ob))
                for v in range(mb)
            }
            if len(set(totals.values())) > 1:
                return False
    for y in range(ob):
        for v in range(mb):
            totals = {
                u: sum(behavior.at((u, v), (x, y)) for x in range(oa))
                for u in range(ma)
            }
            if len(set(totals.values())) > 1:
                return False
    return True


def test_product_behaviors_are_nonsignaling():
    b = deterministic_behavior(TRI222, [(0, 1), (1, 1), (0, 0)])
    assert check_nonsignaling(b).ok


def test_pr_box_is_nonsignaling():
    box = pr_box()
    assert brute_force_bipartite_ns(box)
    assert check_nonsignaling(box).ok


def test_ns_check_agrees_with_brute_force_on_random_tables():
    # Deterministically seeded random probability tables: most of them
    # signal, a few do not; the two checks must always agree.
    import random
    rng = random.Random(1789)
    s = CHSH_SCENARIO
    for _ in range(40):
        p = []
        for _u in range(s.joint_inputs):
            cuts = sorted(rng.randrange(0, 9) for _ in range(s.joint_outputs - 1))
            block = []
            prev = 0
            for c in cuts:
                block.append(F(c - prev, 8))
                prev = c
            block.append(F(8 - prev, 8))
            p.extend(block)
        b = Behavior(s, tuple(p))
        assert check_nonsignaling(b).ok == brute_force_bipartite_ns(b)


def test_signaling_behavior_names_a_violated_equality():
    # Party 0 outputs party 1's input: blatantly signaling.
    p = [F(0)] * CHSH_SCENARIO.dim
    for u, v in CHSH_SCENARIO.all_inputs():
        p[CHSH_SCENARIO.index((u, v), (v, 0))] = F(1)
    b = Behavior(CHSH_SCENARIO, tuple(p))
    report = check_nonsignaling(b)
    assert not report.ok
    first = report.violations[0]
    assert first.equality.subset == (0,)
    assert first.lhs != first.rhs


# ---------------------------------------------------------------------------
# Marginalization
# ---------------------------------------------------------------------------

def test_marginal_of_deterministic_product():
    b = deterministic_behavior(TRI222, [(0, 1), (1, 0), (1, 1)])
    marg = marginalize(b, PartySubset((0, 2)))
    expected = deterministic_behavior(Scenario((2, 2), (2, 2)), [(0, 1), (1, 1)])
    assert marg == expected


def test_marginal_of_uniform_is_uniform():
    marg = marginalize(uniform_behavior(TRI222), PartySubset((1,)))
    assert marg == uniform_behavior(Scenario((2,), (2,)))


def test_marginalize_independent_of_dropped_input_choice():
    # Recompute the marginal with every fixing of the dropped inputs; all
    # must agree on nonsignaling behaviors.
    box = pr_box()
    third = deterministic_behavior(Scenario((2,), (2,)), [(0, 1)])
    s3 = TRI222
    p = []
    for u in s3.all_inputs():
        for x in s3.all_outputs():
            p.append(box.at(u[:2], x[:2]) * third.at(u[2:], x[2:]))
    b = Behavior(s3, tuple(p))
    assert check_nonsignaling(b).ok
    subset = PartySubset((0, 1))
    marg = marginalize(b, subset)
    for w in range(2):
        manual = []
        for u, v in marg.scenario.all_inputs():
            for x, y in marg.scenario.all_outputs():
                manual.append(sum(b.at((u, v, w), (x, y, z)) for z in range(2)))
        assert tuple(manual) == marg.p
    assert marg == box


def test_marginalize_composes_on_nested_subsets():
    b = convex_combination([
        (F(1, 3), deterministic_behavior(TRI222, [(0, 1), (1, 0), (0, 0)])),
        (F(2, 3), uniform_behavior(TRI222)),
    ])
    outer = PartySubset((0, 2))
    inner = PartySubset((1,))
    assert marginalize(marginalize(b, outer), inner) == marginalize(b, outer.compose(inner))


def test_marginal_of_valid_ns_behavior_validates():
    b = convex_combination([
        (F(1, 2), deterministic_behavior(TRI222, [(1, 1), (0, 0), (1, 0)])),
        (F(1, 2), uniform_behavior(TRI222)),
    ])
    marg = marginalize(b, PartySubset((0, 1)))
    assert validate(marg).ok
    assert check_nonsignaling(marg).ok


def test_marginalize_refuses_signaling():
    p = [F(0)] * CHSH_SCENARIO.dim
    for u, v in CHSH_SCENARIO.all_inputs():
        p[CHSH_SCENARIO.index((u, v), (v, 0))] = F(1)
    b = Behavior(CHSH_SCENARIO, tuple(p))
    with pytest.raises(SignalingError) as err:
        marginalize(b, PartySubset((0,)))
    assert "NS subset=" in str(err.value)


def test_marginalize_refuses_invalid():
    p = list(uniform_behavior(CHSH_SCENARIO).p)
    p[0] = F(-1, 4)
    p[1] = F(3, 4)
    with pytest.raises(InvalidBehaviorError):
        marginalize(Behavior(CHSH_SCENARIO, tuple(p)), PartySubset((0,)))


def test_convex_combination_checks_weights():
    u = uniform_behavior(CHSH_SCENARIO)
    with pytest.raises(ValueError):
        convex_combination([(F(1, 2), u), (F(1, 3), u)])
    with pytest.raises(ValueError):
        convex_combination([(F(3, 2), u), (F(-1, 2), u)])
