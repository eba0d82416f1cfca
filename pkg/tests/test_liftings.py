from fractions import Fraction

import pytest

from behaveq import (
    BitRel,
    Carrier,
    Cts,
    Lwa,
    STOP,
    Step,
    check_lifting_laws,
    cts_box,
    cts_dist_law,
    cts_rel_lift,
    forward_determinize,
    lwa_det_step,
    lwa_modality,
    nda_det_step,
    nda_dist_law,
    nda_modality,
    nda_rel_lift,
)
from behaveq.liftings import CORRUPTIONS
from behaveq.rng import Lcg, random_cts

from conftest import mask_of


# -------------------------------------------------------- one-step maps

def test_nda_dist_law_cases():
    assert nda_dist_law(Step.act(0, frozenset())) == frozenset()
    assert nda_dist_law(STOP) == frozenset({STOP})
    got = nda_dist_law(Step.act(0, frozenset({1, 2})))
    assert got == frozenset({Step.act(0, 1), Step.act(0, 2)})


def test_nda_det_step_cases():
    empty = nda_det_step(frozenset(), 2)
    assert empty.succ == (frozenset(), frozenset()) and not empty.accept
    stop_only = nda_det_step({STOP}, 2)
    assert stop_only.accept and stop_only.succ == (frozenset(), frozenset())
    mixed = nda_det_step({Step.act(0, 1), Step.act(1, 1), STOP}, 2)
    assert mixed.succ == (frozenset({1}), frozenset({1})) and mixed.accept


def test_lwa_det_step_cases():
    zero = lwa_det_step({}, 2, 1)
    assert zero.weight == 0 and zero.slices == ((Fraction(0), Fraction(0)),)
    stop3 = lwa_det_step({STOP: Fraction(3)}, 2, 1)
    assert stop3.weight == 3 and stop3.slices == ((Fraction(0), Fraction(0)),)
    half = lwa_det_step({Step.act(0, 1): Fraction(1, 2)}, 2, 2)
    assert half.weight == 0
    assert half.slices[0] == (Fraction(0), Fraction(1, 2))
    assert half.slices[1] == (Fraction(0), Fraction(0))


def test_cts_dist_law_cases():
    assert cts_dist_law(0, frozenset()) == frozenset()
    assert cts_dist_law(1, frozenset({2})) == frozenset({(1, 2)})
    full = cts_dist_law(0, frozenset({0, 1, 2}))
    assert len(full) == 3 and all(k == 0 for k, _ in full)


# ------------------------------------------------------------ modalities

def test_nda_modality_accept_is_z_membership(golden_nda):
    machine = forward_determinize(golden_nda, range(8))
    z = golden_nda.states.index("z")
    got = nda_modality(machine, "accept")
    for i, mask in enumerate(machine.subset_states):
        assert bool(got >> i & 1) == bool(mask >> z & 1)


def test_nda_modality_vacuous_region(golden_nda):
    machine = forward_determinize(golden_nda, range(8))
    everything = (1 << len(machine.subset_states)) - 1
    a = golden_nda.alphabet.index("a")
    assert nda_modality(machine, a, everything) == everything


def test_nda_modality_after_a_terminates(golden_nda):
    machine = forward_determinize(golden_nda, range(8))
    a = golden_nda.alphabet.index("a")
    accepting = nda_modality(machine, "accept")
    box_a = nda_modality(machine, a, accepting)
    xy = machine.pos(mask_of(golden_nda.states, "x", "y"))
    assert box_a >> xy & 1
    with pytest.raises(ValueError):
        nda_modality(machine, 5, accepting)


def test_cts_box_cases():
    # u -k-> v, v childless, single condition
    cts = Cts(Carrier(("k",)), Carrier(("u", "v")), ((0b10, 0b00),))
    full = 0b11
    assert cts_box(cts, full) == full
    # empty region selects exactly the childless states
    assert cts_box(cts, 0) == 0b10
    # region = {(k,v)}: u qualifies (its successor is v), v qualifies (childless)
    assert cts_box(cts, 0b10) == 0b11


def test_cts_box_monotone_and_meet_preserving():
    rng = Lcg(8)
    for _ in range(20):
        cts = random_cts(rng, max_conditions=3, max_states=4)
        total = len(cts.conditions) * len(cts.states)
        u = rng.randint(0, (1 << total) - 1)
        v = rng.randint(0, (1 << total) - 1)
        assert cts_box(cts, u & v) == cts_box(cts, u) & cts_box(cts, v)
        if u & ~v == 0:
            assert cts_box(cts, u) & ~cts_box(cts, v) == 0


def test_lwa_modality_cases():
    lwa = Lwa(Carrier(("x", "y")), Carrier(("a",)),
              (Fraction(0), Fraction(3)),
              (((Fraction(0), Fraction(2)), (Fraction(0), Fraction(0))),))
    assert lwa_modality(lwa, Fraction(0), (0, 0))
    assert lwa_modality(lwa, Fraction(3), (0, 1))
    # stepping x under a gives weight 6
    assert lwa_modality(lwa, 0, (1, 0),
                        lambda v: v == (Fraction(0), Fraction(2)))
    from behaveq import lwa_output
    assert lwa_modality(lwa, 0, (1, 0), lambda v: lwa_output(lwa, v) == 6)


# ------------------------------------------------------ relation liftings

def test_nda_rel_lift_cases():
    rel = BitRel.identity(4)  # equality on subsets of a 2-state carrier
    steps = frozenset({Step.act(0, 0), STOP})
    assert nda_rel_lift(rel, steps, steps, 1)
    assert not nda_rel_lift(BitRel.full(4), frozenset({STOP}), frozenset(), 1)
    no_stop1 = frozenset({Step.act(0, 0)})
    no_stop2 = frozenset({Step.act(0, 1)})
    assert nda_rel_lift(BitRel.full(4), no_stop1, no_stop2, 1)


def test_cts_rel_lift_cases():
    rel = {(0, 0, 1)}
    assert cts_rel_lift(rel, 0, 0, 0)
    assert not cts_rel_lift(rel, 0, 0b01, 0)
    assert cts_rel_lift(rel, 0, 0b01, 0b10)


def test_cts_rel_lift_single_condition_is_classic_lifting():
    # with one condition the lifting is the standard two-sided
    # simulation condition on plain successor sets
    rng = Lcg(17)
    for _ in range(30):
        n = rng.randint(1, 4)
        rel = {(0, x, y) for x in range(n) for y in range(n) if rng.bit()}
        u = rng.randint(0, (1 << n) - 1)
        v = rng.randint(0, (1 << n) - 1)
        classic = (
            all(any((0, x, y) in rel for y in range(n) if v >> y & 1)
                for x in range(n) if u >> x & 1)
            and all(any((0, x, y) in rel for x in range(n) if u >> x & 1)
                    for y in range(n) if v >> y & 1))
        assert cts_rel_lift(rel, 0, u, v) == classic


# -------------------------------------------------------------- law suite

def test_law_suite_all_pass_small():
    for family in ("nda", "lwa", "cts"):
        report = check_lifting_laws(family, trials=25, seed=7)
        assert report.all_passed, [r.law for r in report.results if not r.passed]


def test_law_suite_rejects_bad_args():
    with pytest.raises(ValueError):
        check_lifting_laws("nda", trials=0)
    with pytest.raises(ValueError):
        check_lifting_laws("unknown")
    with pytest.raises(ValueError):
        check_lifting_laws("nda", corruption="nonsense")


def test_law_suite_catches_each_corruption():
    for family, table in CORRUPTIONS.items():
        for corruption, law in table.items():
            report = check_lifting_laws(family, trials=25, seed=7,
                                        corruption=corruption)
            assert not report.result(law).passed, (family, corruption, law)
            assert report.result(law).failures


def test_law_report_serializes():
    report = check_lifting_laws("nda", trials=5, seed=1)
    data = report.to_json()
    assert data["family"] == "nda"
    assert data["all_passed"] is True
    assert {entry["law"] for entry in data["laws"]} == {
        r.law for r in report.results}
