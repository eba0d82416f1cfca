"""One-step distribution laws, modalities, relation liftings, and the
sampling law suite.

The concrete evaluators here are the executable forms used by the
equivalence engines and logics.  `check_lifting_laws` replays, on
randomly generated finite instances, every structural law the concrete
forms are supposed to satisfy (unit/multiplication squares for the
distribution laws, compatibility of the collected one-step table with
flattening, naturality, meet and equality preservation, and agreement
of each derived form with the generic pullback recipe).  Deliberate
corruptions can be injected by name; the suite must catch each one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import BitRel, Subspace, bits, echelonize, nullspace, preimage_subspace
from .rng import WEIGHT_GRID, Lcg, random_cts, random_lwa, random_nda
from .systems import (Cts, DeterminizedMachine, Lwa, forward_determinize,
                      lwa_output, lwa_step)


@dataclass(frozen=True)
class Step:
    """One-step behaviour: an action with a target payload, or a stop marker.

    Payload types vary with the context (a state index, a subset, a
    weight vector); only the shape is fixed here.
    """

    action: object
    target: object

    @classmethod
    def act(cls, action, target) -> "Step":
        return cls(action, target)

    @property
    def is_stop(self) -> bool:
        return self.action is None

    def __repr__(self):
        if self.is_stop:
            return "stop"
        return f"({self.action},{_show(self.target)})"


STOP = Step(None, None)


@dataclass(frozen=True)
class NdaStepTable:
    """Collected one-step view of a set of steps: per-action successor
    sets plus a termination flag."""

    succ: tuple[frozenset, ...]
    accept: bool


@dataclass(frozen=True)
class LwaStepTable:
    """Collected one-step view of a weighted step bag: per-action vectors
    plus an output weight."""

    slices: tuple[tuple[Fraction, ...], ...]
    weight: Fraction


def nda_dist_law(step: Step) -> frozenset[Step]:
    """Push a set-valued target out of one step: (a,U) to {a} x U."""
    if step.is_stop:
        return frozenset({STOP})
    return frozenset(Step.act(step.action, x) for x in step.target)


def nda_det_step(steps: Iterable[Step], num_actions: int) -> NdaStepTable:
    """Collect a set of steps into the deterministic one-step table."""
    succ = [set() for _ in range(num_actions)]
    accept = False
    for s in steps:
        if s.is_stop:
            accept = True
        else:
            succ[s.action].add(s.target)
    return NdaStepTable(tuple(frozenset(s) for s in succ), accept)


def lwa_dist_law(step: Step) -> dict[Step, Fraction]:
    """Weighted analogue of `nda_dist_law`; targets are weight vectors."""
    if step.is_stop:
        return {STOP: Fraction(1)}
    return {
        Step.act(step.action, x): Fraction(w)
        for x, w in enumerate(step.target) if w
    }


def lwa_det_step(bag: Mapping[Step, Fraction], num_states: int,
                 num_actions: int) -> LwaStepTable:
    """Collect a weighted bag of steps into per-action vectors and weight."""
    slices = [[Fraction(0)] * num_states for _ in range(num_actions)]
    weight = Fraction(0)
    for s, w in bag.items():
        if not w:
            continue
        if s.is_stop:
            weight += w
        else:
            slices[s.action][s.target] += w
    return LwaStepTable(tuple(tuple(row) for row in slices), weight)


def cts_dist_law(k: int, targets: frozenset) -> frozenset[tuple]:
    """Spread a condition over a successor set: (k,U) to {k} x U."""
    return frozenset((k, x) for x in targets)


def nda_modality(machine: DeterminizedMachine, kind, region: int = 0) -> int:
    """Machine-level modality on subset-state positions.

    kind "accept" selects the accepting positions; an action index a
    selects positions whose unique a-successor lies in `region` (a
    bitmask over positions).
    """
    if kind == "accept":
        return sum(1 << i for i, o in enumerate(machine.out) if o)
    if not isinstance(kind, int) or not (0 <= kind < len(machine.alphabet)):
        raise ValueError(f"unknown action {kind!r}")
    out = 0
    for i, row in enumerate(machine.trans):
        if region >> row[kind] & 1:
            out |= 1 << i
    return out


def cts_box(cts: Cts, region: int) -> int:
    """Box modality on condition/state pairs, index k*|X| + x.

    (k,x) is selected iff every k-successor of x is in `region` at k.
    """
    n = len(cts.states)
    out = 0
    for k in range(len(cts.conditions)):
        slice_k = (region >> (k * n)) & ((1 << n) - 1)
        for x in range(n):
            if cts.delta[k][x] & ~slice_k == 0:
                out |= 1 << (k * n + x)
    return out


def lwa_modality(lwa: Lwa, kind, p: Sequence, region=None) -> bool:
    """Weighted modality at a configuration vector.

    An action kind tests `region` (a Subspace or predicate callable) at
    the stepped vector; a rational kind tests the output weight.
    """
    if isinstance(kind, int) and 0 <= kind < len(lwa.alphabet):
        stepped = lwa_step(lwa, p, kind)
        if isinstance(region, Subspace):
            return region.contains(stepped)
        return bool(region(stepped))
    return lwa_output(lwa, p) == Fraction(kind)


def nda_rel_lift(rel: BitRel, ubar: Iterable[Step], ubar2: Iterable[Step],
                 num_actions: int) -> bool:
    """Relation lifting for automata steps over a powerset carrier.

    `rel` relates subset masks; step targets must be state indices.
    Related iff the stop markers agree and every action slice pair is
    related.
    """
    t1 = nda_det_step(ubar, num_actions)
    t2 = nda_det_step(ubar2, num_actions)
    if t1.accept != t2.accept:
        return False
    for a in range(num_actions):
        m1 = sum(1 << x for x in t1.succ[a])
        m2 = sum(1 << x for x in t2.succ[a])
        if not rel.has(m1, m2):
            return False
    return True


def cts_rel_lift(rel, k: int, u_mask: int, v_mask: int) -> bool:
    """Two-sided simulation condition at a fixed condition.

    `rel` is consulted through `(k, x, x') in rel`; masks are successor
    sets over the state carrier.
    """
    for x in bits(u_mask):
        if not any((k, x, x2) in rel for x2 in bits(v_mask)):
            return False
    for x2 in bits(v_mask):
        if not any((k, x, x2) in rel for x in bits(u_mask)):
            return False
    return True


# --------------------------------------------------------------------------
# Law suite
# --------------------------------------------------------------------------

_MAX_FAILURES = 4


def _show(value) -> str:
    """Deterministic rendering of nested sets/dicts/tuples for reports."""
    if isinstance(value, frozenset) or isinstance(value, set):
        return "{" + ",".join(sorted(_show(v) for v in value)) + "}"
    if isinstance(value, dict):
        items = sorted((_show(k), _show(v)) for k, v in value.items())
        return "{" + ",".join(f"{k}:{v}" for k, v in items) + "}"
    if isinstance(value, tuple):
        return "(" + ",".join(_show(v) for v in value) + ")"
    if isinstance(value, Subspace):
        return f"span{_show(value.basis)}"
    return repr(value)


@dataclass(frozen=True)
class LawResult:
    law: str
    trials: int
    failures: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"law": self.law, "trials": self.trials,
                "passed": self.passed, "failures": list(self.failures)}


@dataclass(frozen=True)
class LawReport:
    family: str
    seed: int
    corruption: str | None
    results: tuple[LawResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, law: str) -> LawResult:
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "seed": self.seed,
            "corruption": self.corruption,
            "all_passed": self.all_passed,
            "laws": [r.to_json() for r in self.results],
        }


class _Suite:
    """Collects per-law failures across sampled trials."""

    def __init__(self, laws: Sequence[str], trials: int):
        self.trials = trials
        self.failures: dict[str, list[dict]] = {law: [] for law in laws}

    def record(self, law: str, **ce):
        fails = self.failures[law]
        if len(fails) < _MAX_FAILURES:
            fails.append({k: _show(v) if not isinstance(v, str) else v
                          for k, v in ce.items()})

    def report(self, family: str, seed: int, corruption) -> LawReport:
        results = tuple(LawResult(law, self.trials, tuple(fails))
                        for law, fails in self.failures.items())
        return LawReport(family, seed, corruption, results)


# ---------------------------------------------------------------- NDA laws

def _powerset(items) -> list[frozenset]:
    items = list(items)
    return [frozenset(c) for r in range(len(items) + 1)
            for c in itertools.combinations(items, r)]


def _nda_kit(corruption: str | None) -> dict:
    kit = {
        "dist": nda_dist_law,
        "det": nda_det_step,
        "sigma_pred": _nda_sigma_pred,
        "lift_rel": _nda_lift_rel,
    }
    if corruption == "dist-law":
        def bad_dist(step):
            if step.is_stop:
                return frozenset()
            return nda_dist_law(step)
        kit["dist"] = bad_dist
    elif corruption == "det-step":
        def bad_det(steps, num_actions):
            steps = frozenset(steps)
            table = nda_det_step(steps, num_actions)
            return NdaStepTable(table.succ, STOP in steps and len(steps) == 1)
        kit["det"] = bad_det
    elif corruption == "sigma":
        def bad_sigma(carrier_size, num_actions, kind, region):
            if carrier_size % 2 == 1 and kind != "stop":
                kind = "stop"
            return _nda_sigma_pred(carrier_size, num_actions, kind, region)
        kit["sigma_pred"] = bad_sigma
    elif corruption == "lift":
        def bad_lift(rel_pairs, ubar, ubar2, num_actions):
            t1 = nda_det_step(ubar, num_actions)
            t2 = nda_det_step(ubar2, num_actions)
            return all((t1.succ[a], t2.succ[a]) in rel_pairs
                       for a in range(num_actions))
        kit["lift_rel"] = bad_lift
    elif corruption == "meet":
        def or_lift(rel_pairs, ubar, ubar2, num_actions):
            t1 = nda_det_step(ubar, num_actions)
            t2 = nda_det_step(ubar2, num_actions)
            if t1.accept != t2.accept:
                return False
            return any((t1.succ[a], t2.succ[a]) in rel_pairs
                       for a in range(num_actions))
        kit["lift_rel"] = or_lift
    elif corruption is not None:
        raise ValueError(f"unknown corruption {corruption!r} for nda")
    return kit


def _nda_sigma_pred(carrier_size: int, num_actions: int, kind,
                    region: frozenset) -> frozenset:
    """Predicate lifting at the deterministic-branching level.

    Elements of the lifted carrier are (successor table, flag) pairs
    over an abstract carrier 0..carrier_size-1.
    """
    out = []
    for p in itertools.product(range(carrier_size), repeat=num_actions):
        for b in (False, True):
            if kind == "stop":
                ok = b
            else:
                ok = p[kind] in region
            if ok:
                out.append((p, b))
    return frozenset(out)


def _nda_lift_rel(rel_pairs, ubar, ubar2, num_actions) -> bool:
    """Derived relation lifting with the relation as a set of pairs of
    target sets."""
    t1 = nda_det_step(ubar, num_actions)
    t2 = nda_det_step(ubar2, num_actions)
    if t1.accept != t2.accept:
        return False
    return all((t1.succ[a], t2.succ[a]) in rel_pairs for a in range(num_actions))


def _nda_lift_pred(ubar: frozenset[Step], kind, region: frozenset,
                   num_actions: int) -> bool:
    """Derived predicate lifting: slice membership, or the stop marker."""
    table = nda_det_step(ubar, num_actions)
    if kind == "stop":
        return table.accept
    return table.succ[kind] in region


def _random_subset(rng: Lcg, items: Sequence) -> frozenset:
    return frozenset(x for x in items if rng.bit())


def _check_nda_laws(suite: _Suite, rng: Lcg, kit: dict) -> None:
    dist, det = kit["dist"], kit["det"]
    sigma_pred, lift_rel = kit["sigma_pred"], kit["lift_rel"]

    nx = rng.randint(1, 4)
    m = rng.randint(1, 2)
    X = range(nx)
    fx = [STOP] + [Step.act(a, x) for a in range(m) for x in X]
    masks = _powerset(X)

    # Unit square of the distribution law, pointwise over F X.
    for e in fx:
        wrapped = STOP if e.is_stop else Step.act(e.action, frozenset({e.target}))
        got = dist(wrapped)
        if got != frozenset({e}):
            suite.record("kleisli-unit", element=e, lhs=got, rhs=frozenset({e}))

    # Multiplication square, sampled over F T T X.
    for e in [STOP] + [Step.act(rng.randint(0, m - 1),
                               frozenset(_random_subset(rng, masks)))
                       for _ in range(3)]:
        if e.is_stop:
            flat = STOP
        else:
            flat = Step.act(e.action, frozenset(x for u in e.target for x in u))
        lhs = dist(flat)
        inner = dist(e) if e.is_stop else frozenset(
            Step.act(e.action, u) for u in e.target)
        rhs = frozenset(x for s in inner for x in dist(s))
        if lhs != rhs:
            suite.record("kleisli-mult", element=e, lhs=lhs, rhs=rhs)

    # Compatibility of the collected table with union-flattening,
    # sampled over T F T X.
    ftx = [STOP] + [Step.act(a, u) for a in range(m) for u in masks]
    for _ in range(3):
        w = _random_subset(rng, ftx)
        flat = frozenset(x for s in w for x in dist(s))
        lhs = det(flat, m)
        nested = det(w, m)
        rhs = NdaStepTable(
            tuple(frozenset(x for u in nested.succ[a] for x in u)
                  for a in range(m)),
            nested.accept)
        if lhs != rhs:
            suite.record("gamma-theta-mu", element=w, lhs=lhs, rhs=rhs)

    # Naturality of the branching-level predicate lifting along functions.
    ny = rng.randint(1, 3)
    nx2 = rng.randint(1, 3)
    f = tuple(rng.randint(0, ny - 1) for _ in range(nx2))
    region = _random_subset(rng, range(ny))
    pullback = frozenset(x for x in range(nx2) if f[x] in region)
    for kind in list(range(m)) + ["stop"]:
        lhs = sigma_pred(nx2, m, kind, pullback)
        upper = sigma_pred(ny, m, kind, region)
        rhs = frozenset(
            (p, b)
            for p in itertools.product(range(nx2), repeat=m)
            for b in (False, True)
            if (tuple(f[i] for i in p), b) in upper)
        if lhs != rhs:
            suite.record("pred-sigma-naturality", fn=f, kind=kind,
                         region=region, lhs=lhs, rhs=rhs)

    # Naturality of the composed predicate lifting along one-to-many maps.
    small_nx, small_ny = rng.randint(1, 2), rng.randint(1, 2)
    g = tuple(_random_subset(rng, range(small_ny)) for _ in range(small_nx))
    fy = [STOP] + [Step.act(a, y) for a in range(m) for y in range(small_ny)]
    fx2 = [STOP] + [Step.act(a, x) for a in range(m) for x in range(small_nx)]
    big_region = frozenset(_random_subset(rng, _powerset(range(small_ny)))
                           for _ in range(3))

    def g_hat(u: frozenset) -> frozenset:
        return frozenset(y for x in u for y in g[x])

    def step_image(ubar: frozenset) -> frozenset:
        out = set()
        for s in ubar:
            if s.is_stop:
                out.add(STOP)
            else:
                out.update(Step.act(s.action, y) for y in g[s.target])
        return frozenset(out)

    pulled = frozenset(u for u in _powerset(range(small_nx))
                       if g_hat(u) in big_region)
    for kind in list(range(m)) + ["stop"]:
        for ubar in map(frozenset, itertools.chain.from_iterable(
                itertools.combinations(fx2, r) for r in range(len(fx2) + 1))):
            lhs = _nda_lift_pred(ubar, kind, pulled, m)
            rhs = _nda_lift_pred(step_image(ubar), kind, big_region, m)
            if lhs != rhs:
                suite.record("pred-lift-naturality", map=g, kind=kind,
                             steps=ubar, lhs=lhs, rhs=rhs)

    # Naturality of the composed relation lifting along one-to-many maps.
    rel = frozenset((u, v) for u in _powerset(range(small_ny))
                    for v in _powerset(range(small_ny)) if rng.bit())
    rel_pulled = frozenset((u, v) for u in _powerset(range(small_nx))
                           for v in _powerset(range(small_nx))
                           if (g_hat(u), g_hat(v)) in rel)
    sub_fx = _powerset(fx2)
    pair_samples = ([(u, v) for u in sub_fx for v in sub_fx]
                    if len(sub_fx) <= 32 else
                    [(rng.choice(sub_fx), rng.choice(sub_fx)) for _ in range(200)])
    for u, v in pair_samples:
        lhs = lift_rel(rel_pulled, u, v, m)
        rhs = lift_rel(rel, step_image(u), step_image(v), m)
        if lhs != rhs:
            suite.record("rel-lift-naturality", map=g, pair=(u, v),
                         lhs=lhs, rhs=rhs)

    # Derived forms agree with the generic pullback recipe.
    region_sets = frozenset(_random_subset(rng, masks) for _ in range(3))
    sub_all = _powerset(fx)
    for kind in list(range(m)) + ["stop"]:
        for ubar in sub_all:
            table = det(ubar, m)
            recipe = table.accept if kind == "stop" else table.succ[kind] in region_sets
            derived = _nda_lift_pred(ubar, kind, region_sets, m)
            if recipe != derived:
                suite.record("pred-recipe-agreement", kind=kind, steps=ubar,
                             lhs=derived, rhs=recipe)

    rel2 = frozenset((u, v) for u in masks for v in masks if rng.bit())
    pair_samples = ([(u, v) for u in sub_all for v in sub_all]
                    if len(sub_all) <= 32 else
                    [(rng.choice(sub_all), rng.choice(sub_all)) for _ in range(200)])
    for u, v in pair_samples:
        t1, t2 = det(u, m), det(v, m)
        recipe = t1.accept == t2.accept and all(
            (t1.succ[a], t2.succ[a]) in rel2 for a in range(m))
        derived = lift_rel(rel2, u, v, m)
        if recipe != derived:
            suite.record("rel-recipe-agreement", pair=(u, v),
                         lhs=derived, rhs=recipe)

    # Machine-level modality agrees with pulling the lifting back along
    # the dynamics.
    nda = random_nda(rng, max_states=3, max_actions=2)
    n, na = len(nda.states), len(nda.alphabet)
    machine = forward_determinize(nda, range(1 << n))
    position_region = sum(1 << i for i in range(len(machine.subset_states))
                          if rng.bit())
    region_masks = frozenset(
        frozenset(bits(machine.subset_states[i]))
        for i in bits(position_region))
    for kind in list(range(na)) + ["accept"]:
        got = nda_modality(machine, kind, position_region)
        for i, mask in enumerate(machine.subset_states):
            ubar = set()
            if mask & nda.accepting:
                ubar.add(STOP)
            for x in bits(mask):
                for a, x2 in nda.delta[x]:
                    ubar.add(Step.act(a, x2))
            want = _nda_lift_pred(
                frozenset(ubar), "stop" if kind == "accept" else kind,
                region_masks, na)
            if bool(got >> i & 1) != want:
                suite.record("modality-recipe-agreement", kind=kind,
                             state=machine.label(i), lhs=bool(got >> i & 1),
                             rhs=want)

    # Meet preservation of the relation lifting (two actions needed to
    # tell conjunction from disjunction).
    m2 = 2
    fx3 = [STOP] + [Step.act(a, x) for a in range(m2) for x in range(2)]
    masks2 = _powerset(range(2))
    r1 = frozenset((u, v) for u in masks2 for v in masks2 if rng.bit())
    r2 = frozenset((u, v) for u in masks2 for v in masks2 if rng.bit())
    sub3 = _powerset(fx3)
    for u, v in [(a, b) for a in sub3 for b in sub3]:
        meet = lift_rel(r1 & r2, u, v, m2)
        both = lift_rel(r1, u, v, m2) and lift_rel(r2, u, v, m2)
        if meet != both:
            suite.record("intersection-preservation", pair=(u, v),
                         lhs=meet, rhs=both)

    # Lifting the identity relation yields the identity.
    diag = frozenset((u, u) for u in masks2)
    for u, v in [(a, b) for a in sub3 for b in sub3]:
        related = lift_rel(diag, u, v, m2)
        if related != (u == v):
            suite.record("equality-preservation", pair=(u, v),
                         lhs=related, rhs=u == v)


_NDA_LAWS = (
    "kleisli-unit", "kleisli-mult", "gamma-theta-mu",
    "pred-sigma-naturality", "pred-lift-naturality", "rel-lift-naturality",
    "pred-recipe-agreement", "rel-recipe-agreement",
    "modality-recipe-agreement",
    "intersection-preservation", "equality-preservation",
)


# ---------------------------------------------------------------- LWA laws

def _bag_norm(bag: Mapping) -> dict:
    return {k: v for k, v in bag.items() if v}


def _bag_eq(a: Mapping, b: Mapping) -> bool:
    return _bag_norm(a) == _bag_norm(b)


def _fx_index(num_states: int, num_actions: int):
    """Coordinates for vectors over steps: (a,x) blocks then the stop slot."""
    def index(step: Step) -> int:
        if step.is_stop:
            return num_actions * num_states
        return step.action * num_states + step.target
    return index, num_actions * num_states + 1


def _lwa_lift_rel_subspace(space: Subspace, num_states: int,
                           num_actions: int) -> Subspace:
    """Lift a difference subspace through the weighted relation lifting.

    Result lives over step coordinates: stop weight zero and every
    action slice inside `space`.
    """
    index, dim = _fx_index(num_states, num_actions)
    rows = []
    stop_row = [Fraction(0)] * dim
    stop_row[index(STOP)] = Fraction(1)
    rows.append(stop_row)
    tests = nullspace(space.basis, space.dim).basis
    for a in range(num_actions):
        for z in tests:
            row = [Fraction(0)] * dim
            for x in range(num_states):
                row[index(Step.act(a, x))] = z[x]
            rows.append(row)
    return nullspace(rows, dim)


def _lwa_kit(corruption: str | None) -> dict:
    kit = {
        "dist": lwa_dist_law,
        "det": lwa_det_step,
        "sigma_pred": _lwa_sigma_pred,
        "lift_subspace": _lwa_lift_rel_subspace,
    }
    if corruption == "dist-law":
        def bad_dist(step):
            if step.is_stop:
                return {STOP: Fraction(1)}
            return {k: 2 * v for k, v in lwa_dist_law(step).items()}
        kit["dist"] = bad_dist
    elif corruption == "det-step":
        def bad_det(bag, num_states, num_actions):
            table = lwa_det_step(bag, num_states, num_actions)
            support = len(_bag_norm(bag))
            return LwaStepTable(table.slices,
                                table.weight if support == 1 else Fraction(0))
        kit["det"] = bad_det
    elif corruption == "sigma":
        def bad_sigma(carrier_size, num_actions, kind, region, element):
            if carrier_size % 2 == 1 and not isinstance(kind, Fraction):
                kind = Fraction(0)
            return _lwa_sigma_pred(carrier_size, num_actions, kind, region, element)
        kit["sigma_pred"] = bad_sigma
    elif corruption == "lift":
        def bad_lift(space, num_states, num_actions):
            good = _lwa_lift_rel_subspace(space, num_states, num_actions)
            index, dim = _fx_index(num_states, num_actions)
            stop = [Fraction(0)] * dim
            stop[index(STOP)] = Fraction(1)
            return echelonize(list(good.basis) + [stop], dim)
        kit["lift_subspace"] = bad_lift
    elif corruption is not None:
        raise ValueError(f"unknown corruption {corruption!r} for lwa")
    return kit


def _lwa_sigma_pred(carrier_size, num_actions, kind, region, element) -> bool:
    """Membership test for the weighted branching-level lifting.

    `element` is a (successor table, weight) pair over an abstract
    carrier; `region` is a subset for action kinds and unused for
    weight kinds.
    """
    p, s = element
    if isinstance(kind, Fraction):
        return s == kind
    return p[kind] in region


def _bag_apply_matrix(bag: Mapping[Step, Fraction], matrix, num_states_out,
                      num_actions) -> dict:
    """Push a step bag through a state matrix (stop weight untouched)."""
    out: dict[Step, Fraction] = {}
    for step, w in bag.items():
        if not w:
            continue
        if step.is_stop:
            out[STOP] = out.get(STOP, Fraction(0)) + w
        else:
            for y in range(num_states_out):
                c = matrix[step.target][y]
                if c:
                    key = Step.act(step.action, y)
                    out[key] = out.get(key, Fraction(0)) + w * c
    return _bag_norm(out)


def _check_lwa_laws(suite: _Suite, rng: Lcg, kit: dict) -> None:
    from .rng import random_vector

    dist, det = kit["dist"], kit["det"]
    sigma_pred, lift_subspace = kit["sigma_pred"], kit["lift_subspace"]

    n = rng.randint(1, 3)
    m = rng.randint(1, 2)

    # Unit square, pointwise over F X.
    for e in [STOP] + [Step.act(a, x) for a in range(m) for x in range(n)]:
        if e.is_stop:
            wrapped = STOP
        else:
            unit = tuple(Fraction(int(i == e.target)) for i in range(n))
            wrapped = Step.act(e.action, unit)
        got = _bag_norm(dist(wrapped))
        if got != {e: Fraction(1)}:
            suite.record("kleisli-unit", element=e, lhs=got, rhs={e: 1})

    # Multiplication square on sampled nested bags.
    for _ in range(3):
        support = [random_vector(rng, n) for _ in range(2)]
        weights = [rng.choice(WEIGHT_GRID) for _ in support]
        a = rng.randint(0, m - 1)
        flat = tuple(sum(w * v[i] for v, w in zip(support, weights))
                     for i in range(n))
        lhs = _bag_norm(dist(Step.act(a, flat)))
        rhs: dict[Step, Fraction] = {}
        for v, w in zip(support, weights):
            if not w:
                continue
            for step, c in dist(Step.act(a, v)).items():
                rhs[step] = rhs.get(step, Fraction(0)) + w * c
        if not _bag_eq(lhs, rhs):
            suite.record("kleisli-mult", action=a, vectors=tuple(support),
                         lhs=lhs, rhs=rhs)

    # Compatibility of the collected table with bag flattening.
    for _ in range(3):
        w_bag: dict[Step, Fraction] = {}
        for _ in range(rng.randint(1, 3)):
            if rng.bit():
                key = STOP
            else:
                key = Step.act(rng.randint(0, m - 1), random_vector(rng, n))
            weight = rng.choice(WEIGHT_GRID)
            w_bag[key] = w_bag.get(key, Fraction(0)) + weight
        w_bag = _bag_norm(w_bag)
        flat: dict[Step, Fraction] = {}
        for step, weight in w_bag.items():
            for inner, c in dist(step).items():
                flat[inner] = flat.get(inner, Fraction(0)) + weight * c
        lhs = det(flat, n, m)
        slices = []
        for a in range(m):
            vec = [Fraction(0)] * n
            for step, weight in w_bag.items():
                if not step.is_stop and step.action == a:
                    for i in range(n):
                        vec[i] += weight * step.target[i]
            slices.append(tuple(vec))
        rhs = LwaStepTable(tuple(slices),
                           w_bag.get(STOP, Fraction(0)))
        if lhs != rhs:
            suite.record("gamma-theta-mu", bag=w_bag, lhs=lhs, rhs=rhs)

    # Naturality of the branching-level lifting along functions,
    # pointwise on table elements with grid weights.
    ny, nx2 = rng.randint(1, 3), rng.randint(1, 3)
    f = tuple(rng.randint(0, ny - 1) for _ in range(nx2))
    region = _random_subset(rng, range(ny))
    pulled = frozenset(x for x in range(nx2) if f[x] in region)
    kinds = list(range(m)) + [Fraction(1), Fraction(0)]
    for kind in kinds:
        for p in itertools.product(range(nx2), repeat=m):
            for s in (Fraction(0), Fraction(1), Fraction(1, 2)):
                lhs = sigma_pred(nx2, m, kind, pulled, (p, s))
                fp = tuple(f[i] for i in p)
                rhs = sigma_pred(ny, m, kind, region, (fp, s))
                if lhs != rhs:
                    suite.record("pred-sigma-naturality", fn=f, kind=kind,
                                 element=(p, s), lhs=lhs, rhs=rhs)

    # Naturality of the composed predicate lifting, with subspace
    # regions, pointwise on sampled bags.
    ky = rng.randint(1, 3)
    gmat = tuple(random_vector(rng, ky) for _ in range(n))
    w_space = echelonize([random_vector(rng, ky)
                          for _ in range(rng.randint(0, ky))], ky)
    pulled_space = preimage_subspace(gmat, w_space)
    for _ in range(4):
        bag = _bag_norm({
            (STOP if rng.bit() else Step.act(rng.randint(0, m - 1),
                                             rng.randint(0, n - 1))):
            rng.choice(WEIGHT_GRID)
            for _ in range(rng.randint(1, 4))})
        table_x = lwa_det_step(bag, n, m)
        image = _bag_apply_matrix(bag, gmat, ky, m)
        table_y = lwa_det_step(image, ky, m)
        for a in range(m):
            lhs = pulled_space.contains(table_x.slices[a])
            rhs = w_space.contains(table_y.slices[a])
            if lhs != rhs:
                suite.record("pred-lift-naturality", matrix=gmat, action=a,
                             bag=bag, lhs=lhs, rhs=rhs)
        if (table_x.weight == Fraction(1)) != (table_y.weight == Fraction(1)):
            suite.record("pred-lift-naturality", matrix=gmat, kind="weight",
                         bag=bag, lhs=table_x.weight, rhs=table_y.weight)

    # Naturality of the relation lifting, exact on difference subspaces.
    index_y, dim_fy = _fx_index(ky, m)
    index_x, dim_fx = _fx_index(n, m)
    step_matrix = [[Fraction(0)] * dim_fy for _ in range(dim_fx)]
    step_matrix[index_x(STOP)][index_y(STOP)] = Fraction(1)
    for a in range(m):
        for x in range(n):
            for y in range(ky):
                step_matrix[index_x(Step.act(a, x))][index_y(Step.act(a, y))] = gmat[x][y]
    lhs_space = lift_subspace(pulled_space, n, m)
    rhs_space = preimage_subspace(step_matrix, lift_subspace(w_space, ky, m))
    if lhs_space != rhs_space:
        suite.record("rel-lift-naturality", matrix=gmat,
                     lhs=lhs_space, rhs=rhs_space)

    # Lifting the zero difference space (equality) yields equality.
    zero = echelonize([], n)
    lifted = lift_subspace(zero, n, m)
    if not lifted.is_zero():
        suite.record("equality-preservation", lhs=lifted, rhs=zero)

    # Machine-level modality agrees with the collected-table route.
    lwa = random_lwa(rng, max_states=3, max_actions=2)
    ln, lm = len(lwa.states), len(lwa.alphabet)
    space = echelonize([random_vector(rng, ln)
                        for _ in range(rng.randint(0, ln))], ln)
    for _ in range(3):
        p = random_vector(rng, ln)
        bag: dict[Step, Fraction] = {}
        for x in range(ln):
            if not p[x]:
                continue
            if lwa.out[x]:
                bag[STOP] = bag.get(STOP, Fraction(0)) + p[x] * lwa.out[x]
            for a in range(lm):
                for x2 in range(ln):
                    c = lwa.mat[a][x][x2]
                    if c:
                        key = Step.act(a, x2)
                        bag[key] = bag.get(key, Fraction(0)) + p[x] * c
        table = det(bag, ln, lm)
        for a in range(lm):
            direct = lwa_modality(lwa, a, p, space)
            via_table = space.contains(table.slices[a])
            if direct != via_table:
                suite.record("modality-recipe-agreement", action=a, vector=p,
                             lhs=direct, rhs=via_table)
        s = lwa_output(lwa, p)
        if not lwa_modality(lwa, s, p) or table.weight != s:
            suite.record("modality-recipe-agreement", kind="weight", vector=p,
                         lhs=s, rhs=table.weight)


_LWA_LAWS = (
    "kleisli-unit", "kleisli-mult", "gamma-theta-mu",
    "pred-sigma-naturality", "pred-lift-naturality", "rel-lift-naturality",
    "modality-recipe-agreement", "equality-preservation",
)


# ---------------------------------------------------------------- CTS laws

def _cts_kit(corruption: str | None) -> dict:
    kit = {
        "dist": cts_dist_law,
        "sigma_pred": _cts_sigma_pred,
        "lift_rel": _cts_lift_rel_sets,
        "box": _cts_box_sets,
    }
    if corruption == "dist-law":
        def bad_dist(k, targets):
            full = cts_dist_law(k, targets)
            if full:
                return full - {min(full)}
            return full
        kit["dist"] = bad_dist
    elif corruption == "sigma":
        def bad_sigma(carrier, region):
            if len(carrier) % 2 == 1:
                return frozenset(v for v in _powerset(carrier) if v & region)
            return _cts_sigma_pred(carrier, region)
        kit["sigma_pred"] = bad_sigma
    elif corruption == "lift":
        def one_sided(rel, k, u, v):
            return all(any((k, x, x2) in rel for x2 in v) for x in u)
        kit["lift_rel"] = one_sided
    elif corruption == "meet":
        def exists_box(succ, region):
            return bool(succ & region) or not succ and False
        kit["box"] = exists_box
    elif corruption is not None:
        raise ValueError(f"unknown corruption {corruption!r} for cts")
    return kit


def _cts_sigma_pred(carrier: Sequence, region: frozenset) -> frozenset:
    """Subset-level box lifting: all subsets of the region."""
    return frozenset(v for v in _powerset(carrier) if v <= region)


def _cts_lift_rel_sets(rel, k, u: frozenset, v: frozenset) -> bool:
    return (all(any((k, x, x2) in rel for x2 in v) for x in u)
            and all(any((k, x, x2) in rel for x in u) for x2 in v))


def _cts_box_sets(succ: frozenset, region: frozenset) -> bool:
    return succ <= region


def _check_cts_laws(suite: _Suite, rng: Lcg, kit: dict) -> None:
    dist, sigma_pred = kit["dist"], kit["sigma_pred"]
    lift_rel, box = kit["lift_rel"], kit["box"]

    nk = rng.randint(1, 3)
    n = rng.randint(1, 3)
    K, X = range(nk), range(n)
    subsets = _powerset(X)

    # Counit: spreading then dropping the condition is the identity.
    for k in K:
        for u in subsets:
            spread = dist(k, u)
            projected = frozenset(x for _, x in spread)
            if projected != u:
                suite.record("cokleisli-counit", condition=k, targets=u,
                             lhs=projected, rhs=u)

    # Comultiplication: duplicating the condition before or after
    # spreading agrees.
    for k in K:
        for u in subsets:
            lhs = frozenset((kk, (kk, x)) for kk, x in dist(k, u))
            inner = dist(k, u)
            rhs = frozenset((k, pair) for pair in inner)
            if lhs != rhs:
                suite.record("cokleisli-comult", condition=k, targets=u,
                             lhs=lhs, rhs=rhs)

    # Naturality of the subset-level box lifting along functions.
    ny = rng.randint(1, 3)
    f = tuple(rng.randint(0, ny - 1) for _ in range(n))
    region = _random_subset(rng, range(ny))
    pulled = frozenset(x for x in X if f[x] in region)
    lhs = sigma_pred(tuple(X), pulled)
    upper = sigma_pred(tuple(range(ny)), region)
    rhs = frozenset(u for u in subsets
                    if frozenset(f[x] for x in u) in upper)
    if lhs != rhs:
        suite.record("pred-sigma-naturality", fn=f, region=region,
                     lhs=lhs, rhs=rhs)

    # Naturality of the composed predicate lifting along condition-aware maps.
    g = {(k, x): rng.randint(0, ny - 1) for k in K for x in X}
    big_region = frozenset((k, y) for k in K for y in range(ny) if rng.bit())
    pulled_kx = frozenset((k, x) for k in K for x in X
                          if (k, g[(k, x)]) in big_region)
    for k in K:
        for u in subsets:
            lhs = dist(k, u) <= pulled_kx
            image = frozenset(g[(k, x)] for x in u)
            rhs = dist(k, image) <= big_region
            if lhs != rhs:
                suite.record("pred-lift-naturality", condition=k, targets=u,
                             lhs=lhs, rhs=rhs)

    # Naturality of the relation lifting along condition-aware maps.
    rel = frozenset((k, x, x2) for k in K for x in range(ny) for x2 in range(ny)
                    if rng.bit())
    rel_pulled = frozenset((k, x, x2) for k in K for x in X for x2 in X
                           if (k, g[(k, x)], g[(k, x2)]) in rel)
    for k in K:
        for u in subsets:
            for v in subsets:
                lhs = lift_rel(rel_pulled, k, u, v)
                iu = frozenset(g[(k, x)] for x in u)
                iv = frozenset(g[(k, x)] for x in v)
                rhs = lift_rel(rel, k, iu, iv)
                if lhs != rhs:
                    suite.record("rel-lift-naturality", condition=k,
                                 pair=(u, v), lhs=lhs, rhs=rhs)

    # Derived predicate lifting agrees with the spread-then-test recipe.
    pred = frozenset((k, x) for k in K for x in X if rng.bit())
    for k in K:
        for u in subsets:
            derived = all((k, x) in pred for x in u)
            recipe = dist(k, u) <= pred
            if derived != recipe:
                suite.record("pred-recipe-agreement", condition=k, targets=u,
                             lhs=derived, rhs=recipe)

    # Derived relation lifting agrees with the full pullback recipe.
    rel3 = frozenset((k, x, x2) for k in K for x in X for x2 in X if rng.bit())
    pairs = frozenset(((k, x), (k, x2)) for k, x, x2 in rel3)

    def sim(su: frozenset, sv: frozenset) -> bool:
        return (all(any((p, q) in pairs for q in sv) for p in su)
                and all(any((p, q) in pairs for p in su) for q in sv))

    for k in K:
        for u in subsets:
            for v in subsets:
                derived = lift_rel(rel3, k, u, v)
                recipe = sim(dist(k, u), dist(k, v))
                if derived != recipe:
                    suite.record("rel-recipe-agreement", condition=k,
                                 pair=(u, v), lhs=derived, rhs=recipe)

    # Machine-level box agrees with pulling back along the dynamics.
    cts = random_cts(rng, max_conditions=3, max_states=4)
    ck, cn = len(cts.conditions), len(cts.states)
    region_mask = rng.randint(0, (1 << (ck * cn)) - 1)
    got = cts_box(cts, region_mask)
    for k in range(ck):
        slice_k = frozenset(x for x in range(cn)
                            if region_mask >> (k * cn + x) & 1)
        for x in range(cn):
            succ = frozenset(bits(cts.delta[k][x]))
            want = box(succ, slice_k)
            if bool(got >> (k * cn + x) & 1) != want:
                suite.record("modality-recipe-agreement", condition=k, state=x,
                             lhs=bool(got >> (k * cn + x) & 1), rhs=want)

    # Box preserves meets.
    for _ in range(3):
        r1 = _random_subset(rng, X)
        r2 = _random_subset(rng, X)
        for u in subsets:
            meet = box(u, r1 & r2)
            both = box(u, r1) and box(u, r2)
            if meet != both:
                suite.record("box-meet-preservation", succ=u,
                             regions=(r1, r2), lhs=meet, rhs=both)

    # Lifting per-condition equality yields per-condition equality.
    diag = frozenset((k, x, x) for k in K for x in X)
    for k in K:
        for u in subsets:
            for v in subsets:
                related = lift_rel(diag, k, u, v)
                if related != (u == v):
                    suite.record("equality-preservation", condition=k,
                                 pair=(u, v), lhs=related, rhs=u == v)


_CTS_LAWS = (
    "cokleisli-counit", "cokleisli-comult",
    "pred-sigma-naturality", "pred-lift-naturality", "rel-lift-naturality",
    "pred-recipe-agreement", "rel-recipe-agreement",
    "modality-recipe-agreement",
    "box-meet-preservation", "equality-preservation",
)


_FAMILIES = {
    "nda": (_NDA_LAWS, _nda_kit, _check_nda_laws),
    "lwa": (_LWA_LAWS, _lwa_kit, _check_lwa_laws),
    "cts": (_CTS_LAWS, _cts_kit, _check_cts_laws),
}

CORRUPTIONS = {
    "nda": {"dist-law": "kleisli-unit",
            "det-step": "gamma-theta-mu",
            "sigma": "pred-sigma-naturality",
            "lift": "equality-preservation",
            "meet": "intersection-preservation"},
    "lwa": {"dist-law": "kleisli-unit",
            "det-step": "gamma-theta-mu",
            "sigma": "pred-sigma-naturality",
            "lift": "equality-preservation"},
    "cts": {"dist-law": "cokleisli-counit",
            "sigma": "pred-sigma-naturality",
            "lift": "equality-preservation",
            "meet": "box-meet-preservation"},
}


def check_lifting_laws(family: str, trials: int = 100, seed: int = 0,
                       corruption: str | None = None) -> LawReport:
    """Run the law suite for one family on `trials` random instances.

    Each trial draws fresh carriers and maps from an independent stream
    derived from `seed`, then checks every law pointwise on that
    instance.  A named `corruption` swaps in a deliberately broken map;
    `CORRUPTIONS[family]` says which law each one must trip.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    try:
        laws, make_kit, run = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    kit = make_kit(corruption)
    suite = _Suite(laws, trials)
    master = Lcg(seed)
    for i in range(trials):
        run(suite, master.spawn(i), kit)
    return suite.report(family, seed, corruption)
