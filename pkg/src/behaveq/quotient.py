"""Backward determinization, equivalence-respecting subautomata, the
membership witness relation, and the conditional-system quotient.

The automaton pipeline: backward-determinize an automaton, carve out
the family of subsets that cannot tell equivalent subset-states apart,
restrict the backward dynamics to that family (closure is checked, not
assumed), and verify that the membership relation x related-to W iff
x in W is a homomorphism from the automaton into the restriction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import BitRel, CapExceeded, Carrier, bits, subset_label
from .liftings import cts_rel_lift
from .systems import Cts, Nda

RESPECTING_CAP = 6


class ClosureViolation(ValueError):
    """The respecting family is not closed under the backward dynamics."""


@dataclass(frozen=True)
class BackwardDfa:
    """Reverse-image determinization over the full powerset.

    `trans[mask][a]` is the set of states with an a-step into `mask`;
    `accepting` is the designated output datum, the mask of accepting
    states of the source automaton.
    """

    base: Nda
    trans: tuple[tuple[int, ...], ...]
    accepting: int


def backward_determinize(nda: Nda, cap: int = 12) -> BackwardDfa:
    n = len(nda.states)
    if n > cap:
        raise CapExceeded(f"backward determinization over {n} states exceeds cap {cap}")
    num_actions = len(nda.alphabet)
    trans = tuple(
        tuple(nda.pre(mask, a) for a in range(num_actions))
        for mask in range(1 << n)
    )
    return BackwardDfa(nda, trans, nda.accepting)


def respecting_subsets(nda: Nda, eq: BitRel, cap: int = RESPECTING_CAP) -> tuple[int, ...]:
    """Subsets W that cannot separate eq-related subset-states.

    W qualifies iff for every related pair (U, V): U meets W exactly
    when V meets W.  Checked by brute force over all masks, hence the
    small cap.
    """
    n = len(nda.states)
    if n > cap:
        raise CapExceeded(f"respecting-subset search over {n} states exceeds cap {cap}")
    if eq.size != 1 << n:
        raise ValueError("equivalence must live on the full powerset carrier")
    if not eq.is_equivalence():
        raise ValueError("relation is not an equivalence")
    classes = eq.classes()
    out = []
    for w in range(1 << n):
        ok = True
        for cls in classes:
            meets = bool(cls[0] & w)
            if any(bool(u & w) != meets for u in cls[1:]):
                ok = False
                break
        if ok:
            out.append(w)
    return tuple(out)


@dataclass(frozen=True)
class RespectingAutomaton:
    """Backward dynamics restricted to the respecting family.

    `carrier` lists member masks ascending; `trans[i][a]` indexes into
    `carrier`; `accepting` is the designated member holding the
    accepting states.  The witness relation relates a source state x to
    every member containing it.
    """

    base: Nda
    carrier: tuple[int, ...]
    trans: tuple[tuple[int, ...], ...]
    accepting: int

    def pos(self, mask: int) -> int:
        return self.carrier.index(mask)

    def witness_sets(self, x: int) -> tuple[int, ...]:
        return tuple(w for w in self.carrier if w >> x & 1)

    def witness_image(self, mask: int) -> tuple[int, ...]:
        """Members met by a subset-state: the forgetful image of the witness."""
        return tuple(w for w in self.carrier if w & mask)

    def labels(self) -> tuple[str, ...]:
        return tuple(subset_label(self.base.states, w) for w in self.carrier)


def build_respecting_automaton(nda: Nda, eq: BitRel,
                               cap: int = RESPECTING_CAP) -> RespectingAutomaton:
    """Restrict the backward determinization to the respecting family.

    Closure under the backward transitions is verified; an escaping
    transition is an error naming the edge rather than a silent
    truncation.
    """
    carrier = respecting_subsets(nda, eq, cap)
    members = set(carrier)
    bdfa = backward_determinize(nda)
    names = nda.states
    if bdfa.accepting not in members:
        raise ClosureViolation(
            f"designated accepting member {subset_label(names, bdfa.accepting)} "
            "is outside the respecting family")
    trans = []
    for w in carrier:
        row = []
        for a in range(len(nda.alphabet)):
            target = bdfa.trans[w][a]
            if target not in members:
                raise ClosureViolation(
                    f"backward transition {subset_label(names, w)} "
                    f"--{nda.alphabet.label(a)}--> {subset_label(names, target)} "
                    "leaves the respecting family")
            row.append(target)
        trans.append(tuple(carrier.index(t) for t in row))
    return RespectingAutomaton(nda, carrier, tuple(trans), bdfa.accepting)


@dataclass(frozen=True)
class HomomorphismVerdict:
    ok: bool
    witness: str | None

    def __bool__(self) -> bool:
        return self.ok


def verify_witness_homomorphism(nda: Nda, auto: RespectingAutomaton) -> HomomorphismVerdict:
    """Check that the membership relation is a coalgebra homomorphism.

    Both composites are computed extensionally as relations from source
    states to one-step behaviours over the restricted carrier: stepping
    first and then witnessing must equal witnessing first and then
    running the restricted dynamics.  Returns the first differing pair
    on failure.
    """
    n = len(nda.states)
    num_actions = len(nda.alphabet)
    for x in range(n):
        lhs = set()
        if nda.accepting >> x & 1:
            lhs.add("stop")
        for a in range(num_actions):
            succ = nda.successors(x, a)
            for w in auto.carrier:
                if succ & w:
                    lhs.add((a, w))
        rhs = set()
        if auto.accepting >> x & 1:
            rhs.add("stop")
        for i, v in enumerate(auto.carrier):
            for a in range(num_actions):
                target = auto.carrier[auto.trans[i][a]]
                if target >> x & 1:
                    rhs.add((a, v))
        if lhs != rhs:
            diff = (lhs - rhs) | (rhs - lhs)
            sample = sorted(str(d) for d in diff)[0]
            return HomomorphismVerdict(
                False, f"state {nda.states.label(x)} differs at {sample}")
    return HomomorphismVerdict(True, None)


def redundant_members(auto: RespectingAutomaton) -> tuple[int, ...]:
    """Members expressible as unions of smaller members.

    These are the states a smallest equivalence-respecting subautomaton
    can drop; the empty set is the empty union and always redundant.
    """
    out = []
    for w in auto.carrier:
        union = 0
        for v in auto.carrier:
            if v != w and v & ~w == 0:
                union |= v
        if union == w:
            out.append(w)
    return tuple(out)


# ---------------------------------------------------------------- CTS side

@dataclass(frozen=True)
class CtsQuotientResult:
    """Quotient system plus the class map q over condition/state pairs.

    `class_of[k][x]` indexes the quotient state carrier.  The quotient
    dynamics do not depend on the condition input: each class steps to
    the classes of its members' successors under the class's own
    condition.
    """

    quotient: Cts
    class_of: tuple[tuple[int, ...], ...]


def cts_quotient(cts: Cts, rel, require_equivalence: bool = False) -> CtsQuotientResult:
    """Quotient a conditional system by a conditional bisimulation.

    `rel` must be a post-fixpoint of the bisimulation step; a violating
    triple is reported otherwise.  Unless `require_equivalence`, the
    least equivalence containing the induced pairs is taken first.
    Classwise consistency of the successor map is verified.
    """
    nk, n = len(cts.conditions), len(cts.states)
    for k, x, y in rel.triples():
        if not cts_rel_lift(rel, k, cts.delta[k][x], cts.delta[k][y]):
            raise ValueError(
                f"not a conditional bisimulation: triple "
                f"({cts.conditions.label(k)},{cts.states.label(x)},"
                f"{cts.states.label(y)}) fails the transfer condition")

    # Union-find over condition/state pairs; only same-condition pairs
    # ever merge because triples share their condition.
    parent = list(range(nk * n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    if require_equivalence:
        ids = {(k, x, x) for k in range(nk) for x in range(n)}
        triples = set(rel.triples())
        if not ids <= triples:
            raise ValueError("relation is not reflexive per condition")
        for k, x, y in triples:
            if (k, y, x) not in triples:
                raise ValueError("relation is not symmetric per condition")
        for k, x, y in triples:
            for k2, y2, z in triples:
                if k2 == k and y2 == y and (k, x, z) not in triples:
                    raise ValueError("relation is not transitive per condition")
    for k, x, y in rel.triples():
        union(k * n + x, k * n + y)

    roots = sorted({find(i) for i in range(nk * n)})
    root_pos = {r: c for c, r in enumerate(roots)}
    class_of = tuple(
        tuple(root_pos[find(k * n + x)] for x in range(n)) for k in range(nk)
    )

    members: dict[int, list[tuple[int, int]]] = {}
    for k in range(nk):
        for x in range(n):
            members.setdefault(class_of[k][x], []).append((k, x))

    def label(pairs: list[tuple[int, int]]) -> str:
        return "{" + ",".join(
            f"{cts.conditions.label(k)}:{cts.states.label(x)}"
            for k, x in sorted(pairs)) + "}"

    succ_class: list[int] = []
    for c in range(len(roots)):
        masks = set()
        for k, x in members[c]:
            mask = 0
            for y in bits(cts.delta[k][x]):
                mask |= 1 << class_of[k][y]
            masks.add(mask)
        if len(masks) != 1:
            k, x = members[c][0]
            raise ValueError(
                "quotient dynamics not classwise well-defined at class "
                f"{label(members[c])}")
        succ_class.append(masks.pop())

    quotient = Cts(
        conditions=cts.conditions,
        states=Carrier(tuple(label(members[c]) for c in range(len(roots)))),
        delta=tuple(tuple(succ_class) for _ in range(nk)),
    )
    return CtsQuotientResult(quotient, class_of)
