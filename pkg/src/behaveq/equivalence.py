"""Behavioural-equivalence engines for the four families.

Each engine computes a greatest fixpoint on a finite relation lattice;
each is paired with an independent brute-force oracle (product search,
word tables, partition refinement) that the test suite replays against
it.  Relations on weighted configuration spaces are represented as
difference subspaces: p related to q iff p - q lies in the subspace.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    BitRel,
    CapExceeded,
    DimensionMismatch,
    Semilattice,
    Subspace,
    bits,
    dot,
    echelonize,
    gfp,
    mat_vec,
    nullspace,
    orthogonal_tests,
    subspace_contains,
)
from .liftings import cts_rel_lift
from .systems import (
    Cts,
    DeterminizedMachine,
    Lwa,
    Nda,
    OutputLts,
    forward_determinize,
    lwa_output,
    lwa_step,
    moore_determinize,
)


@dataclass(frozen=True)
class MachineEquiv:
    """Greatest bisimulation on a determinized machine.

    `relation` is over machine positions; `related` answers queries by
    subset mask.
    """

    machine: DeterminizedMachine
    relation: BitRel
    iterations: int

    def related(self, mask_u: int, mask_v: int) -> bool:
        return self.relation.has(self.machine.pos(mask_u), self.machine.pos(mask_v))

    def classes(self) -> tuple[tuple[str, ...], ...]:
        return tuple(
            tuple(self.machine.label(i) for i in cls)
            for cls in self.relation.classes()
        )


def machine_equiv(machine: DeterminizedMachine) -> MachineEquiv:
    """gfp of: outputs agree and every action successor pair stays related."""
    size = len(machine.subset_states)
    num_actions = len(machine.alphabet)

    def step(rel: BitRel) -> BitRel:
        rows = []
        for i in range(size):
            row = 0
            for j in range(size):
                if machine.out[i] != machine.out[j]:
                    continue
                if all(rel.has(machine.trans[i][a], machine.trans[j][a])
                       for a in range(num_actions)):
                    row |= 1 << j
            rows.append(row)
        return BitRel(size, tuple(rows))

    result = gfp(step, BitRel.full(size))
    return MachineEquiv(machine, result.relation, result.iterations)


def nda_language_equiv(nda: Nda, initials: Iterable[int] | None = None,
                       cap: int = 12) -> MachineEquiv:
    """Language equivalence between subset states, restricted to the part
    reachable from `initials` (the whole powerset when omitted)."""
    n = len(nda.states)
    if initials is None:
        if n > cap:
            raise CapExceeded(f"full powerset over {n} states exceeds cap {cap}")
        initials = range(1 << n)
    return machine_equiv(forward_determinize(nda, initials))


@dataclass(frozen=True)
class OracleVerdict:
    equivalent: bool
    witness: tuple[int, ...] | None


def nda_pair_oracle(nda: Nda, mask_u: int, mask_v: int) -> OracleVerdict:
    """Breadth-first product search for a shortest distinguishing word.

    Works straight off the transition sets, independently of the
    determinized machine and the fixpoint engine.
    """
    queue = deque([(mask_u, mask_v, ())])
    seen = {(mask_u, mask_v)}
    num_actions = len(nda.alphabet)
    while queue:
        u, v, word = queue.popleft()
        if nda.is_accepting(u) != nda.is_accepting(v):
            return OracleVerdict(False, word)
        for a in range(num_actions):
            nu, nv = nda.post(u, a), nda.post(v, a)
            if (nu, nv) not in seen:
                seen.add((nu, nv))
                queue.append((nu, nv, word + (a,)))
    return OracleVerdict(True, None)


def moore_pair_oracle(lts: OutputLts, mask_u: int, mask_v: int) -> OracleVerdict:
    """Product search comparing joined outputs along every word."""
    lat = lts.lattice

    def observe(mask: int) -> int:
        return lat.join_all(lts.output[x] for x in bits(mask))

    queue = deque([(mask_u, mask_v, ())])
    seen = {(mask_u, mask_v)}
    num_actions = len(lts.alphabet)
    while queue:
        u, v, word = queue.popleft()
        if observe(u) != observe(v):
            return OracleVerdict(False, word)
        for a in range(num_actions):
            nu, nv = lts.post(u, a), lts.post(v, a)
            if (nu, nv) not in seen:
                seen.add((nu, nv))
                queue.append((nu, nv, word + (a,)))
    return OracleVerdict(True, None)


def moore_equiv(lts: OutputLts, initials: Iterable[int] | None = None,
                cap: int = 12) -> MachineEquiv:
    """Behavioural equivalence on the determinized Moore machine."""
    n = len(lts.states)
    if initials is None:
        if n > cap:
            raise CapExceeded(f"full powerset over {n} states exceeds cap {cap}")
        initials = range(1 << n)
    return machine_equiv(moore_determinize(lts, initials))


# ------------------------------------------------------------- weighted

def lwa_trace(lwa: Lwa, p: Sequence, word: Sequence[int]) -> Fraction:
    """Weight of `word` from configuration p: (p . M_w1 ... M_wn) . out."""
    vec = tuple(p)
    for a in word:
        if not (0 <= a < len(lwa.alphabet)):
            raise ValueError(f"unknown action index {a}")
        vec = lwa_step(lwa, vec, a)
    return lwa_output(lwa, vec)


def lwa_observability_chain(lwa: Lwa) -> list[Subspace]:
    """Descending chain of unobservable subspaces, from ker(out) down.

    Each step keeps the vectors whose every one-step image stays inside;
    dimensions strictly decrease until stable, so the chain has at most
    |states| strict steps.  That bound is asserted.
    """
    n, m = len(lwa.states), len(lwa.alphabet)
    chain = [nullspace([lwa.out], n)]
    while True:
        cur = chain[-1]
        if cur.is_zero():
            break
        basis = cur.basis
        tests = orthogonal_tests(cur)
        rows = []
        for a in range(m):
            stepped = [mat_vec(b, lwa.mat[a]) for b in basis]
            for z in tests:
                rows.append([dot(sb, z) for sb in stepped])
        coeffs = nullspace(rows, len(basis))
        vecs = [
            tuple(sum(c[i] * basis[i][j] for i in range(len(basis)))
                  for j in range(n))
            for c in coeffs.basis
        ]
        nxt = echelonize(vecs, n)
        if nxt == cur:
            break
        chain.append(nxt)
        if len(chain) - 1 > n:
            raise RuntimeError("observability chain exceeded the state count")
    return chain


def lwa_unobservable_subspace(lwa: Lwa) -> Subspace:
    """Largest subspace of ker(out) invariant under every step matrix.

    Two configurations are weighted-language equivalent iff their
    difference lies in this subspace.
    """
    return lwa_observability_chain(lwa)[-1]


def lwa_equiv(lwa: Lwa, p: Sequence, q: Sequence) -> bool:
    if len(p) != len(lwa.states) or len(q) != len(lwa.states):
        raise DimensionMismatch("configuration length does not match state count")
    diff = tuple(Fraction(a) - Fraction(b) for a, b in zip(p, q))
    return subspace_contains(lwa_unobservable_subspace(lwa), diff)


# ------------------------------------------------------------ conditional

@dataclass(frozen=True)
class CondRel:
    """Relation on condition/state/state triples, stored as one bitmask.

    Pairing only happens inside a single condition; the shared first
    coordinate makes that structural.
    """

    num_conditions: int
    num_states: int
    mask: int

    def _bit(self, k: int, x: int, y: int) -> int:
        return (k * self.num_states + x) * self.num_states + y

    @classmethod
    def full(cls, num_conditions: int, num_states: int) -> "CondRel":
        size = num_conditions * num_states * num_states
        return cls(num_conditions, num_states, (1 << size) - 1)

    @classmethod
    def identity(cls, num_conditions: int, num_states: int) -> "CondRel":
        rel = 0
        for k in range(num_conditions):
            for x in range(num_states):
                rel |= 1 << (k * num_states + x) * num_states + x
        return cls(num_conditions, num_states, rel)

    @classmethod
    def from_triples(cls, num_conditions: int, num_states: int,
                     triples: Iterable[tuple[int, int, int]]) -> "CondRel":
        rel = cls(num_conditions, num_states, 0)
        mask = 0
        for k, x, y in triples:
            if not (0 <= k < num_conditions and 0 <= x < num_states
                    and 0 <= y < num_states):
                raise ValueError(f"triple ({k},{x},{y}) out of range")
            mask |= 1 << rel._bit(k, x, y)
        return cls(num_conditions, num_states, mask)

    def __contains__(self, triple) -> bool:
        k, x, y = triple
        return bool(self.mask >> self._bit(k, x, y) & 1)

    def __and__(self, other: "CondRel") -> "CondRel":
        self._check(other)
        return CondRel(self.num_conditions, self.num_states,
                       self.mask & other.mask)

    def __le__(self, other: "CondRel") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def _check(self, other):
        if (self.num_conditions, self.num_states) != (
                other.num_conditions, other.num_states):
            raise DimensionMismatch("conditional relations over different carriers")

    def triples(self):
        n = self.num_states
        for b in bits(self.mask):
            k, rest = divmod(b, n * n)
            x, y = divmod(rest, n)
            yield k, x, y

    def slice_rel(self, k: int) -> BitRel:
        n = self.num_states
        rows = []
        for x in range(n):
            base = (k * n + x) * n
            rows.append((self.mask >> base) & ((1 << n) - 1))
        return BitRel(n, tuple(rows))

    def all_conditions_rel(self) -> BitRel:
        """Pairs related under every condition."""
        out = self.slice_rel(0)
        for k in range(1, self.num_conditions):
            out = out & self.slice_rel(k)
        return out


@dataclass(frozen=True)
class CtsBisimResult:
    relation: CondRel
    iterations: int


def cts_conditional_bisim(cts: Cts) -> CtsBisimResult:
    """Greatest conditional bisimulation as a triple relation.

    step keeps a triple when the successor sets under that condition
    simulate each other two-sidedly through the current relation.
    """
    nk, n = len(cts.conditions), len(cts.states)

    def step(rel: CondRel) -> CondRel:
        keep = []
        for k in range(nk):
            for x in range(n):
                for y in range(n):
                    if cts_rel_lift(rel, k, cts.delta[k][x], cts.delta[k][y]):
                        keep.append((k, x, y))
        return CondRel.from_triples(nk, n, keep)

    result = gfp(step, CondRel.full(nk, n))
    return CtsBisimResult(result.relation, result.iterations)


def cts_slice_bisim_oracle(cts: Cts, k: int) -> tuple[tuple[int, ...], ...]:
    """Strong-bisimilarity partition of the one-condition slice by plain
    partition refinement, independent of the fixpoint engine."""
    if not (0 <= k < len(cts.conditions)):
        raise ValueError(f"condition index {k} out of range")
    n = len(cts.states)
    succ = cts.delta[k]
    block = [0] * n
    while True:
        keys: dict[tuple, int] = {}
        nxt = []
        for x in range(n):
            sig = (block[x], frozenset(block[y] for y in bits(succ[x])))
            keys.setdefault(sig, len(keys))
            nxt.append(keys[sig])
        if nxt == block:
            break
        block = nxt
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(block[x], []).append(x)
    return tuple(tuple(sorted(g)) for g in
                 sorted(groups.values(), key=lambda g: min(g)))


# ------------------------------------------------------------------ Moore

def enabled_actions(delta: Sequence[Sequence[int]], x: int) -> frozenset[int]:
    return frozenset(a for a, mask in enumerate(delta[x]) if mask)


def refusal_output(delta: Sequence[Sequence[int]], num_actions: int,
                   x: int) -> frozenset[frozenset[int]]:
    """Sets of actions the state can refuse: disjoint from its enabled set.

    "Refused" is taken as Z with Z and enabled(x) disjoint; reports that
    rely on it carry the assumption explicitly.
    """
    enabled = enabled_actions(delta, x)
    subsets = []
    for mask in range(1 << num_actions):
        z = frozenset(bits(mask))
        if not (z & enabled):
            subsets.append(z)
    return frozenset(subsets)


def ready_output(delta: Sequence[Sequence[int]], x: int) -> frozenset[frozenset[int]]:
    """The singleton holding exactly the enabled-action set."""
    return frozenset({enabled_actions(delta, x)})


REFUSAL_ASSUMPTION = ("refusal: Z is refused at x iff Z and the enabled set "
                      "of x are disjoint")

SEMANTICS = ("trace", "failure", "ready")


def _action_set_label(alphabet, actions: frozenset[int]) -> str:
    return "{" + ",".join(alphabet.names[a] for a in sorted(actions)) + "}"


def _set_of_sets_label(alphabet, value: frozenset[frozenset[int]]) -> str:
    rendered = sorted(
        (tuple(sorted(s)) for s in value),
        key=lambda t: (len(t), t),
    )
    return "{" + ",".join(
        _action_set_label(alphabet, frozenset(t)) for t in rendered) + "}"


def build_output_lts(states, alphabet, delta, semantics: str) -> OutputLts:
    """Equip a bare LTS with trace, failure, or ready outputs.

    The semilattice is generated from the per-state outputs by closing
    under union (join of the empty set is the bottom).
    """
    delta = tuple(tuple(row) for row in delta)
    num_actions = len(alphabet)
    if semantics == "trace":
        lattice = Semilattice.boolean()
        outputs = tuple(1 for _ in range(len(states)))
        return OutputLts(states, alphabet, delta, outputs, lattice)
    if semantics == "failure":
        values = [refusal_output(delta, num_actions, x)
                  for x in range(len(states))]
    elif semantics == "ready":
        values = [ready_output(delta, x) for x in range(len(states))]
    else:
        raise ValueError(f"unknown semantics {semantics!r}")
    lattice, index = Semilattice.from_join(
        values, lambda a, b: a | b, frozenset(),
        lambda v: _set_of_sets_label(alphabet, v))
    return OutputLts(states, alphabet, delta,
                     tuple(index[v] for v in values), lattice)
