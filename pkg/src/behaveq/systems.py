"""The four system families and their determinisations.

Nondeterministic automata, rational-weighted automata, conditional
transition systems and LTSs with semilattice outputs, all as validated
immutable values.  Subsets of a state carrier are n-bit little-endian
masks throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .core import (
    Carrier,
    DimensionMismatch,
    Semilattice,
    bits,
    dot,
    mat_vec,
    subset_label,
)


@dataclass(frozen=True)
class Nda:
    """Nondeterministic automaton with a termination/acceptance marker.

    `delta[x]` is the set of (action, successor) pairs enabled at x,
    `accepting` the bitmask of accepting states.
    """

    states: Carrier
    alphabet: Carrier
    delta: tuple[frozenset[tuple[int, int]], ...]
    accepting: int

    @cached_property
    def _succ(self) -> tuple[tuple[int, ...], ...]:
        n, m = len(self.states), len(self.alphabet)
        table = [[0] * m for _ in range(n)]
        for x, edges in enumerate(self.delta):
            for a, x2 in edges:
                table[x][a] |= 1 << x2
        return tuple(tuple(row) for row in table)

    def successors(self, x: int, a: int) -> int:
        return self._succ[x][a]

    def post(self, mask: int, a: int) -> int:
        out = 0
        for x in bits(mask):
            out |= self._succ[x][a]
        return out

    def pre(self, mask: int, a: int) -> int:
        out = 0
        for x in range(len(self.states)):
            if self._succ[x][a] & mask:
                out |= 1 << x
        return out

    def is_accepting(self, mask: int) -> bool:
        return bool(mask & self.accepting)


@dataclass(frozen=True)
class Lwa:
    """Weighted automaton over exact rationals.

    Row-vector convention: configurations are row vectors p over the
    states, one step under action a is p . mat[a], the output weight is
    p . out.
    """

    states: Carrier
    alphabet: Carrier
    out: tuple[Fraction, ...]
    mat: tuple[tuple[tuple[Fraction, ...], ...], ...]


@dataclass(frozen=True)
class Cts:
    """Conditional transition system: delta[k][x] is a successor mask."""

    conditions: Carrier
    states: Carrier
    delta: tuple[tuple[int, ...], ...]

    def succ(self, k: int, x: int) -> int:
        return self.delta[k][x]


@dataclass(frozen=True)
class OutputLts:
    """LTS with per-state outputs in a finite join-semilattice.

    `delta[x][a]` is a successor mask, `output[x]` a lattice element
    index.
    """

    states: Carrier
    alphabet: Carrier
    delta: tuple[tuple[int, ...], ...]
    output: tuple[int, ...]
    lattice: Semilattice

    def post(self, mask: int, a: int) -> int:
        out = 0
        for x in bits(mask):
            out |= self.delta[x][a]
        return out

    def enabled(self, x: int) -> int:
        mask = 0
        for a in range(len(self.alphabet)):
            if self.delta[x][a]:
                mask |= 1 << a
        return mask


@dataclass(frozen=True)
class DeterminizedMachine:
    """Reachable subset machine of an Nda or OutputLts.

    States are subset masks in BFS discovery order starting from the
    sorted initial masks, so construction is deterministic.  `out` holds
    booleans for automata and lattice element indices for Moore
    machines.
    """

    base: object
    alphabet: Carrier
    subset_states: tuple[int, ...]
    trans: tuple[tuple[int, ...], ...]
    out: tuple[object, ...]

    @cached_property
    def _pos(self) -> dict[int, int]:
        return {mask: i for i, mask in enumerate(self.subset_states)}

    def pos(self, mask: int) -> int:
        try:
            return self._pos[mask]
        except KeyError:
            raise ValueError(f"subset mask {mask} is not a reachable state") from None

    def run(self, mask: int, word: Sequence[int]) -> int:
        """Position reached from `mask` after reading `word`."""
        i = self.pos(mask)
        for a in word:
            i = self.trans[i][a]
        return i

    def label(self, i: int) -> str:
        return subset_label(self.base.states, self.subset_states[i])


def _check_masks(n: int, initials: Iterable[int]) -> list[int]:
    top = 1 << n
    masks = sorted(set(initials))
    for m in masks:
        if not (0 <= m < top):
            raise ValueError(f"subset mask {m} out of range for {n} states")
    return masks


def _determinize(base, n: int, num_actions: int, initials, post, observe):
    order = _check_masks(n, initials)
    pos = {m: i for i, m in enumerate(order)}
    trans: list[list[int]] = []
    queue = list(order)
    head = 0
    while head < len(queue):
        mask = queue[head]
        head += 1
        row = []
        for a in range(num_actions):
            target = post(mask, a)
            if target not in pos:
                pos[target] = len(queue)
                queue.append(target)
            row.append(pos[target])
        trans.append(row)
    return DeterminizedMachine(
        base=base,
        alphabet=base.alphabet,
        subset_states=tuple(queue),
        trans=tuple(tuple(r) for r in trans),
        out=tuple(observe(m) for m in queue),
    )


def forward_determinize(nda: Nda, initials: Iterable[int]) -> DeterminizedMachine:
    """Subset construction restricted to the part reachable from `initials`."""
    return _determinize(
        nda, len(nda.states), len(nda.alphabet), initials,
        nda.post, nda.is_accepting,
    )


def moore_determinize(lts: OutputLts, initials: Iterable[int]) -> DeterminizedMachine:
    """Subset construction with outputs joined in the lattice.

    The empty subset gets the lattice bottom (join over an empty index
    set).
    """
    lat = lts.lattice

    def observe(mask: int) -> int:
        return lat.join_all(lts.output[x] for x in bits(mask))

    return _determinize(
        lts, len(lts.states), len(lts.alphabet), initials, lts.post, observe,
    )


def lwa_step(lwa: Lwa, p: Sequence, a: int) -> tuple[Fraction, ...]:
    """One weighted step: p . mat[a]."""
    if not (0 <= a < len(lwa.alphabet)):
        raise ValueError(f"unknown action index {a}")
    if len(p) != len(lwa.states):
        raise DimensionMismatch("vector length does not match state count")
    return mat_vec(p, lwa.mat[a])


def lwa_output(lwa: Lwa, p: Sequence) -> Fraction:
    """Output weight of a configuration: p . out."""
    if len(p) != len(lwa.states):
        raise DimensionMismatch("vector length does not match state count")
    return dot(p, lwa.out)


def validate(system) -> list[str]:
    """Human-readable invariant diagnostics; empty means well formed."""
    probs: list[str] = []
    if isinstance(system, Nda):
        n, m = len(system.states), len(system.alphabet)
        if len(system.delta) != n:
            probs.append(f"delta has {len(system.delta)} rows for {n} states")
        for x, edges in enumerate(system.delta[:n]):
            for a, x2 in sorted(edges):
                if not (0 <= a < m):
                    probs.append(f"state {system.states.label(x)}: action index {a} out of range")
                if not (0 <= x2 < n):
                    probs.append(f"state {system.states.label(x)}: successor index {x2} out of range")
        if system.accepting >> n:
            probs.append("accepting mask has bits outside the state carrier")
    elif isinstance(system, Lwa):
        n, m = len(system.states), len(system.alphabet)
        if len(system.out) != n:
            probs.append(f"output vector has length {len(system.out)}, expected {n}")
        if len(system.mat) != m:
            probs.append(f"{len(system.mat)} matrices for {m} actions")
        for a, mat in enumerate(system.mat[:m]):
            if len(mat) != n or any(len(row) != n for row in mat):
                probs.append(f"matrix for {system.alphabet.label(a)} is not {n}x{n}")
        for vec in (system.out, *(row for mat in system.mat for row in mat)):
            for v in vec:
                if not isinstance(v, Fraction):
                    probs.append(f"non-rational weight {v!r}")
                    return probs
    elif isinstance(system, Cts):
        k, n = len(system.conditions), len(system.states)
        if len(system.delta) != k or any(len(row) != n for row in system.delta):
            probs.append(f"delta is not a {k}x{n} table")
        for ki, row in enumerate(system.delta[:k]):
            for x, mask in enumerate(row[:n]):
                if mask >> n:
                    probs.append(
                        f"successors of {system.states.label(x)} under "
                        f"{system.conditions.label(ki)} leave the carrier")
    elif isinstance(system, OutputLts):
        n, m = len(system.states), len(system.alphabet)
        if len(system.delta) != n or any(len(row) != m for row in system.delta):
            probs.append(f"delta is not a {n}x{m} table")
        for x, row in enumerate(system.delta[:n]):
            for mask in row:
                if mask >> n:
                    probs.append(f"successors of {system.states.label(x)} leave the carrier")
        if len(system.output) != n:
            probs.append("output table length does not match state count")
        for x, o in enumerate(system.output[:n]):
            if not (0 <= o < len(system.lattice)):
                probs.append(f"output of {system.states.label(x)} is not a lattice element")
        probs.extend(system.lattice.diagnostics())
    elif isinstance(system, Semilattice):
        probs.extend(system.diagnostics())
    elif isinstance(system, DeterminizedMachine):
        count = len(system.subset_states)
        for i, row in enumerate(system.trans):
            for t in row:
                if not (0 <= t < count):
                    probs.append(f"transition target {t} from state {i} not in the machine")
    else:
        probs.append(f"unknown system type {type(system).__name__}")
    return probs
