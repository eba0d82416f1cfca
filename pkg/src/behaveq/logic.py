"""Formula syntax, theory maps, and adequacy/expressivity verdicts.

Words are action-index tuples evaluated against determinized machines
or weighted steps; conditional systems get a box/Boolean modal grammar.
An adequacy check compares the behavioural relation (fixpoint engine)
against a logical relation computed along an independent route: product
search for automata and Moore systems, word tables for weighted
automata, formula enumeration for conditional systems.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    BitRel,
    CapExceeded,
    Carrier,
    bits,
    format_rational,
)
from .equivalence import (
    REFUSAL_ASSUMPTION,
    CondRel,
    cts_conditional_bisim,
    lwa_trace,
    lwa_unobservable_subspace,
    moore_equiv,
    moore_pair_oracle,
    nda_language_equiv,
    nda_pair_oracle,
)
from .liftings import cts_box
from .systems import Cts, Lwa, Nda, OutputLts, forward_determinize, lwa_step

Word = tuple[int, ...]

_FORMULA_CAP_BITS = 16


def render_word(alphabet: Carrier, word: Sequence[int]) -> str:
    return "".join(f"[{alphabet.label(a)}]" for a in word) + "↓"


def parse_word(alphabet: Carrier, text: str) -> Word:
    text = text.strip()
    if text.endswith("↓"):
        text = text[:-1]
    if not text:
        return ()
    if "[" in text:
        out = []
        rest = text
        while rest:
            if not rest.startswith("["):
                raise ValueError(f"malformed word {text!r}")
            close = rest.index("]")
            out.append(alphabet.index(rest[1:close]))
            rest = rest[close + 1:]
        return tuple(out)
    if any(len(name) != 1 for name in alphabet.names):
        raise ValueError("plain-letter words need single-character actions; "
                         "use the [action] form")
    return tuple(alphabet.index(ch) for ch in text)


@dataclass(frozen=True)
class CtsFormula:
    """Modal formula over conditional systems: tt, negation, conjunction, box."""

    op: str
    children: tuple["CtsFormula", ...]

    def render(self) -> str:
        if self.op == "tt":
            return "tt"
        if self.op == "neg":
            return "¬" + self.children[0].render()
        if self.op == "box":
            return "□" + self.children[0].render()
        a, b = self.children
        return f"({a.render()}∧{b.render()})"


TT = CtsFormula("tt", ())


def neg(f: CtsFormula) -> CtsFormula:
    return CtsFormula("neg", (f,))


def conj(a: CtsFormula, b: CtsFormula) -> CtsFormula:
    return CtsFormula("and", (a, b))


def box(f: CtsFormula) -> CtsFormula:
    return CtsFormula("box", (f,))


def conj_all(fs: Sequence[CtsFormula]) -> CtsFormula:
    if not fs:
        return TT
    out = fs[0]
    for f in fs[1:]:
        out = conj(out, f)
    return out


def disj_all(fs: Sequence[CtsFormula]) -> CtsFormula:
    if not fs:
        return neg(TT)
    if len(fs) == 1:
        return fs[0]
    return neg(conj_all([neg(f) for f in fs]))


def parse_cts_formula(text: str) -> CtsFormula:
    src = (text.replace("¬", "!").replace("∧", "&")
           .replace("□", "[]").replace("not ", "!").replace("box ", "[]"))
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(src) and src[pos].isspace():
            pos += 1

    def formula() -> CtsFormula:
        nonlocal pos
        left = unary()
        skip()
        while pos < len(src) and src[pos] == "&":
            pos += 1
            left = conj(left, unary())
            skip()
        return left

    def unary() -> CtsFormula:
        nonlocal pos
        skip()
        if src.startswith("!", pos):
            pos += 1
            return neg(unary())
        if src.startswith("[]", pos):
            pos += 2
            return box(unary())
        if src.startswith("tt", pos):
            pos += 2
            return TT
        if src.startswith("(", pos):
            pos += 1
            inner = formula()
            skip()
            if not src.startswith(")", pos):
                raise ValueError(f"unbalanced parenthesis in {text!r}")
            pos += 1
            return inner
        raise ValueError(f"cannot parse formula at {src[pos:]!r}")

    out = formula()
    skip()
    if pos != len(src):
        raise ValueError(f"trailing input in formula {text!r}")
    return out


def eval_word_nda(nda: Nda, mask: int, word: Sequence[int]) -> bool:
    """Acceptance of `word` from a subset state, via the determinized machine."""
    machine = forward_determinize(nda, [mask])
    return bool(machine.out[machine.run(mask, word)])


def eval_cts(cts: Cts, formula: CtsFormula) -> int:
    """Satisfaction set of a formula as a bitmask over condition/state pairs."""
    total = len(cts.conditions) * len(cts.states)
    full = (1 << total) - 1
    if formula.op == "tt":
        return full
    if formula.op == "neg":
        return full & ~eval_cts(cts, formula.children[0])
    if formula.op == "and":
        return eval_cts(cts, formula.children[0]) & eval_cts(cts, formula.children[1])
    return cts_box(cts, eval_cts(cts, formula.children[0]))


def theory_word(system, start, maxlen: int) -> dict[Word, object]:
    """Observation table over all words up to `maxlen`.

    Automata observe acceptance, weighted automata the trace weight,
    Moore systems the joined lattice output (as an element index).
    """
    if maxlen < 0:
        raise ValueError("maxlen must be nonnegative")
    table: dict[Word, object] = {}
    if isinstance(system, Nda):
        frontier = {(): start}
        for _ in range(maxlen + 1):
            nxt = {}
            for word, mask in frontier.items():
                table[word] = bool(mask & system.accepting)
                for a in range(len(system.alphabet)):
                    nxt[word + (a,)] = system.post(mask, a)
            frontier = {w: m for w, m in nxt.items() if len(w) <= maxlen}
        return table
    if isinstance(system, Lwa):
        frontier = {(): tuple(start)}
        for _ in range(maxlen + 1):
            nxt = {}
            for word, vec in frontier.items():
                table[word] = lwa_trace(system, vec, ())
                for a in range(len(system.alphabet)):
                    nxt[word + (a,)] = lwa_step(system, vec, a)
            frontier = {w: v for w, v in nxt.items() if len(w) <= maxlen}
        return table
    if isinstance(system, OutputLts):
        lat = system.lattice
        frontier = {(): start}
        for _ in range(maxlen + 1):
            nxt = {}
            for word, mask in frontier.items():
                table[word] = lat.join_all(system.output[x] for x in bits(mask))
                for a in range(len(system.alphabet)):
                    nxt[word + (a,)] = system.post(mask, a)
            frontier = {w: m for w, m in nxt.items() if len(w) <= maxlen}
        return table
    raise ValueError(f"no theory map for {type(system).__name__}")


# ------------------------------------------------------------ CTS formulas

def cts_logical_analysis(cts: Cts, depth: int):
    """Semantically deduplicated formula enumeration to a box depth.

    Returns (relation, generators): the logical equivalence as a triple
    relation, and the generator predicates with their formulas.  Each
    level closes the current predicates under Boolean combinations
    (unions of profile atoms) and applies box to every combination.
    """
    nk, n = len(cts.conditions), len(cts.states)
    total = nk * n
    if total > _FORMULA_CAP_BITS:
        raise CapExceeded(
            f"formula enumeration over {total} condition/state pairs "
            f"exceeds the cap of {_FORMULA_CAP_BITS}")
    full = (1 << total) - 1
    gens: list[tuple[int, CtsFormula]] = [(full, TT)]
    known = {full}

    def atoms() -> list[tuple[int, CtsFormula]]:
        profiles: dict[tuple, list[int]] = {}
        for i in range(total):
            prof = tuple(bool(g >> i & 1) for g, _ in gens)
            profiles.setdefault(prof, []).append(i)
        out = []
        for prof, positions in sorted(profiles.items()):
            mask = sum(1 << i for i in positions)
            # defining conjunction; satisfied tt conjuncts add nothing
            parts = []
            for keep, (g_mask, g_formula) in zip(prof, gens):
                if keep and g_mask == full:
                    continue
                parts.append(g_formula if keep else neg(g_formula))
            out.append((mask, conj_all(parts)))
        return out

    for _ in range(depth):
        level_atoms = atoms()
        fresh = []
        for combo in range(1, 1 << len(level_atoms)):
            mask = 0
            formulas = []
            for i in range(len(level_atoms)):
                if combo >> i & 1:
                    mask |= level_atoms[i][0]
                    formulas.append(level_atoms[i][1])
            boxed = cts_box(cts, mask)
            if boxed not in known:
                known.add(boxed)
                fresh.append((boxed, box(disj_all(formulas))))
        boxed_empty = cts_box(cts, 0)
        if boxed_empty not in known:
            known.add(boxed_empty)
            fresh.append((boxed_empty, box(neg(TT))))
        gens.extend(fresh)

    triples = []
    for k in range(nk):
        for x in range(n):
            for y in range(n):
                i, j = k * n + x, k * n + y
                if all((g >> i & 1) == (g >> j & 1) for g, _ in gens):
                    triples.append((k, x, y))
    return CondRel.from_triples(nk, n, triples), gens


def cts_distinguishing_formula(gens, k: int, x: int, y: int, n: int) -> str | None:
    for mask, formula in gens:
        if (mask >> (k * n + x) & 1) != (mask >> (k * n + y) & 1):
            return formula.render()
    return None


# --------------------------------------------------------------- the check

@dataclass(frozen=True)
class EquivReport:
    """Outcome of an adequacy/expressivity check.

    adequate: behavioural pairs are never logically separated.
    expressive: logically equal pairs are behaviourally equal.
    """

    family: str
    adequate: bool
    expressive: bool
    behavioural_classes: tuple[tuple[str, ...], ...]
    logical_classes: tuple[tuple[str, ...], ...]
    counterexamples: tuple[dict, ...]
    iterations: int
    depth_saturated: bool | None = None
    assumptions: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "adequate": self.adequate,
            "expressive": self.expressive,
            "behavioural_classes": [list(c) for c in self.behavioural_classes],
            "logical_classes": [list(c) for c in self.logical_classes],
            "counterexamples": list(self.counterexamples),
            "iterations": self.iterations,
            "depth_saturated": self.depth_saturated,
            "assumptions": list(self.assumptions),
        }


def _machine_report(family, machine, behavioural, iterations, oracle, alphabet,
                    assumptions=()) -> EquivReport:
    size = len(machine.subset_states)
    verdicts = {}
    rows = []
    for i in range(size):
        row = 0
        for j in range(size):
            v = oracle(machine.subset_states[i], machine.subset_states[j])
            verdicts[i, j] = v
            if v.equivalent:
                row |= 1 << j
        rows.append(row)
    logical = BitRel(size, tuple(rows))
    counterexamples = []
    for i in range(size):
        for j in range(size):
            beh = behavioural.has(i, j)
            log = logical.has(i, j)
            if beh == log:
                continue
            pair = [machine.label(i), machine.label(j)]
            if beh and not log:
                counterexamples.append({
                    "pair": pair, "kind": "adequacy",
                    "formula": render_word(alphabet, verdicts[i, j].witness)})
            else:
                counterexamples.append({
                    "pair": pair, "kind": "expressivity",
                    "note": "no distinguishing word exists but the "
                            "behavioural relation separates the pair"})
    labelled = lambda rel: tuple(
        tuple(machine.label(i) for i in cls) for cls in rel.classes())
    return EquivReport(
        family=family,
        adequate=behavioural <= logical,
        expressive=logical <= behavioural,
        behavioural_classes=labelled(behavioural),
        logical_classes=labelled(logical),
        counterexamples=tuple(counterexamples),
        iterations=iterations,
        assumptions=tuple(assumptions),
    )


def check_adequacy_expressivity(system, initials: Iterable[int] | None = None,
                                vectors: Sequence[Sequence] | None = None,
                                cap: int = 12) -> EquivReport:
    """Compute behavioural and logical equivalence along independent
    routes and compare them.

    Automata/Moore: fixpoint on the determinized machine vs pairwise
    product search.  Weighted: invariant-subspace verdict vs trace
    tables up to the stabilisation bound.  Conditional: bisimulation
    fixpoint vs formula enumeration to the fixpoint depth, with a
    saturation check one level deeper.
    """
    if isinstance(system, Nda):
        equiv = nda_language_equiv(system, initials, cap)
        return _machine_report(
            "nda", equiv.machine, equiv.relation, equiv.iterations,
            lambda u, v: nda_pair_oracle(system, u, v), system.alphabet)

    if isinstance(system, OutputLts):
        equiv = moore_equiv(system, initials, cap)
        return _machine_report(
            "moore", equiv.machine, equiv.relation, equiv.iterations,
            lambda u, v: moore_pair_oracle(system, u, v), system.alphabet)

    if isinstance(system, Lwa):
        n = len(system.states)
        if vectors is None:
            vectors = [tuple(Fraction(int(i == x)) for i in range(n))
                       for x in range(n)]
            labels = list(system.states.names)
        else:
            vectors = [tuple(Fraction(v) for v in vec) for vec in vectors]
            labels = ["[" + ",".join(format_rational(v) for v in vec) + "]"
                      for vec in vectors]
        space = lwa_unobservable_subspace(system)
        words = [()]
        for length in range(1, n + 1):
            words.extend(itertools.product(range(len(system.alphabet)),
                                           repeat=length))
        tables = [
            {w: lwa_trace(system, vec, w) for w in words} for vec in vectors
        ]
        size = len(vectors)
        beh_rows, log_rows = [], []
        counterexamples = []
        for i in range(size):
            beh_row = log_row = 0
            for j in range(size):
                diff = tuple(a - b for a, b in zip(vectors[i], vectors[j]))
                beh = space.contains(diff)
                log = tables[i] == tables[j]
                if beh:
                    beh_row |= 1 << j
                if log:
                    log_row |= 1 << j
                if beh != log:
                    pair = [labels[i], labels[j]]
                    if beh:
                        word = next(w for w in words
                                    if tables[i][w] != tables[j][w])
                        counterexamples.append({
                            "pair": pair, "kind": "adequacy",
                            "formula": render_word(system.alphabet, word)})
                    else:
                        counterexamples.append({
                            "pair": pair, "kind": "expressivity",
                            "note": "trace tables agree to the stabilisation "
                                    "bound but the subspace separates the pair"})
            beh_rows.append(beh_row)
            log_rows.append(log_row)
        behavioural = BitRel(size, tuple(beh_rows))
        logical = BitRel(size, tuple(log_rows))
        labelled = lambda rel: tuple(
            tuple(labels[i] for i in cls) for cls in rel.classes())
        return EquivReport(
            family="lwa",
            adequate=behavioural <= logical,
            expressive=logical <= behavioural,
            behavioural_classes=labelled(behavioural),
            logical_classes=labelled(logical),
            counterexamples=tuple(counterexamples),
            iterations=n,
        )

    if isinstance(system, Cts):
        result = cts_conditional_bisim(system)
        depth = result.iterations
        logical, gens = cts_logical_analysis(system, depth)
        deeper, _ = cts_logical_analysis(system, depth + 1)
        nk, n = len(system.conditions), len(system.states)
        counterexamples = []
        for k in range(nk):
            for x in range(n):
                for y in range(n):
                    beh = (k, x, y) in result.relation
                    log = (k, x, y) in logical
                    if beh == log:
                        continue
                    pair = [f"{system.conditions.label(k)}:{system.states.label(x)}",
                            f"{system.conditions.label(k)}:{system.states.label(y)}"]
                    if beh:
                        counterexamples.append({
                            "pair": pair, "kind": "adequacy",
                            "formula": cts_distinguishing_formula(gens, k, x, y, n)})
                    else:
                        counterexamples.append({
                            "pair": pair, "kind": "expressivity",
                            "note": "no formula separates the pair but the "
                                    "bisimulation fixpoint does"})

        def pair_classes(rel: CondRel):
            size = nk * n
            rows = []
            for k in range(nk):
                for x in range(n):
                    row = 0
                    for y in range(n):
                        if (k, x, y) in rel:
                            row |= 1 << (k * n + y)
                    rows.append(row)
            big = BitRel(size, tuple(rows))
            return tuple(
                tuple(f"{system.conditions.label(i // n)}:{system.states.label(i % n)}"
                      for i in cls)
                for cls in big.classes())

        return EquivReport(
            family="cts",
            adequate=result.relation <= logical,
            expressive=logical <= result.relation,
            behavioural_classes=pair_classes(result.relation),
            logical_classes=pair_classes(logical),
            counterexamples=tuple(counterexamples),
            iterations=result.iterations,
            depth_saturated=(deeper.mask == logical.mask),
        )

    raise ValueError(f"no adequacy check for {type(system).__name__}")
