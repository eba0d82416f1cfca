"""Command-line driver and JSON file formats.

Subcommands: equiv, quotient, check, eval, determinize.  All reports
are deterministic: dictionaries are emitted with sorted keys and every
random draw flows from --seed through the package generator, so equal
invocations produce byte-identical output.

System files are JSON documents with a "kind" discriminator:

  nda    {"kind","states","alphabet","transitions":[{from,action,to}],
          "accepting":[...]}
  lwa    {"kind","states","alphabet","output":{state:"p/q"},
          "matrices":{action:[["p/q",...],...]}}
  cts    {"kind","conditions","states","transitions":[{cond,from,to}]}
  moore  {"kind","states","alphabet","transitions":[{from,action,to}]}
         plus either "semantics": trace|failure|ready (outputs derived)
         or explicit "lattice":{elements,join,bottom} and
         "outputs":{state:element}

Weights are strings "p/q" or bare integers; subsets are written
"{x,y}"; vectors "[1/2,0,-3]".
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .core import (
    BitRel,
    CapExceeded,
    Carrier,
    Semilattice,
    bits,
    format_rational,
    parse_subset_label,
    subset_label,
)
from .equivalence import (
    REFUSAL_ASSUMPTION,
    SEMANTICS,
    build_output_lts,
    cts_conditional_bisim,
    lwa_equiv,
    lwa_trace,
    moore_equiv,
    nda_language_equiv,
    nda_pair_oracle,
)
from .liftings import check_lifting_laws
from .logic import (
    check_adequacy_expressivity,
    eval_cts,
    eval_word_nda,
    parse_cts_formula,
    parse_word,
    render_word,
    theory_word,
)
from .quotient import (
    backward_determinize,
    build_respecting_automaton,
    redundant_members,
    verify_witness_homomorphism,
)
from .rng import Lcg, random_cts, random_lwa, random_nda, subseed
from .systems import (
    Cts,
    Lwa,
    Nda,
    OutputLts,
    forward_determinize,
    moore_determinize,
    validate,
)


class SchemaError(ValueError):
    pass


# ----------------------------------------------------------------- loading

def _require(data: dict, *keys):
    for key in keys:
        if key not in data:
            raise SchemaError(f"missing field {key!r}")


def _carrier(data, key) -> Carrier:
    names = data[key]
    if (not isinstance(names, list) or not names
            or not all(isinstance(n, str) for n in names)):
        raise SchemaError(f"field {key!r} must be a nonempty list of labels")
    try:
        return Carrier(tuple(names))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def load_system(data: dict):
    """Build and validate a system from its JSON document."""
    if not isinstance(data, dict):
        raise SchemaError("top-level document must be an object")
    kind = data.get("kind")
    if kind == "nda":
        _require(data, "states", "alphabet", "transitions", "accepting")
        states = _carrier(data, "states")
        alphabet = _carrier(data, "alphabet")
        edges = [set() for _ in range(len(states))]
        for t in data["transitions"]:
            _require(t, "from", "action", "to")
            edges[states.index(t["from"])].add(
                (alphabet.index(t["action"]), states.index(t["to"])))
        accepting = 0
        for label in data["accepting"]:
            accepting |= 1 << states.index(label)
        system = Nda(states, alphabet, tuple(frozenset(e) for e in edges),
                     accepting)
    elif kind == "lwa":
        _require(data, "states", "alphabet", "output", "matrices")
        states = _carrier(data, "states")
        alphabet = _carrier(data, "alphabet")
        n = len(states)
        out = [Fraction(0)] * n
        for label, value in data["output"].items():
            out[states.index(label)] = Fraction(str(value))
        mats = []
        for a in alphabet.names:
            rows = data["matrices"].get(a)
            if rows is None:
                raise SchemaError(f"missing matrix for action {a!r}")
            if len(rows) != n or any(len(r) != n for r in rows):
                raise SchemaError(f"matrix for {a!r} is not {n}x{n}")
            mats.append(tuple(tuple(Fraction(str(v)) for v in row)
                              for row in rows))
        system = Lwa(states, alphabet, tuple(out), tuple(mats))
    elif kind == "cts":
        _require(data, "conditions", "states", "transitions")
        conditions = _carrier(data, "conditions")
        states = _carrier(data, "states")
        table = [[0] * len(states) for _ in range(len(conditions))]
        for t in data["transitions"]:
            _require(t, "cond", "from", "to")
            k = conditions.index(t["cond"])
            table[k][states.index(t["from"])] |= 1 << states.index(t["to"])
        system = Cts(conditions, states, tuple(tuple(r) for r in table))
    elif kind == "moore":
        _require(data, "states", "alphabet", "transitions")
        states = _carrier(data, "states")
        alphabet = _carrier(data, "alphabet")
        table = [[0] * len(alphabet) for _ in range(len(states))]
        for t in data["transitions"]:
            _require(t, "from", "action", "to")
            table[states.index(t["from"])][alphabet.index(t["action"])] |= (
                1 << states.index(t["to"]))
        delta = tuple(tuple(r) for r in table)
        if "lattice" in data:
            _require(data, "outputs")
            lat_data = data["lattice"]
            _require(lat_data, "elements", "join", "bottom")
            elements = tuple(lat_data["elements"])
            pos = {e: i for i, e in enumerate(elements)}
            try:
                join_table = tuple(
                    tuple(pos[v] for v in row) for row in lat_data["join"])
                lattice = Semilattice.create(
                    elements, join_table, pos[lat_data["bottom"]])
            except (KeyError, ValueError) as exc:
                raise SchemaError(f"bad lattice: {exc}") from None
            outputs = tuple(
                pos[data["outputs"][label]] for label in states.names)
            system = OutputLts(states, alphabet, delta, outputs, lattice)
        else:
            semantics = data.get("semantics", "trace")
            if semantics not in SEMANTICS:
                raise SchemaError(f"unknown semantics {semantics!r}")
            system = build_output_lts(states, alphabet, delta, semantics)
    else:
        raise SchemaError(f"unknown or missing kind {kind!r}")
    problems = validate(system)
    if problems:
        raise SchemaError("; ".join(problems))
    return system


def read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from None


def load_file(path: str):
    return load_system(read_json(path))


def save_system(system) -> dict:
    if isinstance(system, Nda):
        return {
            "kind": "nda",
            "states": list(system.states.names),
            "alphabet": list(system.alphabet.names),
            "transitions": [
                {"from": system.states.label(x),
                 "action": system.alphabet.label(a),
                 "to": system.states.label(y)}
                for x in range(len(system.states))
                for a, y in sorted(system.delta[x])
            ],
            "accepting": [system.states.label(x)
                          for x in bits(system.accepting)],
        }
    if isinstance(system, Lwa):
        return {
            "kind": "lwa",
            "states": list(system.states.names),
            "alphabet": list(system.alphabet.names),
            "output": {system.states.label(x): format_rational(w)
                       for x, w in enumerate(system.out)},
            "matrices": {
                system.alphabet.label(a): [
                    [format_rational(v) for v in row] for row in system.mat[a]
                ] for a in range(len(system.alphabet))
            },
        }
    if isinstance(system, Cts):
        return {
            "kind": "cts",
            "conditions": list(system.conditions.names),
            "states": list(system.states.names),
            "transitions": [
                {"cond": system.conditions.label(k),
                 "from": system.states.label(x),
                 "to": system.states.label(y)}
                for k in range(len(system.conditions))
                for x in range(len(system.states))
                for y in bits(system.delta[k][x])
            ],
        }
    if isinstance(system, OutputLts):
        return {
            "kind": "moore",
            "states": list(system.states.names),
            "alphabet": list(system.alphabet.names),
            "transitions": [
                {"from": system.states.label(x),
                 "action": system.alphabet.label(a),
                 "to": system.states.label(y)}
                for x in range(len(system.states))
                for a in range(len(system.alphabet))
                for y in bits(system.delta[x][a])
            ],
            "lattice": {
                "elements": list(system.lattice.names),
                "join": [[system.lattice.names[v] for v in row]
                         for row in system.lattice.table],
                "bottom": system.lattice.names[system.lattice.bottom],
            },
            "outputs": {system.states.label(x): system.lattice.names[o]
                        for x, o in enumerate(system.output)},
        }
    raise SchemaError(f"cannot serialize {type(system).__name__}")


# ------------------------------------------------------------------ output

def _emit(payload: dict, as_json: bool, lines) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines(payload):
            print(line)


def _parse_state_set(system, text: str) -> int:
    text = text.strip()
    if text.startswith("{"):
        return parse_subset_label(system.states, text)
    return 1 << system.states.index(text)


def _parse_vector(system: Lwa, text: str) -> tuple[Fraction, ...]:
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise SchemaError(f"malformed vector {text!r}")
        body = text[1:-1].strip()
        parts = [p.strip() for p in body.split(",")] if body else []
        vec = tuple(Fraction(p) for p in parts)
        if len(vec) != len(system.states):
            raise SchemaError(
                f"vector has {len(vec)} entries for {len(system.states)} states")
        return vec
    x = system.states.index(text)
    return tuple(Fraction(int(i == x)) for i in range(len(system.states)))


# ------------------------------------------------------------- subcommands

def cmd_equiv(args) -> int:
    raw = read_json(args.file)
    system = load_system(raw)
    semantics = None
    if isinstance(system, OutputLts):
        semantics = args.semantics or raw.get("semantics")
    as_json = args.json
    if isinstance(system, (Nda, OutputLts)):
        if isinstance(system, OutputLts) and args.semantics:
            system = build_output_lts(
                system.states, system.alphabet, system.delta, args.semantics)
        n = len(system.states)
        if args.pair:
            masks = [_parse_state_set(system, s) for s in args.pair]
            initials = masks
        else:
            if n > args.cap:
                raise CapExceeded(
                    f"--all over {n} states exceeds cap {args.cap}")
            initials = range(1 << n)
        if isinstance(system, Nda):
            equiv = nda_language_equiv(system, initials, cap=args.cap)
            oracle = lambda u, v: nda_pair_oracle(system, u, v)
        else:
            equiv = moore_equiv(system, initials, cap=args.cap)
            from .equivalence import moore_pair_oracle
            oracle = lambda u, v: moore_pair_oracle(system, u, v)
        payload = {
            "kind": "moore" if isinstance(system, OutputLts) else "nda",
            "iterations": equiv.iterations,
            "classes": [list(c) for c in equiv.classes()],
        }
        if semantics == "failure":
            payload["assumptions"] = [REFUSAL_ASSUMPTION]
        exit_code = 0
        if args.pair:
            u, v = masks
            verdict = equiv.related(u, v)
            payload["pair"] = [subset_label(system.states, u),
                               subset_label(system.states, v)]
            payload["equivalent"] = verdict
            if not verdict:
                witness = oracle(u, v).witness
                payload["witness"] = render_word(system.alphabet, witness)
                exit_code = 1
        _emit(payload, as_json, _equiv_lines)
        return exit_code

    if isinstance(system, Lwa):
        if args.pair:
            p, q = (_parse_vector(system, s) for s in args.pair)
            verdict = lwa_equiv(system, p, q)
            payload = {
                "kind": "lwa",
                "pair": list(args.pair),
                "equivalent": verdict,
            }
            exit_code = 0
            if not verdict:
                exit_code = 1
                n = len(system.states)
                import itertools as _it
                for length in range(n + 1):
                    found = False
                    for w in _it.product(range(len(system.alphabet)),
                                         repeat=length):
                        if lwa_trace(system, p, w) != lwa_trace(system, q, w):
                            payload["witness"] = render_word(system.alphabet, w)
                            payload["weights"] = [
                                format_rational(lwa_trace(system, p, w)),
                                format_rational(lwa_trace(system, q, w))]
                            found = True
                            break
                    if found:
                        break
            _emit(payload, as_json, _equiv_lines)
            return exit_code
        report = check_adequacy_expressivity(system)
        payload = {"kind": "lwa",
                   "classes": [list(c) for c in report.behavioural_classes]}
        _emit(payload, as_json, _equiv_lines)
        return 0

    if isinstance(system, Cts):
        result = cts_conditional_bisim(system)
        payload = {"kind": "cts", "iterations": result.iterations,
                   "classes": {}}
        for k in range(len(system.conditions)):
            rel = result.relation.slice_rel(k)
            payload["classes"][system.conditions.label(k)] = [
                [system.states.label(x) for x in cls]
                for cls in rel.classes()]
        exit_code = 0
        if args.pair:
            x = system.states.index(args.pair[0].strip("{}"))
            y = system.states.index(args.pair[1].strip("{}"))
            per_condition = {
                system.conditions.label(k): (k, x, y) in result.relation
                for k in range(len(system.conditions))}
            payload["pair"] = list(args.pair)
            payload["per_condition"] = per_condition
            payload["equivalent"] = all(per_condition.values())
            if not payload["equivalent"]:
                exit_code = 1
        _emit(payload, as_json, _equiv_lines)
        return exit_code
    raise SchemaError("unsupported system for equiv")


def _equiv_lines(payload):
    if "pair" in payload:
        yield ("equivalent" if payload.get("equivalent")
               else "inequivalent") + ": " + " vs ".join(payload["pair"])
        if "witness" in payload:
            yield f"witness: {payload['witness']}"
        if "per_condition" in payload:
            for cond, ok in sorted(payload["per_condition"].items()):
                yield f"  under {cond}: {'yes' if ok else 'no'}"
    classes = payload.get("classes")
    if isinstance(classes, list):
        for cls in classes:
            yield "class: " + " ".join(cls)
    elif isinstance(classes, dict):
        for cond, clss in sorted(classes.items()):
            yield f"condition {cond}:"
            for cls in clss:
                yield "  class: " + " ".join(cls)


def cmd_quotient(args) -> int:
    system = load_file(args.file)
    if not isinstance(system, Nda):
        raise SchemaError("quotient expects an nda input")
    n = len(system.states)
    if args.identity_eq:
        eq = BitRel.identity(1 << n)
        iterations = 0
    else:
        result = nda_language_equiv(system)
        eq = result.relation
        iterations = result.iterations
    auto = build_respecting_automaton(system, eq)
    hom = verify_witness_homomorphism(system, auto)
    labels = auto.labels()
    automaton_json = {
        "kind": "nda",
        "states": list(labels),
        "alphabet": list(system.alphabet.names),
        # edges in reading direction: from --a--> to means the backward
        # dynamics send `to` to `from` under a
        "transitions": [
            {"from": labels[auto.trans[i][a]],
             "action": system.alphabet.label(a),
             "to": labels[i]}
            for i in range(len(auto.carrier))
            for a in range(len(system.alphabet))
        ],
        "accepting": [subset_label(system.states, auto.accepting)],
    }
    payload = {
        "automaton": automaton_json,
        "witness": {
            system.states.label(x): [subset_label(system.states, w)
                                     for w in auto.witness_sets(x)]
            for x in range(n)},
        "homomorphism": hom.ok,
        "redundant": [subset_label(system.states, w)
                      for w in redundant_members(auto)],
        "iterations": iterations,
    }
    if not hom.ok:
        payload["homomorphism_witness"] = hom.witness

    def lines(p):
        yield f"respecting subautomaton with {len(p['automaton']['states'])} states"
        yield "states: " + " ".join(p["automaton"]["states"])
        yield f"homomorphism: {p['homomorphism']}"
        yield "redundant: " + " ".join(p["redundant"])

    _emit(payload, args.json, lines)
    return 0


def _run_law_checks(args, results: list) -> None:
    families = [args.random] if args.random else ["nda", "lwa", "cts"]
    for family in families:
        report = check_lifting_laws(family, trials=args.trials,
                                    seed=args.seed,
                                    corruption=args.corruption)
        results.append({
            "check": f"laws:{family}",
            "passed": report.all_passed,
            "detail": report.to_json(),
        })


def _run_adequacy_checks(args, results: list) -> None:
    if args.file:
        raw = read_json(args.file)
        system = load_system(raw)
        report = check_adequacy_expressivity(system)
        detail = report.to_json()
        if isinstance(system, OutputLts) and raw.get("semantics") == "failure":
            detail["assumptions"] = [REFUSAL_ASSUMPTION]
        results.append({
            "check": "adequacy:file",
            "passed": report.adequate and report.expressive
            and report.depth_saturated is not False,
            "detail": detail,
        })
        return
    family = args.random or "nda"
    builders = {"nda": random_nda, "lwa": random_lwa, "cts": random_cts}
    if family not in builders:
        raise SchemaError(f"unknown random family {family!r}")
    failures = []
    for i in range(args.trials):
        rng = Lcg(subseed(args.seed, i))
        if family == "nda":
            system = random_nda(rng, max_states=4)
        elif family == "lwa":
            system = random_lwa(rng, max_states=4)
        else:
            system = random_cts(rng, max_conditions=3, max_states=4)
        report = check_adequacy_expressivity(system)
        ok = (report.adequate and report.expressive
              and report.depth_saturated is not False)
        if not ok:
            failures.append({"trial": i, "report": report.to_json()})
    results.append({
        "check": f"adequacy:{family}",
        "passed": not failures,
        "detail": {"trials": args.trials, "failures": failures},
    })


def cmd_check(args) -> int:
    if not args.laws and not args.adequacy:
        raise SchemaError("nothing to check: pass --laws and/or --adequacy")
    results: list[dict] = []
    if args.laws:
        _run_law_checks(args, results)
    if args.adequacy:
        _run_adequacy_checks(args, results)
    payload = {
        "seed": args.seed,
        "trials": args.trials,
        "all_passed": all(r["passed"] for r in results),
        "checks": results,
    }

    def lines(p):
        for r in p["checks"]:
            yield f"{r['check']}: {'pass' if r['passed'] else 'FAIL'}"
        yield f"all: {'pass' if p['all_passed'] else 'FAIL'}"

    _emit(payload, args.json, lines)
    return 0 if payload["all_passed"] else 1


def cmd_eval(args) -> int:
    system = load_file(args.file)
    if isinstance(system, Cts):
        if args.formula is None and args.depth is not None:
            from .logic import cts_logical_analysis
            _, gens = cts_logical_analysis(system, args.depth)
            n = len(system.states)
            payload = {"formulas": [
                {"formula": formula.render(),
                 "satisfied": [
                     f"{system.conditions.label(i // n)}:"
                     f"{system.states.label(i % n)}"
                     for i in range(len(system.conditions) * n)
                     if mask >> i & 1]}
                for mask, formula in gens]}
            _emit(payload, args.json,
                  lambda p: (f"{e['formula']}: " + " ".join(e["satisfied"])
                             for e in p["formulas"]))
            return 0
        if not args.formula:
            raise SchemaError("cts evaluation needs --formula or --depth")
        formula = parse_cts_formula(args.formula)
        sat = eval_cts(system, formula)
        n = len(system.states)
        payload = {
            "formula": formula.render(),
            "satisfied": [
                {"cond": system.conditions.label(k),
                 "state": system.states.label(x)}
                for k in range(len(system.conditions))
                for x in range(n)
                if sat >> (k * n + x) & 1],
        }
        _emit(payload, args.json,
              lambda p: (f"{e['cond']}:{e['state']}" for e in p["satisfied"]))
        return 0

    if isinstance(system, Lwa):
        vec = _parse_vector(system, args.vector or args.state or "")
        if args.word is not None:
            word = parse_word(system.alphabet, args.word)
            weight = lwa_trace(system, vec, word)
            payload = {"word": render_word(system.alphabet, word),
                       "weight": format_rational(weight)}
            _emit(payload, args.json,
                  lambda p: [f"{p['word']} = {p['weight']}"])
            return 0
        table = theory_word(system, vec, args.maxlen)
        payload = {"theory": {render_word(system.alphabet, w):
                              format_rational(v)
                              for w, v in sorted(table.items())}}
        _emit(payload, args.json,
              lambda p: (f"{w} = {v}" for w, v in sorted(p["theory"].items())))
        return 0

    # nda / moore
    mask = _parse_state_set(system, args.subset or args.state or "")
    if args.word is not None:
        word = parse_word(system.alphabet, args.word)
        if isinstance(system, Nda):
            verdict = eval_word_nda(system, mask, word)
            payload = {"word": render_word(system.alphabet, word),
                       "accepted": verdict}
        else:
            table = theory_word(system, mask, len(word))
            value = table[word]
            payload = {"word": render_word(system.alphabet, word),
                       "output": system.lattice.names[value]}
        _emit(payload, args.json, lambda p: [json.dumps(p, sort_keys=True)])
        return 0
    table = theory_word(system, mask, args.maxlen)
    if isinstance(system, Nda):
        shown = {render_word(system.alphabet, w): bool(v)
                 for w, v in table.items()}
    else:
        shown = {render_word(system.alphabet, w): system.lattice.names[v]
                 for w, v in table.items()}
    payload = {"theory": dict(sorted(shown.items()))}
    _emit(payload, args.json,
          lambda p: (f"{w} = {v}" for w, v in sorted(p["theory"].items())))
    return 0


def cmd_determinize(args) -> int:
    system = load_file(args.file)
    if args.direction == "backward":
        if not isinstance(system, Nda):
            raise SchemaError("backward determinization expects an nda")
        bdfa = backward_determinize(system, cap=args.cap)
        names = system.states
        payload = {
            "direction": "backward",
            "states": [subset_label(names, m)
                       for m in range(1 << len(names))],
            "transitions": [
                {"from": subset_label(names, m),
                 "action": system.alphabet.label(a),
                 "to": subset_label(names, bdfa.trans[m][a])}
                for m in range(1 << len(names))
                for a in range(len(system.alphabet))],
            "accepting": subset_label(names, bdfa.accepting),
        }
    else:
        if isinstance(system, Nda):
            build = forward_determinize
        elif isinstance(system, OutputLts):
            build = moore_determinize
        else:
            raise SchemaError("forward determinization expects nda or moore")
        n = len(system.states)
        if args.initials:
            initials = [_parse_state_set(system, s) for s in args.initials]
        else:
            if n > args.cap:
                raise CapExceeded(f"default initials need {n} <= cap {args.cap}")
            initials = range(1 << n)
        machine = build(system, initials)
        out = {}
        for i, mask in enumerate(machine.subset_states):
            if isinstance(system, OutputLts):
                out[machine.label(i)] = system.lattice.names[machine.out[i]]
            else:
                out[machine.label(i)] = bool(machine.out[i])
        payload = {
            "direction": "forward",
            "states": [machine.label(i)
                       for i in range(len(machine.subset_states))],
            "transitions": [
                {"from": machine.label(i),
                 "action": system.alphabet.label(a),
                 "to": machine.label(machine.trans[i][a])}
                for i in range(len(machine.subset_states))
                for a in range(len(system.alphabet))],
            "outputs": out,
        }
    _emit(payload, args.json,
          lambda p: (f"{t['from']} --{t['action']}--> {t['to']}"
                     for t in p["transitions"]))
    return 0


# --------------------------------------------------------------- argparser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="behaveq",
        description="behavioural equivalence toolkit for finite systems "
                    "with side effects")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true",
                       help="emit a JSON report")
        p.add_argument("--text", action="store_true",
                       help="emit a plain-text report (the default)")
        p.add_argument("--cap", type=int, default=12,
                       help="powerset size cap (default 12)")

    p = sub.add_parser("equiv", help="equivalence classes or a pairwise verdict")
    p.add_argument("file")
    p.add_argument("--pair", nargs=2, metavar="SPEC",
                   help="two subset/state/vector specs to compare")
    p.add_argument("--all", action="store_true",
                   help="classes over the full powerset (default)")
    p.add_argument("--semantics", choices=SEMANTICS,
                   help="override output semantics for bare moore inputs")
    common(p)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("quotient",
                       help="equivalence-respecting backward subautomaton")
    p.add_argument("file")
    p.add_argument("--identity-eq", action="store_true",
                   help="use the identity equivalence (full backward DFA)")
    common(p)
    p.set_defaults(fn=cmd_quotient)

    p = sub.add_parser("check", help="law suite and adequacy checks")
    p.add_argument("file", nargs="?")
    p.add_argument("--random", choices=("nda", "lwa", "cts"),
                   help="run on random instances of this family")
    p.add_argument("--kind", dest="random", choices=("nda", "lwa", "cts"),
                   help="alias for --random")
    p.add_argument("--laws", action="store_true")
    p.add_argument("--adequacy", action="store_true")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corruption",
                   help="inject a named corruption into the law suite")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("eval", help="evaluate a word or formula")
    p.add_argument("file")
    p.add_argument("--state", help="state label")
    p.add_argument("--subset", help="subset spec like '{x,y}'")
    p.add_argument("--vector", help="vector spec like '[1/2,0]'")
    p.add_argument("--word", help="word, plain or bracketed")
    p.add_argument("--formula", help="modal formula for cts inputs")
    p.add_argument("--depth", type=int,
                   help="for cts inputs: list all semantically distinct "
                        "formulas up to this box depth")
    p.add_argument("--maxlen", type=int, default=2,
                   help="table depth when no --word is given")
    common(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("determinize", help="dump a determinized machine")
    p.add_argument("file")
    p.add_argument("--direction", choices=("forward", "backward"),
                   default="forward")
    p.add_argument("--initials", nargs="*",
                   help="initial subset specs (default: full powerset)")
    common(p)
    p.set_defaults(fn=cmd_determinize)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaError, CapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
