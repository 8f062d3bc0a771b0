"""Machine descriptions: CAT, IAT and sequential transducers.

A description is either an explicit rule table (as read from JSON) or a
rule-function-backed machine produced by a builder or compiler.  Both share
the same interface: ``transition`` for CATs, ``interior``/``comm`` for IATs.

Conventions used throughout the package:

* input and output symbols are single characters, so words are ``str``;
* states are hashable values; explicit (serialized) machines use strings;
* the no-output mark is ``None`` in memory and ``"⊥"`` on disk;
* the boundary ``"#"`` is reserved and is never a state.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping

NO_OUTPUT = "⊥"
BOUNDARY = "#"
END_MARKER = "◁"

State = Hashable
Triple = tuple  # (left, self, right)


class MachineParseError(ValueError):
    """Malformed machine document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class MachineValidationError(ValueError):
    """A parsed machine violates its invariants."""

    def __init__(self, report: list["Violation"]):
        super().__init__("; ".join(str(v) for v in report[:5]))
        self.report = report


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


def _memo(spec) -> dict:
    return spec.__dict__.setdefault("_memo_table", {})


# ---------------------------------------------------------------------------
# CAT


@dataclass(frozen=True)
class CatSpec:
    """A cellular automaton transducer.

    ``delta`` maps ``(l, c, r)`` to ``(next, out)`` with ``out`` a word or
    ``None``.  With ``default_rule`` unlisted triples map to ``(c, None)``.
    A machine may instead supply ``rule``, a function computing the same pair;
    its results are memoized.  ``initial`` maps an input symbol to its initial
    cell state (identity when absent, so the symbol itself is the state).
    """

    states: frozenset | None
    accepting: frozenset | Callable[[State], bool]
    input_alphabet: tuple
    output_alphabet: frozenset
    delta: Mapping = field(default_factory=dict)
    default_rule: bool = False
    rule: Callable | None = field(default=None, compare=False)
    initial: Mapping | None = None
    name: str = ""
    info: Mapping = field(default_factory=dict, compare=False)

    def transition(self, l, c, r):
        key = (l, c, r)
        memo = _memo(self)
        try:
            return memo[key]
        except KeyError:
            pass
        if self.rule is not None:
            value = self.rule(l, c, r)
        else:
            value = self.delta.get(key)
            if value is None:
                if not self.default_rule:
                    raise KeyError(f"delta undefined on {key!r}")
                value = (c, None)
        memo[key] = value
        return value

    def initial_state(self, symbol: str):
        if self.initial is None:
            return symbol
        return self.initial[symbol]

    def is_accepting(self, s) -> bool:
        if callable(self.accepting):
            return bool(self.accepting(s))
        return s in self.accepting

    @property
    def explicit(self) -> bool:
        return self.rule is None and self.states is not None


def validate_cat(spec: CatSpec) -> list[Violation]:
    out: list[Violation] = []
    for sym in spec.output_alphabet:
        if sym == NO_OUTPUT:
            out.append(Violation("reserved", "the no-output mark is in output_alphabet"))
        elif not isinstance(sym, str) or len(sym) != 1:
            out.append(Violation("symbol", f"output symbol {sym!r} is not a single character"))
    for sym in spec.input_alphabet:
        if not isinstance(sym, str) or len(sym) != 1:
            out.append(Violation("symbol", f"input symbol {sym!r} is not a single character"))
    if spec.states is None:
        # rule-backed machine with an implicit state set: total by construction
        return out
    states = spec.states
    if BOUNDARY in states:
        out.append(Violation("boundary", "the boundary symbol is used as a state"))
    if not callable(spec.accepting):
        for s in sorted(set(spec.accepting) - set(states), key=repr):
            out.append(Violation("accepting", f"accepting state {s!r} is not a state"))
    for a in spec.input_alphabet:
        if spec.initial_state(a) not in states:
            out.append(Violation("input", f"input symbol {a!r} is not a state"))

    def check_value(key, value):
        nxt, word = value
        if nxt not in states:
            out.append(Violation("rule", f"rule {key!r} leads to unknown state {nxt!r}"))
        if word is not None:
            bad = [ch for ch in word if ch not in spec.output_alphabet]
            if bad:
                out.append(Violation("rule", f"rule {key!r} emits {word!r} outside output_alphabet"))

    ctx = set(states) | {BOUNDARY}
    if spec.rule is None:
        for key, value in spec.delta.items():
            l, c, r = key
            if l not in ctx or c not in states or r not in ctx:
                out.append(Violation("rule", f"rule {key!r} uses an unknown state"))
                continue
            check_value(key, value)
        if not spec.default_rule:
            missing = [
                (l, c, r)
                for c in states
                for l in ctx
                for r in ctx
                if (l, c, r) not in spec.delta
            ]
            for key in missing[:20]:
                out.append(Violation("totality", f"delta omits the triple {key!r}"))
            if len(missing) > 20:
                out.append(Violation("totality", f"{len(missing) - 20} further triples missing"))
    elif len(ctx) ** 2 * len(states) <= 200_000:
        for c in states:
            for l in ctx:
                for r in ctx:
                    check_value((l, c, r), spec.transition(l, c, r))
    return out


# ---------------------------------------------------------------------------
# IAT


@dataclass(frozen=True)
class IatSpec:
    """An iterative array transducer.

    ``delta_interior`` maps ``(l, c, r)`` to a state (``default_interior``
    makes unlisted triples keep ``c``).  ``delta_comm`` maps
    ``(input, own, right)`` to ``(out, next)`` and is partial: a missing
    entry halts the machine.  ``interior_rule``/``comm_rule`` are the
    function-backed alternatives; ``comm_rule`` returns ``None`` to halt.
    """

    states: frozenset | None
    accepting: frozenset | Callable[[State], bool]
    input_alphabet: tuple
    output_alphabet: frozenset
    quiescent: State
    end_marker: str = END_MARKER
    delta_interior: Mapping = field(default_factory=dict)
    delta_comm: Mapping = field(default_factory=dict)
    default_interior: bool = False
    interior_rule: Callable | None = field(default=None, compare=False)
    comm_rule: Callable | None = field(default=None, compare=False)
    name: str = ""
    info: Mapping = field(default_factory=dict, compare=False)

    def interior(self, l, c, r):
        memo = _memo(self)
        key = ("i", l, c, r)
        try:
            return memo[key]
        except KeyError:
            pass
        if self.interior_rule is not None:
            value = self.interior_rule(l, c, r)
        else:
            value = self.delta_interior.get((l, c, r))
            if value is None:
                if not self.default_interior:
                    raise KeyError(f"delta_interior undefined on {(l, c, r)!r}")
                value = c
        memo[key] = value
        return value

    def comm(self, x, own, right):
        memo = _memo(self)
        key = ("c", x, own, right)
        try:
            return memo[key]
        except KeyError:
            pass
        if self.comm_rule is not None:
            value = self.comm_rule(x, own, right)
        else:
            value = self.delta_comm.get((x, own, right))
        memo[key] = value
        return value

    def is_accepting(self, s) -> bool:
        if callable(self.accepting):
            return bool(self.accepting(s))
        return s in self.accepting

    @property
    def explicit(self) -> bool:
        return self.interior_rule is None and self.comm_rule is None and self.states is not None


def validate_iat(spec: IatSpec) -> list[Violation]:
    out: list[Violation] = []
    if spec.end_marker in spec.input_alphabet:
        out.append(Violation("end marker clash", f"end marker {spec.end_marker!r} is an input symbol"))
    for sym in spec.input_alphabet:
        if not isinstance(sym, str) or len(sym) != 1:
            out.append(Violation("symbol", f"input symbol {sym!r} is not a single character"))
    for sym in spec.output_alphabet:
        if sym == NO_OUTPUT or not isinstance(sym, str) or len(sym) != 1:
            out.append(Violation("symbol", f"output symbol {sym!r} is not a single character"))
    q = spec.quiescent
    try:
        fixed = spec.interior(q, q, q)
    except KeyError:
        fixed = None
    if fixed != q:
        out.append(Violation("quiescence", f"interior({q!r},{q!r},{q!r}) = {fixed!r}"))
    if spec.states is None:
        return out
    states = spec.states
    if q not in states:
        out.append(Violation("quiescent", f"quiescent state {q!r} is not a state"))
    if not callable(spec.accepting):
        for s in sorted(set(spec.accepting) - set(states), key=repr):
            out.append(Violation("accepting", f"accepting state {s!r} is not a state"))
    if spec.interior_rule is None:
        for key, nxt in spec.delta_interior.items():
            if any(x not in states for x in key) or nxt not in states:
                out.append(Violation("rule", f"interior rule {key!r} uses an unknown state"))
        if not spec.default_interior:
            missing = [
                (l, c, r) for l in states for c in states for r in states
                if (l, c, r) not in spec.delta_interior
            ]
            for key in missing[:20]:
                out.append(Violation("totality", f"delta_interior omits the triple {key!r}"))
    inputs = set(spec.input_alphabet) | {spec.end_marker}
    if spec.comm_rule is None:
        for key, value in spec.delta_comm.items():
            x, own, right = key
            word, nxt = value
            if x not in inputs or own not in states or right not in states or nxt not in states:
                out.append(Violation("rule", f"comm rule {key!r} uses an unknown symbol or state"))
            if any(ch not in spec.output_alphabet for ch in word):
                out.append(Violation("rule", f"comm rule {key!r} emits {word!r} outside output_alphabet"))
    return out


# ---------------------------------------------------------------------------
# sequential transducers


@dataclass(frozen=True)
class SeqRule:
    """One FST/PDT rule; ``symbol`` is ``None`` for an empty-input move."""

    state: str
    symbol: str | None
    next: str
    output: str = ""
    top: str | None = None
    push: str | None = None


@dataclass(frozen=True)
class SeqTransducerSpec:
    kind: str  # "fst" or "pdt"
    states: frozenset
    initial: str
    accepting: frozenset
    input_alphabet: tuple
    output_alphabet: frozenset
    rules: tuple
    stack_alphabet: frozenset = frozenset()
    initial_stack: str | None = None
    deterministic: bool = False
    name: str = ""

    def rules_from(self, state, symbol=..., top=...):
        for rule in self.rules:
            if rule.state != state:
                continue
            if symbol is not ... and rule.symbol != symbol:
                continue
            if top is not ... and rule.top != top:
                continue
            yield rule


def validate_seq(spec: SeqTransducerSpec) -> list[Violation]:
    out: list[Violation] = []
    if spec.kind not in ("fst", "pdt"):
        out.append(Violation("kind", f"unknown kind {spec.kind!r}"))
        return out
    if spec.initial not in spec.states:
        out.append(Violation("initial", f"initial state {spec.initial!r} is not a state"))
    for s in sorted(set(spec.accepting) - set(spec.states)):
        out.append(Violation("accepting", f"accepting state {s!r} is not a state"))
    for i, rule in enumerate(spec.rules):
        tag = f"rule {i} ({rule.state!r}, {rule.symbol!r})"
        if rule.state not in spec.states or rule.next not in spec.states:
            out.append(Violation("rule", f"{tag} uses an unknown state"))
        if rule.symbol is not None and rule.symbol not in spec.input_alphabet:
            out.append(Violation("rule", f"{tag} reads an unknown symbol"))
        if any(ch not in spec.output_alphabet for ch in rule.output):
            out.append(Violation("rule", f"{tag} emits outside output_alphabet"))
        if spec.kind == "fst":
            if rule.top is not None or rule.push is not None:
                out.append(Violation("rule", f"{tag} of an FST carries stack components"))
        else:
            if rule.top is None or rule.push is None:
                out.append(Violation("rule", f"{tag} lacks its stack field"))
                continue
            if rule.top not in spec.stack_alphabet or any(g not in spec.stack_alphabet for g in rule.push):
                out.append(Violation("rule", f"{tag} uses an unknown stack symbol"))
    if spec.kind == "pdt" and spec.initial_stack not in spec.stack_alphabet:
        out.append(Violation("stack", "initial stack symbol is not in stack_alphabet"))
    if spec.deterministic:
        seen: dict = {}
        for rule in spec.rules:
            key = (rule.state, rule.symbol, rule.top)
            if key in seen:
                out.append(Violation("determinism", f"two rules apply to {key!r}"))
            seen[key] = rule
        for state, symbol, top in list(seen):
            if symbol is None and any(
                s == state and t == top and x is not None for s, x, t in seen
            ):
                out.append(Violation("determinism", f"state {state!r} mixes empty and symbol moves on {top!r}"))
    return out


# ---------------------------------------------------------------------------
# time complexities


@dataclass(frozen=True)
class TimeComplexity:
    """``rt``/``lt`` bound; ``factor`` is the k of k*n for linear time."""

    kind: str = "rt"
    factor: Fraction = Fraction(1)
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "factor", Fraction(self.factor))
        if self.kind not in ("rt", "lt", "explicit"):
            raise ValueError(f"unknown time complexity kind {self.kind!r}")
        if self.factor < 1:
            raise ValueError("factor must be at least 1")

    @classmethod
    def parse(cls, text: str) -> "TimeComplexity":
        text = text.strip()
        if text == "rt":
            return cls("rt")
        if text == "lt":
            return cls("lt", Fraction(2))
        if text.startswith("lt:"):
            return cls("lt", Fraction(text[3:]))
        try:
            return cls("lt", Fraction(text))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse time complexity {text!r}") from None

    def bound(self, n: int, model: str = "cat") -> Fraction:
        if self.kind == "rt":
            return Fraction(n + 1 if model == "iat" else n)
        return self.factor * n + self.offset

    def __str__(self):
        if self.kind == "rt":
            return "rt"
        return f"lt:{self.factor}"


# ---------------------------------------------------------------------------
# naming and materialization


def state_name(s) -> str:
    """Printable, injective-in-practice name for an in-memory state."""
    if isinstance(s, str):
        return s
    if s is None:
        return "_"
    if isinstance(s, bool):
        return "1" if s else "0"
    if isinstance(s, (int, Fraction)):
        return str(s)
    if isinstance(s, frozenset):
        return "{" + ",".join(sorted(state_name(x) for x in s)) + "}"
    if isinstance(s, tuple):
        return "(" + ",".join(state_name(x) for x in s) + ")"
    return repr(s)


class MaterializeLimit(RuntimeError):
    """The reachable part of a rule-backed machine is too large to tabulate."""


def reachable_triples(spec: CatSpec, limit: int = 200_000):
    """Over-approximate the occurring (l, c, r) triples by pair closure.

    Tracks the set of neighbour pairs that can occur in some configuration of
    some input; the boundary behaves as a fixed point.  Sound: every triple
    seen in any run is in the result.
    """
    B = BOUNDARY

    def nxt(l, c, r):
        if c == B:
            return B
        return spec.transition(l, c, r)[0]

    init = [spec.initial_state(a) for a in spec.input_alphabet]
    succ: dict = {B: set()}
    pred: dict = {B: set()}
    pairs: set = set()
    work: list = []

    def add(x, y):
        if (x, y) in pairs:
            return
        pairs.add((x, y))
        if len(pairs) > limit:
            raise MaterializeLimit(f"more than {limit} reachable neighbour pairs")
        succ.setdefault(x, set()).add(y)
        pred.setdefault(y, set()).add(x)
        succ.setdefault(y, set())
        pred.setdefault(x, set())
        work.append((x, y))

    for a in init:
        add(B, a)
        add(a, B)
        for b in init:
            add(a, b)
    while work:
        x, y = work.pop()
        # the pair in the middle of a quadruple w x y z
        for w in list(pred[x]):
            for z in list(succ[y]):
                add(nxt(w, x, y), nxt(x, y, z))
        # on the left: x y z u
        for z in list(succ[y]):
            for u in list(succ[z]):
                add(nxt(x, y, z), nxt(y, z, u))
        # on the right: v w x y
        for w in list(pred[x]):
            for v in list(pred[w]):
                add(nxt(v, w, x), nxt(w, x, y))
    triples = set()
    for c in succ:
        if c == B:
            continue
        for l in pred[c]:
            for r in succ[c]:
                triples.add((l, c, r))
    return triples


def materialize(spec: CatSpec, limit: int = 200_000) -> CatSpec:
    """Tabulate a rule-backed CAT over the states reachable from inputs.

    States are renamed to strings; initial states take their input symbol as
    name.  Triples that never occur keep the default rule.
    """
    if spec.explicit and all(isinstance(s, str) for s in spec.states):
        return spec
    triples = reachable_triples(spec, limit)
    names: dict = {}
    for a in spec.input_alphabet:
        s0 = spec.initial_state(a)
        if s0 in names and names[s0] != a:
            raise MaterializeLimit(f"input symbols {names[s0]!r} and {a!r} share an initial state")
        names[s0] = a
    taken = set(names.values())

    def name(s):
        if s == BOUNDARY:
            return BOUNDARY
        if s not in names:
            text = state_name(s)
            while text in taken or text == BOUNDARY:
                text = text + "'"
            names[s] = text
            taken.add(text)
        return names[s]

    delta = {}
    states = set()
    for l, c, r in sorted(triples, key=repr):
        nxt, out = spec.transition(l, c, r)
        states.add(name(c))
        states.add(name(nxt))
        if nxt == c and out is None:
            continue
        delta[(name(l), name(c), name(r))] = (name(nxt), out)
    for a in spec.input_alphabet:
        states.add(a)
    accepting = frozenset(names[s] for s in names if s != BOUNDARY and spec.is_accepting(s) and names[s] in states)
    return CatSpec(
        states=frozenset(states),
        accepting=accepting,
        input_alphabet=tuple(spec.input_alphabet),
        output_alphabet=frozenset(spec.output_alphabet),
        delta=delta,
        default_rule=True,
        name=spec.name,
    )


# ---------------------------------------------------------------------------
# canonical JSON format

_CAT_FIELDS = {"kind", "name", "states", "accepting", "input_alphabet", "output_alphabet",
               "boundary", "delta", "default_rule"}
_IAT_FIELDS = {"kind", "name", "states", "accepting", "input_alphabet", "output_alphabet",
               "quiescent", "end_marker", "delta_interior", "delta_comm", "default_interior"}
_SEQ_FIELDS = {"kind", "name", "states", "initial", "accepting", "input_alphabet",
               "output_alphabet", "rules", "stack_alphabet", "initial_stack", "deterministic"}
_REF_FIELDS = {"kind", "name", "construction"}


def _out_word(w):
    return NO_OUTPUT if w is None else w


def _require_str_states(spec):
    if spec.states is None or not all(isinstance(s, str) for s in spec.states):
        raise MachineParseError("only machines with named states can be serialized; materialize first")


def machine_to_dict(spec) -> dict:
    if isinstance(spec, CatSpec) and "construction" in spec.info and not spec.explicit:
        return {"kind": "cat", "name": spec.name, "construction": spec.info["construction"]}
    if isinstance(spec, IatSpec) and "construction" in spec.info and not spec.explicit:
        return {"kind": "iat", "name": spec.name, "construction": spec.info["construction"]}
    if isinstance(spec, CatSpec):
        spec = materialize(spec)
        return {
            "kind": "cat",
            "name": spec.name,
            "states": sorted(spec.states),
            "accepting": sorted(spec.accepting),
            "input_alphabet": list(spec.input_alphabet),
            "output_alphabet": sorted(spec.output_alphabet),
            "boundary": BOUNDARY,
            "default_rule": spec.default_rule,
            "delta": [
                {"l": l, "c": c, "r": r, "next": nxt, "out": _out_word(w)}
                for (l, c, r), (nxt, w) in sorted(spec.delta.items())
            ],
        }
    if isinstance(spec, IatSpec):
        _require_str_states(spec)
        if not spec.explicit:
            raise MachineParseError("rule-backed IATs without a construction record cannot be serialized")
        return {
            "kind": "iat",
            "name": spec.name,
            "states": sorted(spec.states),
            "accepting": sorted(spec.accepting),
            "input_alphabet": list(spec.input_alphabet),
            "output_alphabet": sorted(spec.output_alphabet),
            "quiescent": spec.quiescent,
            "end_marker": spec.end_marker,
            "default_interior": spec.default_interior,
            "delta_interior": [
                {"l": l, "c": c, "r": r, "next": nxt}
                for (l, c, r), nxt in sorted(spec.delta_interior.items())
            ],
            "delta_comm": [
                {"input": x, "c": own, "r": right, "next": nxt, "out": w}
                for (x, own, right), (w, nxt) in sorted(spec.delta_comm.items())
            ],
        }
    if isinstance(spec, SeqTransducerSpec):
        doc = {
            "kind": spec.kind,
            "name": spec.name,
            "states": sorted(spec.states),
            "initial": spec.initial,
            "accepting": sorted(spec.accepting),
            "input_alphabet": list(spec.input_alphabet),
            "output_alphabet": sorted(spec.output_alphabet),
            "deterministic": spec.deterministic,
            "rules": [],
        }
        for rule in spec.rules:
            entry = {"state": rule.state, "input": rule.symbol or "", "next": rule.next, "out": rule.output}
            if spec.kind == "pdt":
                entry["top"] = rule.top
                entry["push"] = list(rule.push) if rule.push is not None else None
            doc["rules"].append(entry)
        if spec.kind == "pdt":
            doc["stack_alphabet"] = sorted(spec.stack_alphabet)
            doc["initial_stack"] = spec.initial_stack
        return doc
    raise TypeError(f"not a machine: {type(spec).__name__}")


def serialize_machine(spec) -> bytes:
    return (json.dumps(machine_to_dict(spec), ensure_ascii=False, indent=1) + "\n").encode("utf-8")


def _names(doc, key, where="document"):
    value = doc.get(key, [])
    if not isinstance(value, list) or not all(isinstance(x, str) and x for x in value):
        raise MachineParseError(f"{where}: field {key!r} must be a list of non-empty strings")
    seen = set()
    for x in value:
        if x in seen:
            raise MachineParseError(f"{where}: duplicate name {x!r} in {key!r}")
        seen.add(x)
    return value


def _check_fields(doc, allowed, where):
    unknown = set(doc) - allowed
    if unknown:
        raise MachineParseError(f"{where}: unknown field(s) {sorted(unknown)}")


def _word(value, where):
    if value == NO_OUTPUT:
        return None
    if not isinstance(value, str):
        raise MachineParseError(f"{where}: output must be a string or {NO_OUTPUT!r}")
    return value


def machine_from_dict(doc: Any):
    if not isinstance(doc, dict):
        raise MachineParseError("top level must be an object")
    kind = doc.get("kind")
    if "construction" in doc:
        _check_fields(doc, _REF_FIELDS, "document")
        from .compilers import rebuild

        return rebuild(kind, doc["construction"])
    if kind == "cat":
        _check_fields(doc, _CAT_FIELDS, "cat document")
        if doc.get("boundary", BOUNDARY) != BOUNDARY:
            raise MachineParseError(f"boundary must be {BOUNDARY!r}")
        states = _names(doc, "states")
        delta = {}
        for i, e in enumerate(doc.get("delta", [])):
            where = f"delta entry {i}"
            if not isinstance(e, dict):
                raise MachineParseError(f"{where} must be an object")
            _check_fields(e, {"l", "c", "r", "next", "out"}, where)
            try:
                key = (e["l"], e["c"], e["r"])
                value = (e["next"], _word(e["out"], where))
            except KeyError as err:
                raise MachineParseError(f"{where} lacks field {err.args[0]!r}") from None
            if key in delta:
                raise MachineParseError(f"{where}: duplicate rule for {key!r}")
            delta[key] = value
        return CatSpec(
            states=frozenset(states),
            accepting=frozenset(_names(doc, "accepting")),
            input_alphabet=tuple(_names(doc, "input_alphabet")),
            output_alphabet=frozenset(_names(doc, "output_alphabet")),
            delta=delta,
            default_rule=bool(doc.get("default_rule", False)),
            name=doc.get("name", ""),
        )
    if kind == "iat":
        _check_fields(doc, _IAT_FIELDS, "iat document")
        states = _names(doc, "states")
        interior = {}
        for i, e in enumerate(doc.get("delta_interior", [])):
            where = f"delta_interior entry {i}"
            _check_fields(e, {"l", "c", "r", "next"}, where)
            try:
                key = (e["l"], e["c"], e["r"])
                nxt = e["next"]
            except KeyError as err:
                raise MachineParseError(f"{where} lacks field {err.args[0]!r}") from None
            if key in interior:
                raise MachineParseError(f"{where}: duplicate rule for {key!r}")
            interior[key] = nxt
        comm = {}
        for i, e in enumerate(doc.get("delta_comm", [])):
            where = f"delta_comm entry {i}"
            _check_fields(e, {"input", "c", "r", "next", "out"}, where)
            try:
                key = (e["input"], e["c"], e["r"])
                value = (e["out"], e["next"])
            except KeyError as err:
                raise MachineParseError(f"{where} lacks field {err.args[0]!r}") from None
            if key in comm:
                raise MachineParseError(f"{where}: duplicate rule for {key!r}")
            comm[key] = value
        if "quiescent" not in doc:
            raise MachineParseError("iat document lacks 'quiescent'")
        return IatSpec(
            states=frozenset(states),
            accepting=frozenset(_names(doc, "accepting")),
            input_alphabet=tuple(_names(doc, "input_alphabet")),
            output_alphabet=frozenset(_names(doc, "output_alphabet")),
            quiescent=doc["quiescent"],
            end_marker=doc.get("end_marker", END_MARKER),
            delta_interior=interior,
            delta_comm=comm,
            default_interior=bool(doc.get("default_interior", False)),
            name=doc.get("name", ""),
        )
    if kind in ("fst", "pdt"):
        _check_fields(doc, _SEQ_FIELDS, f"{kind} document")
        rules = []
        for i, e in enumerate(doc.get("rules", [])):
            where = f"rule {i}"
            if not isinstance(e, dict):
                raise MachineParseError(f"{where} must be an object")
            allowed = {"state", "input", "next", "out"} | ({"top", "push"} if kind == "pdt" else set())
            _check_fields(e, allowed, where)
            try:
                state, symbol, nxt = e["state"], e["input"], e["next"]
            except KeyError as err:
                raise MachineParseError(f"{where} lacks field {err.args[0]!r}") from None
            top = push = None
            if kind == "pdt":
                if "top" not in e or "push" not in e or e["top"] is None or e["push"] is None:
                    raise MachineParseError(f"{where} ({state!r}, {symbol!r}) lacks its stack field")
                top = e["top"]
                push = e["push"]
                push = "".join(push) if isinstance(push, list) else push
            rules.append(SeqRule(state, symbol or None, nxt, e.get("out", ""), top, push))
        if "initial" not in doc:
            raise MachineParseError(f"{kind} document lacks 'initial'")
        return SeqTransducerSpec(
            kind=kind,
            states=frozenset(_names(doc, "states")),
            initial=doc["initial"],
            accepting=frozenset(_names(doc, "accepting")),
            input_alphabet=tuple(_names(doc, "input_alphabet")),
            output_alphabet=frozenset(_names(doc, "output_alphabet")),
            rules=tuple(rules),
            stack_alphabet=frozenset(_names(doc, "stack_alphabet")) if kind == "pdt" else frozenset(),
            initial_stack=doc.get("initial_stack"),
            deterministic=bool(doc.get("deterministic", False)),
            name=doc.get("name", ""),
        )
    raise MachineParseError(f"unknown machine kind {kind!r}")


def validate(spec) -> list[Violation]:
    if isinstance(spec, CatSpec):
        return validate_cat(spec)
    if isinstance(spec, IatSpec):
        return validate_iat(spec)
    return validate_seq(spec)


def parse_machine(document: bytes | str, check: bool = True):
    """Parse a canonical JSON machine; raise on syntax or (optionally) invariants."""
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as err:
            raise MachineParseError(f"document is not UTF-8: {err}") from None
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as err:
        raise MachineParseError(err.msg, err.lineno, err.colno) from None
    spec = machine_from_dict(doc)
    if check:
        report = validate(spec)
        if report:
            raise MachineValidationError(report)
    return spec


def load_machine(path: str, check: bool = True):
    with open(path, "rb") as fh:
        return parse_machine(fh.read(), check=check)


def iter_words(alphabet: Iterable[str], max_len: int, min_len: int = 1):
    """All words over ``alphabet`` with lengths in [min_len, max_len], shortlex."""
    import itertools

    letters = sorted(alphabet)
    for n in range(min_len, max_len + 1):
        for tup in itertools.product(letters, repeat=n):
            yield "".join(tup)
