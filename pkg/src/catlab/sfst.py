"""Single-valued finite-state transducers compiled into real-time CATs.

Pipeline: the input projection of the FST is an NFA; its powerset DFA decides
acceptance in cell 1 while the input is shifted left.  The NFA also yields a
right-linear grammar whose V-sets (nonterminals deriving each suffix) are
computed two per step by a wave from the right end on a right-shifted copy of
the input.  A signal R leaves the centre and reads the accepting derivation off
the V-sets, two productions per step; each production travels left and reaches
its cell exactly at step n, when a two-general synchronization fires and every
cell emits the output word of its production.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .fssp import UNSTARTED, build_sync, is_fire
from .machine import BOUNDARY, END_MARKER, CatSpec, SeqTransducerSpec, machine_to_dict

AXIOM = "X"
_SYNC = build_sync("two-general")


class PreconditionError(ValueError):
    """The source machine violates a precondition of the construction."""


class ExtractionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# automata


@dataclass(frozen=True)
class NFA:
    states: frozenset
    alphabet: tuple
    initial: frozenset
    accepting: frozenset
    transitions: dict = field(compare=False)  # (q, a) -> frozenset of q'

    def step(self, qs, a):
        out = set()
        for q in qs:
            out |= self.transitions.get((q, a), frozenset())
        return frozenset(out)

    def accepts(self, word: str) -> bool:
        qs = self.initial
        for a in word:
            qs = self.step(qs, a)
        return bool(qs & self.accepting)


@dataclass(frozen=True)
class DFA:
    states: frozenset
    alphabet: tuple
    initial: frozenset
    accepting: frozenset
    delta: dict = field(compare=False)  # (subset, a) -> subset

    def run(self, word: str):
        q = self.initial
        for a in word:
            q = self.delta[(q, a)]
        return q

    def accepts(self, word: str) -> bool:
        return self.run(word) in self.accepting


def _require_lambda_free(spec: SeqTransducerSpec):
    if spec.kind != "fst":
        raise PreconditionError(f"expected an fst, got {spec.kind!r}")
    for i, rule in enumerate(spec.rules):
        if rule.symbol is None:
            raise PreconditionError(
                f"rule {i} ({rule.state} -> {rule.next}) reads no input; the construction needs a λ-free transducer"
            )


def extract_nfa(spec: SeqTransducerSpec) -> NFA:
    """Input projection of a λ-free FST."""
    _require_lambda_free(spec)
    trans: dict = {}
    for rule in spec.rules:
        trans.setdefault((rule.state, rule.symbol), set()).add(rule.next)
    return NFA(
        frozenset(spec.states),
        tuple(spec.input_alphabet),
        frozenset({spec.initial}),
        frozenset(spec.accepting),
        {k: frozenset(v) for k, v in trans.items()},
    )


def powerset_dfa(nfa: NFA) -> DFA:
    """Subset construction over the subsets reachable from the initial set."""
    start = nfa.initial
    seen = {start}
    todo = [start]
    delta = {}
    while todo:
        qs = todo.pop()
        for a in nfa.alphabet:
            nxt = nfa.step(qs, a)
            delta[(qs, a)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    accepting = frozenset(s for s in seen if s & nfa.accepting)
    return DFA(frozenset(seen), nfa.alphabet, start, accepting, delta)


# ---------------------------------------------------------------------------
# right-linear grammar


class Production(NamedTuple):
    lhs: object  # AXIOM or ("q", state)
    symbol: str
    rhs: object  # nonterminal, or None for a terminal production
    output: str
    rule: int  # index of the originating transducer rule


def nonterminal(q):
    return ("q", q)


@dataclass
class RightLinearGrammar:
    nonterminals: frozenset
    productions: tuple
    axiom: str = AXIOM

    def __post_init__(self):
        self._by = {}
        for p in self.productions:
            self._by.setdefault((p.lhs, p.symbol), []).append(p)
        for ps in self._by.values():
            ps.sort(key=_prod_key)

    def candidates(self, lhs, symbol, targets):
        """Productions lhs -> symbol Z with Z in targets (terminal ones when targets is None)."""
        out = []
        for p in self._by.get((lhs, symbol), ()):
            if targets is None:
                if p.rhs is None:
                    out.append(p)
            elif p.rhs is not None and p.rhs in targets:
                out.append(p)
        return out

    def derives(self, word: str) -> bool:
        return AXIOM in vsets(self, word)[0]


def _prod_key(p):
    return (repr(p.rhs), p.rule, p.output)


def to_grammar(spec_or_nfa, spec: SeqTransducerSpec | None = None) -> RightLinearGrammar:
    """Grammar with productions X -> a[q'], [q] -> a[q'] and [q] -> a.

    Accepts the FST itself (so productions carry output words) or an NFA
    (outputs are then empty).
    """
    if isinstance(spec_or_nfa, SeqTransducerSpec):
        fst = spec_or_nfa
        _require_lambda_free(fst)
        rules = [(i, r.state, r.symbol, r.next, r.output) for i, r in enumerate(fst.rules)]
        initial = {fst.initial}
        accepting = frozenset(fst.accepting)
        states = frozenset(fst.states)
    else:
        nfa = spec_or_nfa
        rules = []
        for (q, a), targets in sorted(nfa.transitions.items(), key=repr):
            for q2 in sorted(targets, key=repr):
                rules.append((len(rules), q, a, q2, ""))
        initial = set(nfa.initial)
        accepting = nfa.accepting
        states = nfa.states
    prods = []
    for i, q, a, q2, out in rules:
        if q in initial:
            prods.append(Production(AXIOM, a, nonterminal(q2), out, i))
            if q2 in accepting:
                prods.append(Production(AXIOM, a, None, out, i))
        prods.append(Production(nonterminal(q), a, nonterminal(q2), out, i))
        if q2 in accepting:
            prods.append(Production(nonterminal(q), a, None, out, i))
    nts = frozenset({AXIOM} | {nonterminal(q) for q in states})
    return RightLinearGrammar(nts, tuple(prods))


def vstep(grammar: RightLinearGrammar, symbol: str, following) -> frozenset:
    """V_i from a_i and V_{i+1}; ``following`` is None at the last position."""
    out = set()
    for p in grammar.productions:
        if p.symbol != symbol:
            continue
        if following is None:
            if p.rhs is None:
                out.add(p.lhs)
        elif p.rhs is not None and p.rhs in following:
            out.add(p.lhs)
    return frozenset(out)


def vsets(grammar: RightLinearGrammar, word: str) -> list:
    """[V_1, ..., V_n], computed right to left."""
    if not word:
        raise ValueError("vsets needs a non-empty word")
    out = [None] * len(word)
    following = None
    for i in range(len(word) - 1, -1, -1):
        following = out[i] = vstep(grammar, word[i], following)
    return out


def extract_unique_path(grammar: RightLinearGrammar, word: str, vs: list | None = None) -> list:
    """Productions p_1..p_n of the unique derivation of word."""
    vs = vsets(grammar, word) if vs is None else vs
    path = []
    lhs = AXIOM
    n = len(word)
    for i in range(n):
        targets = vs[i + 1] if i + 1 < n else None
        cands = grammar.candidates(lhs, word[i], targets)
        if not cands:
            raise ExtractionError(f"not accepted: no production at position {i + 1} of {word!r}")
        if len(cands) > 1:
            raise ExtractionError(f"ambiguous source: {len(cands)} productions at position {i + 1} of {word!r}")
        path.append(cands[0])
        lhs = cands[0].rhs
    return path


# ---------------------------------------------------------------------------
# the CAT


class SfstCell(NamedTuple):
    lreg: str  # input shifted left (DFA track)
    dfa: object  # DFA state, meaningful in cell 1
    acc: bool
    rreg: str | None  # input shifted right (V-set track)
    first: str | None  # the symbol held at the previous step was a_1
    pair: tuple | None  # (a_i, V_i, a_i+1, V_i+1); a_i None for a lone V_1
    fresh: bool  # pair computed at this step
    chain: object  # nonterminal reached after the cell's productions
    rsig: bool  # signal R is here
    lane: Production | None  # production travelling left
    sync: object


def compile_sfst_to_cat(spec: SeqTransducerSpec, sv_check_len: int | None = 10) -> CatSpec:
    """A CAT_{rt,rt} computing T(spec) for a λ-free single-valued FST."""
    _require_lambda_free(spec)
    if sv_check_len:
        from .harness import check_single_valued

        witness = check_single_valued(spec, sv_check_len)
        if witness is not None:
            raise PreconditionError(f"not single-valued: {witness!r} has several outputs")
    nfa = extract_nfa(spec)
    dfa = powerset_dfa(nfa)
    grammar = to_grammar(spec)
    vcache: dict = {}

    def V(symbol, following):
        key = (symbol, following)
        v = vcache.get(key)
        if v is None:
            v = vcache[key] = vstep(grammar, symbol, following)
        return v

    def choose(lhs, symbol, targets):
        if lhs is None:
            return None
        cands = grammar.candidates(lhs, symbol, targets)
        return cands[0] if cands else None

    def view(s):
        if isinstance(s, str):
            return SfstCell(s, dfa.initial, False, s, None, None, False, None, False, None, UNSTARTED), True
        return s, False

    def rule(l, c, r):
        v, raw = view(c)
        lv = None if l == BOUNDARY else view(l)[0]
        rv = None if r == BOUNDARY else view(r)[0]
        # track 1: left shift and the DFA in cell 1
        lreg = rv.lreg if rv is not None else END_MARKER
        dfa_state, acc = v.dfa, v.acc
        if lv is None and v.lreg != END_MARKER:
            dfa_state = dfa.delta[(v.dfa, v.lreg)]
            if rv is None or rv.lreg == END_MARKER:
                acc = acc or dfa_state in dfa.accepting
        # track 2: right shift, V-set wave
        rreg = lv.rreg if lv is not None else None
        first = v.rreg if v.rreg is not None and (lv is None or lv.rreg is None) else None
        pair, fresh = v.pair, False
        if pair is None and v.rreg is not None and (rv is None or rv.fresh):
            a2 = v.rreg
            a1 = lv.rreg if lv is not None else None
            following = rv.pair[1] if rv is not None else None
            v2 = V(a2, following)
            v1 = V(a1, v2) if a1 is not None else None
            pair, fresh = (a1, v1, a2, v2), True
        # track 3: path extraction
        chain, rsig, lane = v.chain, False, None
        centre_odd = fresh and pair[0] is None
        centre_even = v.fresh and lv is not None and lv.first is not None
        if (lv is not None and lv.rsig) or centre_odd or centre_even:
            lhs = lv.chain if (lv is not None and lv.rsig) else AXIOM
            a1, _, a2, v2 = pair
            if a1 is not None:
                p1 = choose(lhs, a1, v2)
                lhs = p1.rhs if p1 is not None else None
            following = rv.pair[1] if rv is not None else None
            lane = choose(lhs, a2, following)
            chain = lane.rhs if lane is not None else None
            rsig = True
        elif rv is not None and rv.pair is not None and (v.rsig or (v.first is not None and rv.fresh)):
            # the right neighbour takes R over; this cell supplies the first production of its pair
            lhs = v.chain if v.rsig else AXIOM
            b1, _, _, w2 = rv.pair
            lane = choose(lhs, b1, w2)
        if lane is None and rv is not None:
            lane = rv.lane
        # track 4: synchronization and emission
        sync = _SYNC.transition(
            BOUNDARY if lv is None else lv.sync, v.sync, BOUNDARY if rv is None else rv.sync
        )
        out = None
        if is_fire(sync) and not is_fire(v.sync):
            out = lane.output if lane is not None else ""
        return SfstCell(lreg, dfa_state, acc, rreg, first, pair, fresh, chain, rsig, lane, sync), out

    cat = CatSpec(
        states=None,
        accepting=lambda s: not isinstance(s, str) and s.acc,
        input_alphabet=tuple(spec.input_alphabet),
        output_alphabet=frozenset(spec.output_alphabet),
        rule=rule,
        name=f"cat({spec.name or 'sfst'})",
        info={"construction": {"compiler": "sfst", "source": machine_to_dict(spec)}, "source": spec, "dfa": dfa, "grammar": grammar},
    )
    return cat
