"""Reference oracles, exhaustive equivalence checks and time measurement."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .engine import EngineError, default_cap, run_machine
from .machine import CatSpec, IatSpec, SeqTransducerSpec, TimeComplexity, iter_words

DEFAULT_SEED = 20240917

# bounds that deliberately differ from the machine's nominal class
RELAXED_BOUNDS = {
    "square_marker": ("lt:2", "rt", "acceptance of {ww} runs in linear time (2n) instead of real time"),
}


class OracleError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# oracles


def oracle_fst_all_paths(spec: SeqTransducerSpec, word: str) -> set:
    """Outputs of all accepting paths of an FST (λ-moves allowed, λ-cycles cut)."""
    if spec.kind != "fst":
        raise ValueError("oracle_fst_all_paths needs an fst")
    n = len(word)
    outs = set()
    limit = len(spec.states) + 1
    stack = [(spec.initial, 0, "", 0)]
    seen = set()
    while stack:
        q, i, out, lam = stack.pop()
        key = (q, i, out)
        if key in seen:
            continue
        seen.add(key)
        if i == n and q in spec.accepting:
            outs.add(out)
        for rule in spec.rules_from(q):
            if rule.symbol is None:
                if lam < limit:
                    stack.append((rule.next, i, out + rule.output, lam + 1))
            elif i < n and rule.symbol == word[i]:
                stack.append((rule.next, i + 1, out + rule.output, 0))
    return outs


def run_dpdt(spec: SeqTransducerSpec, word: str):
    """Deterministic replay: (accepted, output, configurations)."""
    if spec.kind != "pdt":
        raise ValueError("run_dpdt needs a pdt")
    table = {(r.state, r.symbol, r.top): r for r in spec.rules}
    limit = len(spec.states) * max(1, len(spec.stack_alphabet)) + 1
    state = spec.initial
    stack = spec.initial_stack or ""
    out = []
    confs = [(state, 0, stack)]

    def closure():
        nonlocal state, stack
        steps = 0
        while stack and (state, None, stack[0]) in table:
            rule = table[(state, None, stack[0])]
            state, stack = rule.next, rule.push + stack[1:]
            out.append(rule.output)
            steps += 1
            if steps > limit:
                raise OracleError(f"λ-loop in {spec.name or 'pdt'} on {word!r}")

    closure()
    for i, a in enumerate(word):
        rule = table.get((state, a, stack[0])) if stack else None
        if rule is None:
            return False, None, confs
        state, stack = rule.next, rule.push + stack[1:]
        out.append(rule.output)
        closure()
        confs.append((state, i + 1, stack))
    accepted = state in spec.accepting
    return accepted, ("".join(out) if accepted else None), confs


def oracle_dpdt(spec: SeqTransducerSpec, word: str):
    """Output of a deterministic PDT, or None when it rejects."""
    return run_dpdt(spec, word)[1]


def _sort(w):
    return "a" * w.count("a") + "b" * w.count("b")


def _square(w):
    n = len(w)
    if n % 2 or w[: n // 2] != w[n // 2:]:
        return None
    return w[: n // 2] + "c" * (n // 2)


_FUNCTIONS = {
    "copy": lambda w: w + w,
    "sort": _sort,
    "reverse": lambda w: w[::-1],
    "square_marker": _square,
}


def oracle_function(name: str) -> Callable:
    try:
        return _FUNCTIONS[name]
    except KeyError:
        raise KeyError(f"unknown oracle {name!r}; choose from {sorted(_FUNCTIONS)}") from None


def check_single_valued(spec: SeqTransducerSpec, max_len: int):
    """Shortlex-first word with two distinct outputs, or None."""
    for w in iter_words(spec.input_alphabet, max_len):
        if len(oracle_fst_all_paths(spec, w)) > 1:
            return w
    return None


def make_oracle(ref) -> Callable:
    """A word -> output-or-None function from a name, a sequential machine or a machine."""
    if callable(ref) and not isinstance(ref, (CatSpec, IatSpec, SeqTransducerSpec)):
        return ref
    if isinstance(ref, str):
        return oracle_function(ref)
    if isinstance(ref, SeqTransducerSpec):
        if ref.kind == "pdt":
            return lambda w: oracle_dpdt(ref, w)

        def fst(w):
            outs = oracle_fst_all_paths(ref, w)
            if len(outs) > 1:
                raise OracleError(f"{ref.name or 'fst'} is not single-valued on {w!r}")
            return next(iter(outs)) if outs else None

        return fst
    if isinstance(ref, (CatSpec, IatSpec)):
        return lambda w: run_machine(ref, w, step_cap(ref, len(w)), keep=False).final_output
    raise TypeError(f"cannot use {type(ref).__name__} as an oracle")


def step_cap(machine, n: int) -> int:
    cap = getattr(machine, "info", {}).get("step_cap")
    return cap(n) if cap is not None else default_cap(n)


# ---------------------------------------------------------------------------
# equivalence


@dataclass
class EquivalenceReport:
    verdict: str  # "pass" or "fail"
    counterexample: str | None = None
    reason: str = ""
    words_checked: int = 0
    timing: dict = field(default_factory=dict)  # n -> (max t_i/n, max t_o/n)
    bounds: tuple | None = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "counterexample": self.counterexample,
            "reason": self.reason,
            "words_checked": self.words_checked,
            "timing": {str(n): list(v) for n, v in sorted(self.timing.items())},
            "bounds": list(self.bounds) if self.bounds else None,
            "notes": list(self.notes),
        }

    def text(self) -> str:
        lines = [f"verdict: {self.verdict}", f"words checked: {self.words_checked}"]
        if self.counterexample is not None:
            lines.append(f"counterexample: {self.counterexample!r} ({self.reason})")
        if self.bounds:
            lines.append(f"bounds: t_i <= {self.bounds[0]}, t_o <= {self.bounds[1]}")
        for n, (ti, to) in sorted(self.timing.items()):
            lines.append(f"  n={n}: max t_i/n={ti:.3f} max t_o/n={to:.3f}")
        lines.extend(f"note: {x}" for x in self.notes)
        return "\n".join(lines)


def _kind(machine):
    return "cat" if isinstance(machine, CatSpec) else "iat"


def equiv_check(
    machine,
    oracle,
    alphabet=None,
    max_len: int = 10,
    ti: TimeComplexity | str | None = None,
    to: TimeComplexity | str | None = None,
    cap: Callable | None = None,
) -> EquivalenceReport:
    """Compare machine and oracle on every word of length 1..max_len in shortlex order.

    An oracle rejection agrees with a run that never accepts; a run that ends
    incomplete while the oracle produces an output is a failure.  With ``ti``
    or ``to`` the measured times must also meet those bounds.
    """
    fn = make_oracle(oracle)
    alphabet = tuple(alphabet if alphabet is not None else machine.input_alphabet)
    ti = TimeComplexity.parse(ti) if isinstance(ti, str) else ti
    to = TimeComplexity.parse(to) if isinstance(to, str) else to
    kind = _kind(machine)
    report = EquivalenceReport("pass", bounds=(str(ti), str(to)) if (ti or to) else None)
    relaxed = RELAXED_BOUNDS.get(getattr(machine, "name", ""))
    if relaxed and ti is not None and str(ti) == relaxed[0]:
        report.notes.append(f"relaxed bound for {machine.name}: t_i <= {relaxed[0]} ({relaxed[2]})")
    for w in iter_words(alphabet, max_len):
        n = len(w)
        report.words_checked += 1
        expected = fn(w)
        limit = cap(n) if cap is not None else step_cap(machine, n)
        try:
            trace = run_machine(machine, w, limit, keep=False)
        except (EngineError, KeyError) as exc:
            return _fail(report, w, f"run failed: {exc}")
        if expected is None:
            if trace.accepted:
                return _fail(report, w, "oracle rejects, machine accepts")
            continue
        if trace.incomplete or not trace.success:
            why = "incomplete run" if trace.incomplete else "machine rejects"
            return _fail(report, w, f"{why}, oracle outputs {expected!r}")
        if trace.final_output != expected:
            return _fail(report, w, f"output {trace.final_output!r} != {expected!r}")
        t_i, t_o = trace.accept_time, trace.output_complete_time
        if ti is not None and t_i > ti.bound(n, kind):
            return _fail(report, w, f"t_i={t_i} exceeds {ti}")
        if to is not None and t_o > to.bound(n, kind):
            return _fail(report, w, f"t_o={t_o} exceeds {to}")
        old = report.timing.get(n, (0.0, 0.0))
        report.timing[n] = (max(old[0], t_i / n), max(old[1], t_o / n))
    return report


def _fail(report, word, reason):
    report.verdict = "fail"
    report.counterexample = word
    report.reason = reason
    return report


# ---------------------------------------------------------------------------
# timing


@dataclass
class ComplexityProfile:
    per_length: dict  # n -> (max t_i, max t_o, words)
    seed: int
    kind: str

    def max_ratio(self):
        ti = max((v[0] / n for n, v in self.per_length.items() if v[0] is not None), default=0.0)
        to = max((v[1] / n for n, v in self.per_length.items() if v[1] is not None), default=0.0)
        return ti, to

    def within(self, ti: TimeComplexity, to: TimeComplexity) -> bool:
        for n, (a, b, _) in self.per_length.items():
            if a is not None and a > ti.bound(n, self.kind):
                return False
            if b is not None and b > to.bound(n, self.kind):
                return False
        return True

    def classify(self) -> tuple:
        """Smallest of rt or lt:k (integer k) covering the measurements."""
        out = []
        for idx in (0, 1):
            worst = 0.0
            rt_ok = True
            for n, v in self.per_length.items():
                if v[idx] is None:
                    continue
                rt = n if self.kind == "cat" else n + 1
                rt_ok = rt_ok and v[idx] <= rt
                worst = max(worst, v[idx] / n)
            out.append("rt" if rt_ok else f"lt:{max(1, -(-worst // 1)):.0f}")
        return tuple(out)


def measure_complexity(
    machine,
    alphabet=None,
    lengths=range(2, 41),
    exhaustive_up_to: int = 10,
    samples: int = 30,
    seed: int = DEFAULT_SEED,
    words: Callable | None = None,
    cap: Callable | None = None,
) -> ComplexityProfile:
    """Worst accept and completion times per length over accepted words.

    Lengths up to ``exhaustive_up_to`` are enumerated; longer ones are sampled
    with a fixed seed.  ``words(n, rng)`` may supply the sample words instead
    (handy for machines accepting few words).
    """
    rng = random.Random(seed)
    alphabet = tuple(alphabet if alphabet is not None else machine.input_alphabet)
    prof = {}
    for n in lengths:
        if words is not None:
            batch = words(n, rng)
        elif n <= exhaustive_up_to:
            batch = list(iter_words(alphabet, n, n))
        else:
            batch = ["".join(rng.choice(alphabet) for _ in range(n)) for _ in range(samples)]
        ti = to = None
        for w in batch:
            limit = cap(n) if cap is not None else step_cap(machine, n)
            trace = run_machine(machine, w, limit, keep=False)
            if not trace.success:
                continue
            ti = trace.accept_time if ti is None else max(ti, trace.accept_time)
            to = trace.output_complete_time if to is None else max(to, trace.output_complete_time)
        prof[n] = (ti, to, len(batch))
    return ComplexityProfile(prof, seed, _kind(machine))
