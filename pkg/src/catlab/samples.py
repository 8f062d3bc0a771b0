"""Small explicit sample machines used by tests, examples and the CLI."""
from __future__ import annotations

from itertools import product

from .machine import END_MARKER, IatSpec, SeqRule, SeqTransducerSpec

ALPHABET = ("a", "b")


def identity_iat() -> IatSpec:
    """Emits each symbol as it is read; accepts at the end marker."""
    comm = {}
    for x in ALPHABET:
        for own in ("q", "r"):
            comm[(x, own, "q")] = (x, "r")
    comm[(END_MARKER, "r", "q")] = ("", "f")
    return IatSpec(
        states=frozenset({"q", "r", "f"}),
        accepting=frozenset({"f"}),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(ALPHABET),
        quiescent="q",
        delta_comm=comm,
        default_interior=True,
        name="identity",
    )


def parity_iat() -> IatSpec:
    """Emits, per symbol, the parity of the number of a's read so far."""
    comm = {}
    for own, par in (("q", 0), ("e", 0), ("o", 1)):
        comm[("a", own, "q")] = (str(1 - par), "o" if par == 0 else "e")
        comm[("b", own, "q")] = (str(par), "e" if par == 0 else "o")
        comm[(END_MARKER, own, "q")] = ("", "f")
    return IatSpec(
        states=frozenset({"q", "e", "o", "f"}),
        accepting=frozenset({"f"}),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset("01"),
        quiescent="q",
        delta_comm=comm,
        default_interior=True,
        name="parity",
    )


def _bits(s):
    return (0, 0, 0) if s == "f" else tuple(int(ch) for ch in s)


def _name(b, c, r):
    return f"{b}{c}{r}"


def block_counter_iat() -> IatSpec:
    """Counts each block of a's in binary across the array.

    Cells hold a bit, a carry for the right neighbour and a reset flag.  A b
    or the end marker emits the length of the preceding block modulo 4 and
    sends a reset wave through the counter.
    """
    cells = [_name(*t) for t in product((0, 1), repeat=3)]
    states = frozenset(cells) | {"f"}
    interior = {}
    for l, c, r in product(sorted(states), repeat=3):
        _, cin, rin = _bits(l)
        b, _, _ = _bits(c)
        if rin:
            new = _name(0, 0, 1)
        else:
            new = _name(b ^ cin, b & cin, 0)
        interior[(l, c, r)] = new
    comm = {}
    for own, right in product(cells, cells):
        b0, c0, r0 = _bits(own)
        # a reset just issued clears the right neighbour's bit next step
        b1 = 0 if r0 else _bits(right)[0]
        value = str(b0 + 2 * (b1 ^ c0))
        comm[("a", own, right)] = ("", _name(b0 ^ 1, b0, 0))
        comm[("b", own, right)] = (value, _name(0, 0, 1))
        comm[(END_MARKER, own, right)] = (value, "f")
    return IatSpec(
        states=states,
        accepting=frozenset({"f"}),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset("0123"),
        quiescent="000",
        delta_interior=interior,
        delta_comm=comm,
        name="block_counter",
    )


def block_lengths(word: str) -> str:
    """Reference function of the block counter."""
    return "".join(str(len(block) % 4) for block in word.split("b"))


SAMPLE_IATS = {
    "identity": identity_iat,
    "parity": parity_iat,
    "block_counter": block_counter_iat,
}


def _pdt(name, states, accepting, rules, outputs, gamma="ZAB"):
    return SeqTransducerSpec(
        kind="pdt",
        states=frozenset(states),
        initial=states[0],
        accepting=frozenset(accepting),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(outputs),
        rules=tuple(SeqRule(s, x, n, o, top=t, push=p) for s, x, t, n, o, p in rules),
        stack_alphabet=frozenset(gamma),
        initial_stack="Z",
        deterministic=True,
        name=name,
    )


def anbn_marker_dpdt() -> SeqTransducerSpec:
    """a^n b^n -> a^n: push on a, pop and emit on b, accept on the bottom."""
    return _pdt("anbn_marker", ["q", "p", "f"], ["f"], [
        ("q", "a", "Z", "q", "", "AZ"),
        ("q", "a", "A", "q", "", "AA"),
        ("q", "b", "A", "p", "a", ""),
        ("p", "b", "A", "p", "a", ""),
        ("p", None, "Z", "f", "", "Z"),
    ], "a")


def stack_copy_dpdt() -> SeqTransducerSpec:
    """λ-free identity that pushes every symbol it reads."""
    rules = []
    for x in ALPHABET:
        mark = "A" if x == "a" else "B"
        for top in "ZAB":
            rules.append(("q", x, top, "q", x, mark + top))
    return _pdt("stack_copy", ["q"], ["q"], rules, "ab")


def lambda_burst_dpdt() -> SeqTransducerSpec:
    """Copies a and maps b to bccc through a chain of three λ-moves."""
    return _pdt("lambda_burst", ["r", "b1", "b2", "b3"], ["r"], [
        ("r", "a", "Z", "r", "a", "Z"),
        ("r", "b", "Z", "b1", "b", "Z"),
        ("b1", None, "Z", "b2", "c", "BZ"),
        ("b2", None, "B", "b3", "c", ""),
        ("b3", None, "Z", "r", "c", "Z"),
    ], "abc")


def lambda_loop_dpdt() -> SeqTransducerSpec:
    """Loops on λ-moves after a b; rejected by the compiler."""
    return _pdt("lambda_loop", ["r", "s"], ["r"], [
        ("r", "a", "Z", "r", "a", "Z"),
        ("r", "b", "Z", "s", "b", "Z"),
        ("s", None, "Z", "s", "", "Z"),
    ], "ab")


SAMPLE_PDTS = {
    "anbn_marker": anbn_marker_dpdt,
    "stack_copy": stack_copy_dpdt,
    "lambda_burst": lambda_burst_dpdt,
    "lambda_loop": lambda_loop_dpdt,
}


def _fst(name, states, accepting, rules, outputs):
    return SeqTransducerSpec(
        kind="fst",
        states=frozenset(states),
        initial=states[0],
        accepting=frozenset(accepting),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(outputs),
        rules=tuple(SeqRule(s, x, n, o) for s, x, n, o in rules),
        name=name,
    )


def unary_code_fst() -> SeqTransducerSpec:
    """Deterministic: a -> 0, b -> 11."""
    return _fst("unary_code", ["q"], ["q"], [("q", "a", "q", "0"), ("q", "b", "q", "11")], "01")


def ends_in_b_fst() -> SeqTransducerSpec:
    """Copies words ending in b; guesses the last symbol."""
    return _fst("ends_in_b", ["p", "f"], ["f"], [
        ("p", "a", "p", "a"), ("p", "b", "p", "b"), ("p", "b", "f", "b"),
    ], "ab")


def ab_plus_fst() -> SeqTransducerSpec:
    """(ab)^+ with a -> 0, b -> 1."""
    return _fst("ab_plus", ["0", "1", "2"], ["2"], [
        ("0", "a", "1", "0"), ("1", "b", "2", "1"), ("2", "a", "1", "0"),
    ], "01")


def last_symbol_fst() -> SeqTransducerSpec:
    """Replaces every symbol by the last symbol of the word (needs lookahead)."""
    rules = []
    for guess in ALPHABET:
        for x in ALPHABET:
            rules.append(("s", x, guess, guess))
            rules.append((guess, x, guess, guess))
        rules.append(("s", guess, guess.upper(), guess))
        rules.append((guess, guess, guess.upper(), guess))
    return _fst("last_symbol", ["s", "a", "b", "A", "B"], ["A", "B"], rules, "ab")


def twin_paths_fst() -> SeqTransducerSpec:
    """Single-valued but ambiguous: two identical branches after a leading a."""
    rules = [("s", "a", "x", "a"), ("s", "a", "y", "a"), ("s", "b", "x", "b")]
    rules += [(q, c, q, c) for q in "xy" for c in ALPHABET]
    return _fst("twin_paths", ["s", "x", "y"], ["x", "y"], rules, "ab")


def two_valued_fst() -> SeqTransducerSpec:
    """Not single-valued: a leading a is written as 0 or 1."""
    rules = [("s", "a", "x", "0"), ("s", "a", "y", "1")]
    rules += [(q, c, q, "0") for q in "xy" for c in ALPHABET]
    return _fst("two_valued", ["s", "x", "y"], ["x", "y"], rules, "01")


SAMPLE_FSTS = {
    "unary_code": unary_code_fst,
    "ends_in_b": ends_in_b_fst,
    "ab_plus": ab_plus_fst,
    "last_symbol": last_symbol_fst,
    "twin_paths": twin_paths_fst,
    "two_valued": two_valued_fst,
}
