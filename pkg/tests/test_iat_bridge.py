from math import ceil

import pytest

from catlab.builtins import builtin
from catlab.engine import cat_run, iat_run
from catlab.harness import equiv_check, make_oracle, measure_complexity
from catlab.iat_bridge import (
    REST,
    UnfairComplexity,
    compile_cat_to_iat,
    compile_iat_to_cat,
    decode_front,
    normalize_iat,
)
from catlab.machine import END_MARKER, IatSpec, TimeComplexity, iter_words
from catlab.samples import SAMPLE_IATS, block_lengths

RT = TimeComplexity.parse("rt")


def echo_iat():
    """Emits each symbol; the cell behind the comm cell flickers back to quiescence."""
    comm = {}
    for x in "ab":
        for own in ("q", "x"):
            for right in ("q", "y"):
                comm[(x, own, right)] = (x, "x")
    for right in ("q", "y"):
        comm[(END_MARKER, "x", right)] = ("", "f")
    return IatSpec(
        states=frozenset("qxyf"),
        accepting=frozenset("f"),
        input_alphabet=("a", "b"),
        output_alphabet=frozenset("ab"),
        quiescent="q",
        delta_comm=comm,
        interior_rule=lambda l, c, r: "y" if l in ("x", "f") and c == "q" else "q",
        name="echo",
    )


def test_samples_behave_as_described():
    assert iat_run(SAMPLE_IATS["identity"](), "abba").final_output == "abba"
    assert iat_run(SAMPLE_IATS["parity"](), "aab").final_output == "100"
    block = SAMPLE_IATS["block_counter"]()
    for w in iter_words("ab", 8):
        assert iat_run(block, w).final_output == block_lengths(w)


def test_normalize_k1_equivalent():
    for name, build in SAMPLE_IATS.items():
        spec = build()
        norm = normalize_iat(spec)
        report = equiv_check(norm, make_oracle(spec), max_len=8)
        assert report.passed, (name, report.text())


def test_normalize_never_reenters_quiescence():
    spec = echo_iat()
    # the raw spec does re-enter quiescence
    cell1 = [conf.cells[1] for conf in iat_run(spec, "abab").configurations if len(conf.cells) > 1]
    assert any(a == "y" and b == "q" for a, b in zip(cell1, cell1[1:]))
    norm = normalize_iat(spec)
    for w in iter_words("ab", 8):
        hist = iat_run(norm, w).configurations
        left = set()
        for conf in hist:
            for i, cell in enumerate(conf.cells):
                if cell != norm.quiescent:
                    left.add(i)
                else:
                    assert i not in left
        assert iat_run(norm, w).final_output == w
    assert any(REST in conf.cells[1] for conf in iat_run(norm, "abab").configurations if len(conf.cells) > 1)


def test_normalize_grouping_equivalent_and_sized():
    spec = SAMPLE_IATS["parity"]()
    for k in (2, 3):
        norm = normalize_iat(spec, k)
        assert equiv_check(norm, make_oracle(spec), max_len=8).passed
    norm1 = normalize_iat(spec)
    assert len(norm1.states) <= len(spec.states) + 1
    with pytest.raises(ValueError):
        normalize_iat(spec, 0)


@pytest.mark.parametrize("name", sorted(SAMPLE_IATS))
@pytest.mark.parametrize("ti,to", [("rt", "rt"), ("lt:2", "lt:2"), ("lt:3", "lt:5")])
def test_compiled_samples_match(name, ti, to):
    spec = SAMPLE_IATS[name]()
    cat = compile_iat_to_cat(spec, TimeComplexity.parse(ti), TimeComplexity.parse(to))
    report = equiv_check(cat, make_oracle(spec), max_len=8, ti=ti, to=to)
    assert report.passed, report.text()


def test_compiled_constants():
    spec = SAMPLE_IATS["identity"]()
    assert compile_iat_to_cat(spec, RT, RT).info["K"] == 2
    cat = compile_iat_to_cat(spec, TimeComplexity.parse("lt:5/2"), TimeComplexity.parse("lt:7/2"))
    assert (cat.info["K"], cat.info["g"]) == (4, 3)


def test_compiled_timing_within_bounds_to_40():
    for name, build in SAMPLE_IATS.items():
        cat = compile_iat_to_cat(build(), RT, RT)
        prof = measure_complexity(cat, lengths=range(2, 41), exhaustive_up_to=8, samples=8)
        assert prof.within(RT, RT), (name, prof.per_length)


def test_decode_front_positions():
    cat = compile_iat_to_cat(SAMPLE_IATS["block_counter"](), RT, RT)
    trace = cat_run(cat, "aababbab")
    assert decode_front(trace) == [None, 1, 1, 2, 2, 3, 3, 4, None]
    for w in ("ab", "abbab", "abababa", "aaaaaaaaaa"):
        n = len(w)
        front = decode_front(cat_run(compile_iat_to_cat(SAMPLE_IATS["identity"](), RT, RT), w))
        # cell i simulates comm steps 2i-1 and 2i; step n finishes the run
        assert len(front) == n + 1 and front[n] is None
        for t in range(1, n):
            assert front[t] == ceil(t / 2)


def test_unfair_complexity():
    with pytest.raises(UnfairComplexity):
        compile_iat_to_cat(SAMPLE_IATS["identity"](), TimeComplexity("explicit"), RT)


@pytest.mark.parametrize("name", ["copy", "sort"])
def test_cat_to_iat(name):
    iat = compile_cat_to_iat(builtin(name))
    assert equiv_check(iat, name, max_len=8).passed


def test_cat_to_iat_constant_is_stable():
    for name, bound in (("copy", 5), ("sort", 6)):
        prof = measure_complexity(compile_cat_to_iat(builtin(name)), exhaustive_up_to=6, samples=5)
        ti, to = prof.max_ratio()
        assert ti <= 3 and to <= bound
        late = [prof.per_length[n][1] / n for n in range(20, 41)]
        assert max(late) - min(late) < 0.2


def test_double_round_trip():
    iat = compile_cat_to_iat(builtin("sort"))
    cat = compile_iat_to_cat(iat, TimeComplexity.parse("lt:3"), TimeComplexity.parse("lt:6"))
    report = equiv_check(cat, "sort", max_len=6, ti="lt:3", to="lt:6")
    assert report.passed, report.text()
    again = compile_cat_to_iat(cat)
    assert equiv_check(again, "sort", max_len=5).passed
