import dataclasses

import pytest

from catlab.builtins import builtin
from catlab.engine import cat_run
from catlab.harness import (
    DEFAULT_SEED,
    OracleError,
    check_single_valued,
    equiv_check,
    make_oracle,
    measure_complexity,
    oracle_dpdt,
    oracle_fst_all_paths,
    oracle_function,
)
from catlab.machine import TimeComplexity, iter_words
from catlab.samples import SAMPLE_FSTS, SAMPLE_PDTS


def test_function_oracles():
    assert oracle_function("copy")("ab") == "abab"
    assert oracle_function("sort")("babaabba") == "aaaabbbb"
    assert oracle_function("reverse")("aab") == "baa"
    assert oracle_function("square_marker")("abab") == "abcc"
    assert oracle_function("square_marker")("aba") is None
    with pytest.raises(KeyError):
        oracle_function("nope")


def test_fst_all_paths():
    for name in ("unary_code", "ends_in_b", "twin_paths", "last_symbol"):
        spec = SAMPLE_FSTS[name]()
        for w in iter_words("ab", 6):
            assert len(oracle_fst_all_paths(spec, w)) <= 1
    assert oracle_fst_all_paths(SAMPLE_FSTS["two_valued"](), "ab") == {"00", "10"}
    assert oracle_fst_all_paths(SAMPLE_FSTS["ends_in_b"](), "ba") == set()
    with pytest.raises(OracleError):
        make_oracle(SAMPLE_FSTS["two_valued"]())("a")


def test_dpdt_oracle():
    spec = SAMPLE_PDTS["anbn_marker"]()
    assert oracle_dpdt(spec, "aabb") == "aa"
    assert oracle_dpdt(spec, "aab") is None
    with pytest.raises(OracleError):
        oracle_dpdt(SAMPLE_PDTS["lambda_loop"](), "ab")


def test_check_single_valued():
    assert check_single_valued(SAMPLE_FSTS["unary_code"](), 10) is None
    assert check_single_valued(SAMPLE_FSTS["ab_plus"](), 10) is None
    assert check_single_valued(SAMPLE_FSTS["two_valued"](), 10) == "a"


def test_equiv_copy_counts():
    report = equiv_check(builtin("copy"), "copy", max_len=10)
    assert report.passed and report.words_checked == 2046
    assert equiv_check(builtin("copy"), "copy", max_len=1).words_checked == 2


def mutant_copy():
    base = builtin("copy")

    def rule(l, c, r):
        nxt, out = base.transition(l, c, r)
        return nxt, ("bb" if out == "ba" else out)

    return dataclasses.replace(base, rule=rule, name="copy-mutant", info={})


def test_mutant_has_shortlex_minimal_counterexample():
    mutant = mutant_copy()
    report = equiv_check(mutant, "copy", max_len=8)
    assert not report.passed
    first = next(w for w in iter_words("ab", 8) if cat_run(mutant, w).final_output != w + w)
    # "ba" is the first word whose run emits the mutated chunk
    assert report.counterexample == first == "ba"
    assert report.reason == "output 'bbbb' != 'baba'"


def test_oracle_rejects_machine_accepts():
    report = equiv_check(builtin("copy"), lambda w: None if "b" in w else w + w, max_len=4)
    assert report.counterexample == "b" and "machine accepts" in report.reason


def test_bound_violation_reported():
    report = equiv_check(builtin("sort"), "sort", max_len=4, to=TimeComplexity("lt", 1, -1))
    assert not report.passed and "exceeds" in report.reason


def test_measure_sort_and_copy():
    prof = measure_complexity(builtin("sort"), lengths=range(2, 11))
    for n, (ti, to, count) in prof.per_length.items():
        assert ti <= n and to == n and count == 2 ** n
    assert prof.classify() == ("rt", "rt")
    assert prof.seed == DEFAULT_SEED
    copy = measure_complexity(builtin("copy"), lengths=[1])
    assert copy.per_length[1][1] == 1


def test_measure_sampled_is_reproducible():
    a = measure_complexity(builtin("reverse"), lengths=[12, 20], samples=5)
    b = measure_complexity(builtin("reverse"), lengths=[12, 20], samples=5)
    assert a.per_length == b.per_length
    assert a.within(TimeComplexity.parse("rt"), TimeComplexity.parse("rt"))


def test_square_marker_relaxed_note():
    report = equiv_check(builtin("square_marker"), "square_marker", max_len=8, ti="lt:2", to="rt")
    assert report.passed
    assert any("relaxed bound" in note for note in report.notes)
    assert "relaxed" in report.text() and report.to_dict()["notes"]
