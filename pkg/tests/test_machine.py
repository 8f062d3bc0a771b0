import json
from fractions import Fraction

import pytest

from catlab.builtins import builtin
from catlab.machine import (
    BOUNDARY,
    END_MARKER,
    NO_OUTPUT,
    CatSpec,
    IatSpec,
    MachineParseError,
    MachineValidationError,
    TimeComplexity,
    iter_words,
    machine_to_dict,
    materialize,
    parse_machine,
    serialize_machine,
    validate_cat,
    validate_iat,
    validate_seq,
)
from catlab.samples import SAMPLE_FSTS, SAMPLE_IATS, SAMPLE_PDTS, identity_iat


def two_state_cat(**kw):
    delta = {}
    for l in ("a", "b", BOUNDARY):
        for c in ("a", "b"):
            for r in ("a", "b", BOUNDARY):
                delta[(l, c, r)] = (c, c)
    fields = dict(
        states=frozenset("ab"),
        accepting=frozenset("a"),
        input_alphabet=("a", "b"),
        output_alphabet=frozenset("ab"),
        delta=delta,
        name="echo",
    )
    fields.update(kw)
    return CatSpec(**fields)


def test_valid_cat_has_empty_report():
    assert validate_cat(two_state_cat()) == []


def test_missing_triple_is_named():
    spec = two_state_cat()
    delta = dict(spec.delta)
    del delta[("a", "b", BOUNDARY)]
    report = validate_cat(two_state_cat(delta=delta))
    assert len(report) == 1
    assert "('a', 'b', '#')" in str(report[0])


def test_output_outside_alphabet_names_rule():
    spec = two_state_cat()
    delta = dict(spec.delta)
    delta[("a", "a", "a")] = ("a", "z")
    report = validate_cat(two_state_cat(delta=delta))
    assert report and any("('a', 'a', 'a')" in str(v) for v in report)


def test_boundary_and_no_output_are_reserved():
    bad = two_state_cat(output_alphabet=frozenset({"a", NO_OUTPUT}))
    assert any(v.code == "reserved" for v in validate_cat(bad))


def test_iat_quiescence_violation():
    spec = identity_iat()
    interior = {("q", "q", "q"): "r"}
    broken = IatSpec(**{**spec.__dict__, "delta_interior": interior, "default_interior": True})
    assert any(v.code == "quiescence" for v in validate_iat(broken))


def test_iat_end_marker_clash():
    spec = identity_iat()
    clash = IatSpec(**{**spec.__dict__, "input_alphabet": ("a", END_MARKER)})
    assert any(v.code == "end marker clash" for v in validate_iat(clash))


def test_identity_iat_valid():
    assert validate_iat(identity_iat()) == []


def test_sample_sequential_machines_valid():
    for build in list(SAMPLE_FSTS.values()) + list(SAMPLE_PDTS.values()):
        assert validate_seq(build()) == []


def test_round_trip_explicit_cat():
    spec = two_state_cat()
    again = parse_machine(serialize_machine(spec))
    assert again == spec


@pytest.mark.parametrize("name", sorted(SAMPLE_IATS))
def test_round_trip_iat(name):
    spec = SAMPLE_IATS[name]()
    assert parse_machine(serialize_machine(spec)) == spec


@pytest.mark.parametrize("build", list(SAMPLE_FSTS.values()) + list(SAMPLE_PDTS.values()))
def test_round_trip_sequential(build):
    spec = build()
    assert parse_machine(serialize_machine(spec)) == spec


def test_round_trip_copy_builtin_reference():
    doc = serialize_machine(builtin("copy"))
    assert json.loads(doc) == {"kind": "cat", "name": "copy", "construction": {"builtin": "copy"}}
    assert parse_machine(doc).name == "copy"


def test_materialized_rule_cat_round_trips():
    rule_backed = CatSpec(
        states=None,
        accepting=lambda s: s == "a",
        input_alphabet=("a", "b"),
        output_alphabet=frozenset("ab"),
        rule=lambda l, c, r: (c, c if r == BOUNDARY else None),
        name="tail",
    )
    small = materialize(rule_backed)
    again = parse_machine(serialize_machine(small))
    assert again == small
    assert again.transition("a", "b", BOUNDARY) == ("b", "b")


def test_duplicate_state_name_rejected():
    doc = machine_to_dict(two_state_cat())
    doc["states"] = ["a", "a", "b"]
    with pytest.raises(MachineParseError, match="duplicate"):
        parse_machine(json.dumps(doc))


def test_pdt_rule_missing_stack_field():
    doc = machine_to_dict(SAMPLE_PDTS["anbn_marker"]())
    del doc["rules"][2]["push"]
    with pytest.raises(MachineParseError, match="rule 2"):
        parse_machine(json.dumps(doc))


def test_unknown_field_rejected():
    doc = machine_to_dict(two_state_cat())
    doc["colour"] = "red"
    with pytest.raises(MachineParseError, match="unknown field"):
        parse_machine(json.dumps(doc))


def test_syntax_error_has_position():
    with pytest.raises(MachineParseError) as err:
        parse_machine('{"kind": "cat",\n "states": [}')
    assert err.value.line == 2


def test_semantic_violation_raises_report():
    doc = machine_to_dict(two_state_cat())
    doc["delta"] = doc["delta"][1:]
    with pytest.raises(MachineValidationError) as err:
        parse_machine(json.dumps(doc))
    assert err.value.report


def test_no_output_mark_on_disk():
    spec = two_state_cat()
    delta = dict(spec.delta)
    delta[("a", "a", "a")] = ("a", None)
    text = serialize_machine(two_state_cat(delta=delta)).decode()
    assert NO_OUTPUT in text
    assert parse_machine(text).delta[("a", "a", "a")] == ("a", None)


def test_time_complexity():
    assert TimeComplexity.parse("rt").bound(5, "cat") == 5
    assert TimeComplexity.parse("rt").bound(5, "iat") == 6
    lt = TimeComplexity.parse("lt:3/2")
    assert lt.factor == Fraction(3, 2) and lt.bound(4) == 6
    with pytest.raises(ValueError):
        TimeComplexity("lt", Fraction(1, 2))
    with pytest.raises(ValueError):
        TimeComplexity.parse("n^2")


def test_iter_words_shortlex_count():
    words = list(iter_words("ab", 10))
    assert len(words) == 2046
    assert words[:4] == ["a", "b", "aa", "ab"]
    assert sorted(words, key=lambda w: (len(w), w)) == words
