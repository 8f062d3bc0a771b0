import random

import pytest

from catlab.dpdt import (
    EMPTY_QUEUE_CELL,
    PreconditionError,
    build_track_queue,
    build_track_stack,
    compile_dpdt_to_cat,
    compute_constants,
)
from catlab.engine import cat_run
from catlab.harness import equiv_check, measure_complexity, run_dpdt
from catlab.machine import iter_words
from catlab.samples import SAMPLE_PDTS

COMPILABLE = ["anbn_marker", "stack_copy", "lambda_burst"]


def stack_ops(rng, k, length):
    ops, ref, popped = [], [], []
    for _ in range(length):
        r = rng.random()
        if ref and r < 0.45:
            ops.append(("pop",))
            popped.append(ref.pop())
        elif r < 0.9:
            word = "".join(rng.choice("xyz") for _ in range(rng.randint(1, k)))
            ops.append(("push", word))
            ref.extend(word)
        else:
            ops.append(("idle",))
    return ops, tuple(popped)


def test_constants():
    c = compute_constants(SAMPLE_PDTS["stack_copy"]())
    assert (c.k1, c.k2, c.k) == (2, 0, 2)
    burst = compute_constants(SAMPLE_PDTS["lambda_burst"]())
    assert burst.k2 == 3 and burst.c == 9
    anbn = compute_constants(SAMPLE_PDTS["anbn_marker"]())
    assert (anbn.k1, anbn.k2, anbn.c) == (2, 1, 5)
    with pytest.raises(PreconditionError, match="not linear-time halting"):
        compute_constants(SAMPLE_PDTS["lambda_loop"]())
    with pytest.raises(PreconditionError):
        compile_dpdt_to_cat(SAMPLE_PDTS["lambda_loop"]())


def test_stack_gadget_example():
    obs, _ = build_track_stack(2).replay([("push", "a"), ("push", "bc"), ("pop",), ("pop",), ("pop",)])
    assert obs == ("c", "b", "a")


def test_queue_gadget_example():
    obs, _ = build_track_queue(1).replay([("enqueue", "x"), ("enqueue", "y"), ("enqueue", "z")])
    assert obs == ("x", "y", "z")


def test_gadget_preconditions():
    with pytest.raises(ValueError):
        build_track_stack(0)
    with pytest.raises(ValueError):
        build_track_queue(0)
    with pytest.raises(ValueError):
        build_track_stack(1).replay([("pop",)])
    with pytest.raises(ValueError):
        build_track_stack(1).replay([("push", "xy")])


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_stack_gadget_random_replay(k):
    rng = random.Random(100 + k)
    gadget = build_track_stack(k)
    for _ in range(500):
        ops, expected = stack_ops(rng, k, rng.randint(0, 50))
        obs, peak = gadget.replay(ops)
        assert obs == expected
        assert peak <= max(1, len(ops))


@pytest.mark.parametrize("k", [1, 3])
def test_queue_gadget_random_replay(k):
    rng = random.Random(200 + k)
    gadget = build_track_queue(k)
    for _ in range(500):
        ops = [("enqueue", i) if rng.random() < 0.7 else ("idle",) for i in range(rng.randint(0, 50))]
        obs, peak = gadget.replay(ops)
        assert obs == tuple(op[1] for op in ops if op[0] == "enqueue")
        assert peak == len(obs)


def test_queue_linearity_and_sweep():
    for name in COMPILABLE:
        cat = compile_dpdt_to_cat(SAMPLE_PDTS[name]())
        for w in iter_words("ab", 7):
            trace = cat_run(cat, w, cat.info["step_cap"](len(w)))
            for conf in trace.configurations[1:]:
                queued = sum((c.queue.slot is not None) + (c.queue.mov is not None) for c in conf.cells)
                consumed = len(w) - sum(len(c.runner.buf) for c in conf.cells)
                assert queued <= consumed
            if trace.success:
                last = trace.configurations[-1].cells
                groups = [c.queue.slot for c in last]
                assert all(g is not None for g in groups)
                assert "".join(o for o in trace.configurations[-1].outputs) == "".join("".join(g) for g in groups)
                assert last[0].queue != EMPTY_QUEUE_CELL


@pytest.mark.parametrize("name", COMPILABLE)
def test_compiled_equivalence(name):
    spec = SAMPLE_PDTS[name]()
    cat = compile_dpdt_to_cat(spec)
    c = cat.info["c"]
    report = equiv_check(cat, spec, max_len=10, ti="rt", to=f"lt:{c}")
    assert report.passed, report.text()


def test_rejected_word_has_no_transduction():
    spec = SAMPLE_PDTS["anbn_marker"]()
    assert run_dpdt(spec, "aab")[0] is False
    trace = cat_run(compile_dpdt_to_cat(spec), "aab", 64)
    assert not trace.accepted and trace.final_output is None


def test_linear_time_to_40():
    for name in COMPILABLE:
        cat = compile_dpdt_to_cat(SAMPLE_PDTS[name]())
        prof = measure_complexity(cat, exhaustive_up_to=8, samples=10)
        ti, to = prof.max_ratio()
        assert ti <= 1 and to <= cat.info["c"], (name, ti, to)
