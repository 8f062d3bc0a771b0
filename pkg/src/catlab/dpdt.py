"""Deterministic pushdown transducers compiled into CATs with t_i = n and linear t_o.

The compiled cell carries five tracks:

1. a real-time DPDA run in cell 1: each step applies one input-consuming move
   and the λ-moves following it (λ-closure compression) on its own stack;
2. a move-by-move run of the transducer in cell 1, fed by a demand-driven
   input buffer, opening a new output group at every consuming move;
3. the stack of track 2;
4. a queue receiving the finished groups;
5. after acceptance, a sweep to the right end and back during which every
   cell emits the outputs of its queue group.

Tracks 1 and 3 use the same cellular stack gadget, track 4 the queue gadget.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .machine import BOUNDARY, END_MARKER, CatSpec, SeqTransducerSpec, machine_to_dict


class PreconditionError(ValueError):
    """The source machine violates a precondition of the construction."""


# ---------------------------------------------------------------------------
# constants


@dataclass(frozen=True)
class PdtConstants:
    k1: int  # max symbols pushed per move
    k2: int  # max consecutive λ-moves
    k: int

    @property
    def c(self) -> int:
        """Linear factor of the output-completion bound of the compiled CAT."""
        return 2 * self.k2 + 3


def _table(spec: SeqTransducerSpec) -> dict:
    if spec.kind != "pdt":
        raise PreconditionError(f"expected a pdt, got {spec.kind!r}")
    table = {}
    for rule in spec.rules:
        key = (rule.state, rule.symbol, rule.top)
        if key in table:
            raise PreconditionError(f"not deterministic: two rules apply to {key!r}")
        table[key] = rule
    for state, symbol, top in table:
        if symbol is None and any(s == state and t == top and x is not None for s, x, t in table):
            raise PreconditionError(
                f"not deterministic: state {state!r} mixes empty and symbol moves on {top!r}"
            )
    return table


def _reachable_states(spec):
    seen, todo = {spec.initial}, [spec.initial]
    while todo:
        q = todo.pop()
        for rule in spec.rules_from(q):
            if rule.next not in seen:
                seen.add(rule.next)
                todo.append(rule.next)
    return seen


def compute_constants(spec: SeqTransducerSpec) -> PdtConstants:
    """k1 by rule scan, k2 by the longest λ-chain over (state, top) pairs."""
    table = _table(spec)
    k1 = max((len(r.push) for r in spec.rules), default=0)
    gamma = sorted(spec.stack_alphabet)
    live = _reachable_states(spec)
    memo: dict = {}
    active: set = set()

    def chain(node):
        if node in memo:
            return memo[node]
        rule = table.get((node[0], None, node[1]))
        if rule is None:
            memo[node] = 0
            return 0
        if node in active:
            raise PreconditionError(f"not linear-time halting: λ-cycle through {node!r}")
        active.add(node)
        succ = [(rule.next, rule.push[0])] if rule.push else [(rule.next, g) for g in gamma]
        best = 1 + max(chain(s) for s in succ)
        active.discard(node)
        memo[node] = best
        return best

    k2 = max((chain((q, g)) for q in sorted(live) for g in gamma), default=0)
    return PdtConstants(k1, k2, max(k1, k2))


# ---------------------------------------------------------------------------
# gadgets


def stack_update(b: int, lseg, seg: str, rseg, op=None) -> str:
    """One step of a cell of the cellular stack with block size ``b``.

    Segments are top-first strings; cell 1 (``lseg`` is None) applies ``op`` =
    (pop count, pushed word), both at most ``b``.  A cell holding more than 3b
    symbols hands its bottom b to the right neighbour; one holding fewer than
    2b takes the top b of the right neighbour.  Every cell but the last
    nonempty one keeps at least b symbols, so cell 1 always sees the top b.
    """
    n = len(seg)
    head, top_cut = "", 0
    if lseg is None:
        if op is not None:
            top_cut, head = op
    else:
        ln = len(lseg)
        if ln > 3 * b:
            head = lseg[-b:]
        elif ln < 2 * b:
            top_cut = min(b, n)
    tail, bottom_cut = "", 0
    if rseg is not None:
        if n > 3 * b:
            bottom_cut = b
        elif n < 2 * b and rseg:
            tail = rseg[:b]
    if top_cut + bottom_cut > n:
        raise AssertionError("stack gadget invariant violated")
    return head + seg[top_cut:n - bottom_cut] + tail


class QueueCell(NamedTuple):
    mov: object  # item travelling right, or None
    slot: object  # stored item, or None


EMPTY_QUEUE_CELL = QueueCell(None, None)


def queue_update(left: QueueCell | None, cell: QueueCell, enqueue=None) -> QueueCell:
    """Items enter at cell 1 and travel right until the first empty slot."""
    incoming = enqueue if left is None else left.mov
    if incoming is not None and cell.slot is None:
        return QueueCell(None, incoming)
    return QueueCell(incoming, cell.slot)


@dataclass
class TrackGadget:
    kind: str  # "stack" or "queue"
    k: int
    capacity: int
    step: Callable = field(repr=False)

    def replay(self, ops) -> tuple:
        """Run an operation sequence on an unbounded array.

        Stack ops are ("push", word) (pushed left to right, so the last symbol
        ends on top), ("pop",) and ("idle",); the observations are the popped
        symbols.  Queue ops are ("enqueue", item) and ("idle",); afterwards a
        sweep dequeues the cells in order.  Returns (observations, max
        occupied cells).
        """
        size = len(ops) + 3
        observed = []
        peak = 0
        if self.kind == "stack":
            cells = [""] * size
            for op in ops:
                if op[0] == "push":
                    word = op[1][::-1]
                    if not 1 <= len(word) <= self.k:
                        raise ValueError("push needs 1..k symbols")
                    move = (0, word)
                elif op[0] == "pop":
                    if not cells[0]:
                        raise ValueError("pop on an empty stack")
                    observed.append(cells[0][0])
                    move = (1, "")
                else:
                    move = None
                cells = [
                    self.step(
                        None if i == 0 else cells[i - 1],
                        cells[i],
                        None if i == size - 1 else cells[i + 1],
                        move if i == 0 else None,
                    )
                    for i in range(size)
                ]
                peak = max(peak, sum(1 for s in cells if s))
                if any(len(s) > self.capacity for s in cells):
                    raise AssertionError("stack cell over capacity")
            return tuple(observed), peak
        cells = [EMPTY_QUEUE_CELL] * size
        for op in list(ops) + [("idle",)] * size:
            item = op[1] if op[0] == "enqueue" else None
            cells = [
                self.step(None if i == 0 else cells[i - 1], cells[i], item if i == 0 else None)
                for i in range(size)
            ]
            peak = max(peak, sum(1 for c in cells if c.slot is not None))
        observed = [c.slot for c in cells if c.slot is not None]
        return tuple(observed), peak


def build_track_stack(k: int) -> TrackGadget:
    if k < 1:
        raise ValueError("k must be at least 1")
    return TrackGadget("stack", k, 4 * k, lambda l, c, r, op=None: stack_update(k, l, c, r, op))


def build_track_queue(k: int) -> TrackGadget:
    if k < 1:
        raise ValueError("k must be at least 1")
    return TrackGadget("queue", k + 1, 1, queue_update)


# ---------------------------------------------------------------------------
# the compiled CAT


class Acceptor(NamedTuple):
    """Track 1: input shifted left at full speed, real-time DPDA in cell 1."""

    inp: str
    state: str | None  # None once the run died
    acc: bool
    seg: str


class Runner(NamedTuple):
    """Tracks 2 and 3: demand-driven input buffer, move-by-move run, stack."""

    buf: tuple  # at most two input symbols, front first
    state: str | None
    group: tuple | None  # outputs of the group being built
    opened: bool  # the group contains a consuming move
    halted: bool
    seg: str


class DpdtCell(NamedTuple):
    acceptor: Acceptor
    runner: Runner
    queue: QueueCell
    sweep: str | None  # None, "R", "P" (passed), "L" (emitting), "D" (done)


def compile_dpdt_to_cat(spec: SeqTransducerSpec) -> CatSpec:
    """A CAT_{rt,lt} computing the transduction of a deterministic PDT."""
    table = _table(spec)
    consts = compute_constants(spec)
    b1 = max(1, consts.k1) * (2 * consts.k2 + 1)
    b2 = max(1, consts.k1)
    bottom = spec.initial_stack or ""

    def closure(state, top_of, pop, push, out):
        while True:
            top = top_of()
            rule = table.get((state, None, top)) if top is not None else None
            if rule is None:
                return state
            pop()
            push(rule.push)
            out.append(rule.output)
            state = rule.next

    def burst(state, seg, symbol, first):
        """Apply (initial closure,) the consuming move and its λ-moves to seg."""
        work: list = []
        popped = 0

        def top_of():
            if work:
                return work[0]
            if popped < len(seg):
                return seg[popped]
            return None

        def pop():
            nonlocal popped
            if work:
                work.pop(0)
            else:
                popped += 1

        def push(word):
            work[:0] = list(word)

        out: list = []
        if first:
            state = closure(state, top_of, pop, push, out)
        top = top_of()
        rule = table.get((state, symbol, top)) if top is not None else None
        if rule is None:
            return None, None
        pop()
        push(rule.push)
        state = closure(rule.next, top_of, pop, push, out)
        return state, (popped, "".join(work))

    def view(s):
        if isinstance(s, str):
            return DpdtCell(
                Acceptor(s, spec.initial, False, ""),
                Runner((s,), spec.initial, None, False, False, ""),
                EMPTY_QUEUE_CELL,
                None,
            ), True
        return s, False

    def accept_track(v, raw, lv, rv):
        a = v.acceptor
        seg = bottom if raw and lv is None else a.seg
        state, acc, op = a.state, a.acc, None
        if lv is None and state is not None and a.inp != END_MARKER:
            state, op = burst(state, seg, a.inp, raw)
            if state is not None and (rv is None or rv.acceptor.inp == END_MARKER):
                acc = state in spec.accepting
        rseg = None if rv is None else rv.acceptor.seg
        lseg = None if lv is None else lv.acceptor.seg
        new_seg = stack_update(b1, lseg, seg, rseg, op)
        inp = END_MARKER if rv is None else rv.acceptor.inp
        return Acceptor(inp, state, acc, new_seg)

    def run_track(v, raw, lv, rv):
        """Returns the new runner and the group enqueued at this step (cell 1 only)."""
        u = v.runner
        seg = bottom if raw and lv is None else u.seg
        buf = u.buf
        state, group, opened, halted = u.state, u.group, u.opened, u.halted
        op, consumed, enqueue = None, False, None
        if lv is None and not halted and state is not None:
            top = seg[0] if seg else None
            lam = table.get((state, None, top)) if top is not None else None
            if lam is not None:
                op = (1, lam.push)
                state = lam.next
                group = (group or ()) + (lam.output,)
            elif buf:
                rule = table.get((state, buf[0], top)) if top is not None else None
                consumed = True
                if rule is None:
                    state = None
                else:
                    op = (1, rule.push)
                    state = rule.next
                    if opened:
                        enqueue, group = group, (rule.output,)
                    else:
                        group = (group or ()) + (rule.output,)
                    opened = True
            else:
                enqueue, group, halted = group or (), None, True
        # demand-driven shift: pass the front left when the left cell has room
        if lv is not None:
            consumed = len(lv.runner.buf) <= 1 and bool(buf)
        if consumed:
            buf = buf[1:]
        if len(u.buf) <= 1 and rv is not None and rv.runner.buf:
            buf = buf + rv.runner.buf[:1]
        rseg = None if rv is None else rv.runner.seg
        lseg = None if lv is None else lv.runner.seg
        new_seg = stack_update(b2, lseg, seg, rseg, op)
        return Runner(buf, state, group, opened, halted, new_seg), enqueue

    def rule(l, c, r):
        v, raw = view(c)
        lv = None if l == BOUNDARY else view(l)[0]
        rv = None if r == BOUNDARY else view(r)[0]
        acceptor = accept_track(v, raw, lv, rv)
        runner, enqueue = run_track(v, raw, lv, rv)
        queue = queue_update(None if lv is None else lv.queue, v.queue, enqueue)
        # track 5
        sweep, out = v.sweep, None
        if lv is None and acceptor.acc and not v.acceptor.acc:
            sweep = "L" if rv is None else "R"
        elif sweep is None and lv is not None and lv.sweep == "R":
            sweep = "L" if rv is None else "R"
        elif sweep == "R":
            sweep = "P"
        elif sweep == "P" and rv is not None and rv.sweep == "L" and rv.queue.slot is not None:
            sweep = "L"
        elif sweep == "L" and v.queue.slot is not None:
            out = "".join(v.queue.slot)
            sweep = "D"
        return DpdtCell(acceptor, runner, queue, sweep), out

    cat = CatSpec(
        states=None,
        accepting=lambda s: not isinstance(s, str) and s.acceptor.acc,
        input_alphabet=tuple(spec.input_alphabet),
        output_alphabet=frozenset(spec.output_alphabet),
        rule=rule,
        name=f"cat({spec.name or 'dpdt'})",
        info={
            "construction": {"compiler": "dpdt", "source": machine_to_dict(spec)},
            "source": spec,
            "constants": consts,
            "c": consts.c,
            "blocks": (b1, b2),
            "step_cap": lambda n: consts.c * n + 16,
        },
    )
    return cat


__all__ = [
    "PreconditionError",
    "PdtConstants",
    "compute_constants",
    "stack_update",
    "QueueCell",
    "queue_update",
    "TrackGadget",
    "build_track_stack",
    "build_track_queue",
    "Acceptor",
    "Runner",
    "DpdtCell",
    "compile_dpdt_to_cat",
]
