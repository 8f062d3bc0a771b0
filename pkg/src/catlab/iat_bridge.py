"""Simulations between iterative array and cellular automaton transducers.

``compile_iat_to_cat`` runs two tracks side by side:

* the output track moves the simulated communication cell through the array,
  K steps per cell (K = 2 for real-time output).  Registers ``regs`` of a cell
  hold K consecutive simulated cells in descending order, the window sliding
  one cell per step; the input is shifted left K-1 times in K steps; the
  pending output of the current holder waits in ``pend``;
* the acceptance track runs the array in lockstep with the communication cell
  in cell 1, g simulated cells per cell and the input shifted at full speed.

``compile_cat_to_iat`` stores the input, synchronizes the stored segment,
simulates the CAT in lockstep and pipes the output registers to the
communication cell in cell order.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .engine import compose_tracks
from .fssp import FIRE, GENERAL_LEFT_END, QUIET, is_fire, sync_step
from .machine import BOUNDARY, END_MARKER, CatSpec, IatSpec, TimeComplexity, machine_to_dict


class UnfairComplexity(ValueError):
    """Raised for time bounds beyond linear time."""


# ---------------------------------------------------------------------------
# normalization


class _Rest:
    """A cell that has left the quiescent state and later returned to it."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "rest"

    def __reduce__(self):
        return (_Rest, ())


REST = _Rest()


def normalize_iat(spec: IatSpec, k: int = 1) -> IatSpec:
    """Equivalent IAT in which no cell re-enters quiescence and k cells form one.

    A group state is a k-tuple of cell values; a value is an original state,
    except that a cell returning to quiescence shows ``REST`` instead.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    q = spec.quiescent
    group_q = (q,) * k

    def raw(x):
        return q if x is REST else x

    def mark(old, new):
        if new == q and old != q:
            return REST
        return new

    def advance(cells, left, right):
        # cells: list of k values; left/right: neighbouring raw states
        ext = [left] + [raw(x) for x in cells] + [right]
        return tuple(mark(cells[i], spec.interior(ext[i], ext[i + 1], ext[i + 2])) for i in range(k))

    def interior(l, c, r):
        return advance(list(c), raw(l[-1]), raw(r[0]))

    def comm(x, own, right):
        step = spec.comm(x, raw(own[0]), raw(own[1]) if k > 1 else raw(right[0]))
        if step is None:
            return None
        out, first = step
        first = REST if first == q else first
        if k == 1:
            return out, (first,)
        ext = [raw(y) for y in own] + [raw(right[0])]
        rest = tuple(mark(own[i], spec.interior(ext[i - 1], ext[i], ext[i + 1])) for i in range(1, k))
        return out, (first,) + rest

    states = None
    if spec.states is not None and k == 1:
        states = frozenset((s,) for s in spec.states) | {(REST,)}
    return IatSpec(
        states=states,
        accepting=lambda g: spec.is_accepting(raw(g[0])),
        input_alphabet=tuple(spec.input_alphabet),
        output_alphabet=frozenset(spec.output_alphabet),
        quiescent=group_q,
        end_marker=spec.end_marker,
        interior_rule=interior,
        comm_rule=comm,
        name=f"{spec.name}/norm{k}",
    )


# ---------------------------------------------------------------------------
# IAT -> CAT


IDLE, HOLD, DEFER, FIN, PASSED, OVER = "idle", "hold", "defer", "fin", "passed", "over"


class OutCell(NamedTuple):
    regs: tuple  # simulated cells, highest index first
    inp: str  # buffered input symbol or the end marker
    last: bool  # inp is the last input symbol
    phase: int  # time modulo K
    role: str
    steps: int  # simulated comm steps done by this cell as holder
    pend: str  # output of those steps not yet emitted
    halt: bool  # halting signal travelling right


class AccCell(NamedTuple):
    regs: tuple  # the g simulated cells of this group, lowest index first
    inp: str
    accepted: bool
    halted: bool


def _factor(tc: TimeComplexity) -> int:
    if tc.kind == "rt":
        return 1
    if tc.kind != "lt":
        raise UnfairComplexity(f"time bound {tc} is not linear")
    return math.ceil(tc.factor)


def _output_track(spec: IatSpec, K: int, rt: bool) -> CatSpec:
    q = spec.quiescent
    END = spec.end_marker
    blank = (q,) * K

    def view(s):
        if isinstance(s, str):
            return OutCell(blank, s, False, 0, IDLE, 0, "", False), True
        return s, False

    def comm_step(x, X, r_new):
        """One simulated comm step; X[1..] lists x_1, x_2, ... at the previous time."""
        step = spec.comm(x, X[1], X[2])
        if step is None:
            return None
        out, first = step
        new = [first]
        for m in range(2, r_new + 1):
            new.append(spec.interior(X[m - 1], X[m], X[m + 1]))
        return out, new  # new[m-1] is x_m after the step

    def slide(own, left):
        X = list(reversed(own)) + list(reversed(left))
        return tuple(spec.interior(X[p - 1], X[p], X[p + 1]) for p in range(K, 0, -1))

    def rule(l, c, r):
        v, raw = view(c)
        lv = None if l == BOUNDARY else view(l)[0]
        rv = None if r == BOUNDARY else view(r)[0]
        # input register: shift at every step except the first of each K
        if v.phase != 0:
            inp = rv.inp if rv is not None else END
            last = rv.last if rv is not None else False
        else:
            inp = v.inp
            last = inp != END and (rv is None or rv.inp == END)
        phase = (v.phase + 1) % K
        base = dict(inp=inp, last=last, phase=phase, halt=False)
        left_regs = lv.regs if lv is not None else blank
        role = v.role

        if role == OVER:
            return v._replace(**base), None

        if role == IDLE:
            start = (lv is None and raw) or (lv is not None and lv.role in (FIN, DEFER))
            if lv is not None and lv.halt:
                return v._replace(role=OVER, **{**base, "halt": True}), ""
            if rt and start and lv is not None and lv.role == DEFER and v.inp != END and (rv is None or rv.inp == END):
                # my symbol is the last one; the left neighbour finishes the run
                return v._replace(role=OVER, **base), ""
            if not start:
                if rt and inp == END:
                    # the end of the input has passed through this cell
                    return v._replace(role=OVER, **base), ""
                return v._replace(**base), None

        if role in (IDLE, HOLD):
            r_new = 1 if role == IDLE else v.steps + 1
            if r_new == 1:
                x = v.inp
                x_last = rv is None or rv.inp == END
                X = [None] + list(reversed(left_regs))
            else:
                x = rv.inp if rv is not None else END
                x_last = rv is not None and rv.inp != END and rv.last
                X = [None] + list(reversed(v.regs[: r_new - 1])) + list(reversed(left_regs))
            X.append(q)
            res = comm_step(x, X, r_new)
            if res is None:
                return v._replace(role=OVER, **{**base, "halt": True}), v.pend
            out, new = res
            pend = v.pend + out
            regs = tuple(reversed(new)) + (q,) * (K - r_new)
            if rt and x_last and (r_new == K or lv is None):
                x2 = new[1] if r_new >= 2 else spec.interior(X[1], X[2], X[3])
                extra = spec.comm(END, new[0], x2)
                return v._replace(regs=regs, role=OVER, steps=r_new, pend="", **base), pend + (extra[0] if extra else "")
            if r_new == K:
                if rt:
                    return v._replace(regs=regs, role=DEFER, steps=r_new, pend=pend, **base), None
                return v._replace(regs=regs, role=FIN, steps=r_new, pend="", **base), pend
            return v._replace(regs=regs, role=HOLD, steps=r_new, pend=pend, **base), None

        if role == DEFER:
            if rv is not None and rv.inp != END and rv.last:
                # the next symbol is the last one: do its step and the end step here
                X = [None] + list(reversed(v.regs)) + list(reversed(left_regs)) + [q]
                res = comm_step(rv.inp, X, 2)
                if res is None:
                    return v._replace(role=OVER, pend="", **base), v.pend
                out, new = res
                extra = spec.comm(END, new[0], new[1])
                word = v.pend + out + (extra[0] if extra else "")
                return v._replace(role=OVER, pend="", **base), word
            return v._replace(regs=slide(v.regs, left_regs), role=PASSED, pend="", **base), v.pend

        # FIN and PASSED cells keep the window sliding
        return v._replace(regs=slide(v.regs, left_regs), role=PASSED, **base), None

    return CatSpec(
        states=None,
        accepting=frozenset(),
        input_alphabet=tuple(spec.input_alphabet),
        output_alphabet=frozenset(spec.output_alphabet),
        rule=rule,
        name="iat-output",
    )


def _acceptance_track(spec: IatSpec, g: int) -> CatSpec:
    q = spec.quiescent
    END = spec.end_marker
    blank = (q,) * g
    start_accepts = spec.is_accepting(q)

    def view(s):
        if isinstance(s, str):
            return AccCell(blank, s, start_accepts, False)
        return s

    def rule(l, c, r):
        v = view(c)
        lv = None if l == BOUNDARY else view(l)
        rv = None if r == BOUNDARY else view(r)
        inp = rv.inp if rv is not None else END
        right0 = rv.regs[0] if rv is not None else q
        if lv is None:
            if v.halted:
                return v._replace(inp=inp), None
            ext = list(v.regs) + [right0]
            step = spec.comm(v.inp, ext[0], ext[1])
            if step is None:
                return v._replace(inp=inp, halted=True), None
            first = step[1]
            new = [first] + [spec.interior(ext[m - 1], ext[m], ext[m + 1]) for m in range(1, g)]
            accepted = v.accepted or spec.is_accepting(first)
            if not accepted and v.inp != END and (rv is None or rv.inp == END):
                # the input ends here: look one step ahead
                extra = spec.comm(END, new[0], new[1])
                accepted = extra is not None and spec.is_accepting(extra[1])
            return AccCell(tuple(new), inp, accepted, False), None
        ext = [lv.regs[-1]] + list(v.regs) + [right0]
        new = tuple(spec.interior(ext[m - 1], ext[m], ext[m + 1]) for m in range(1, g + 1))
        return AccCell(new, inp, False, False), None

    return CatSpec(
        states=None,
        accepting=lambda s: view(s).accepted,
        input_alphabet=tuple(spec.input_alphabet),
        output_alphabet=frozenset(),
        rule=rule,
        name="iat-acceptance",
    )


def compile_iat_to_cat(spec: IatSpec, ti: TimeComplexity, to: TimeComplexity) -> CatSpec:
    """A CAT computing T(spec) within the same (ti, to) bounds."""
    k1 = _factor(ti)
    k2 = _factor(to)
    rt = to.kind == "rt"
    K = 2 if rt else max(2, k2)
    g = max(2, k1)
    out = _output_track(spec, K, rt)
    acc = _acceptance_track(spec, g)
    cat = compose_tracks(acc, out, output_from="b", accept_from="a", name=f"cat({spec.name})")
    info = {
        "construction": {"compiler": "iat", "ti": str(ti), "to": str(to), "source": machine_to_dict(spec)},
        "step_cap": lambda n: (K + 1) * n + 16,
        "K": K,
        "g": g,
        "source": spec,
    }
    object.__setattr__(cat, "info", info)
    return cat


def decode_front(trace) -> list:
    """Per step of a compiled-CAT trace: index of the cell holding the comm cell."""
    front = []
    for conf in trace.configurations:
        pos = None
        for i, s in enumerate(conf.cells):
            if isinstance(s, tuple) and isinstance(s[1], OutCell) and s[1].role in (HOLD, DEFER, FIN):
                if s[1].role == HOLD or pos is None:
                    pos = i + 1
        front.append(pos)
    return front


# ---------------------------------------------------------------------------
# CAT -> IAT


class IatCell(NamedTuple):
    sym: str | None  # stored input symbol
    transit: str | None  # symbol moving right to its place
    sync: object  # synchronization component
    cat: object  # simulated CAT cell, None before firing
    out: str | None  # simulated output register
    sent: bool  # own output handed on (comm: emitted)
    slot: tuple | None  # (word, is_last) travelling left
    acc: bool  # comm only: the simulated CAT has accepted
    done: bool  # comm only: the whole output has been emitted


EMPTY_CELL = IatCell(None, None, QUIET, None, None, False, None, False, False)


def compile_cat_to_iat(cat: CatSpec) -> IatSpec:
    """An IAT computing T(cat); it runs in linear time when cat does."""

    def empty(s):
        return s.sym is None and s.transit is None

    def simulate(c, sync, left_cat, right):
        """Lockstep CAT step; the cells fire (start) together."""
        if c.cat is not None:
            rc = right.cat if right.cat is not None else BOUNDARY
            nxt, chunk = cat.transition(left_cat, c.cat, rc)
            return nxt, (c.out if c.out is not None else chunk)
        if is_fire(sync):
            return cat.initial_state(c.sym), None
        return None, None

    def wall(c, r):
        # the stored segment ends here once nothing is on its way right
        return None if (empty(r) and c.transit is None) else r.sync

    def interior(l, c, r):
        if c == EMPTY_CELL and l.transit is None:
            return c
        sym, transit = c.sym, None
        if l.transit is not None:
            if sym is None:
                sym = l.transit
            else:
                transit = l.transit
        sync = c.sync if empty(c) else sync_step(l.sync, c.sync, wall(c, r))
        cat_state, out = simulate(c, sync, l.cat if l.cat is not None else BOUNDARY, r)
        # output belt: release own packet after the left one, then forward
        sent, slot = c.sent, c.slot
        if c.out is not None and not c.sent and c.slot is None and l.sent:
            slot = (c.out, r.sym is None)
            sent = True
        elif c.sent and c.slot is None and r.slot is not None:
            slot = r.slot
        elif c.slot is not None and l.slot is None and l.sent:
            slot = None
        return IatCell(sym, transit, sync, cat_state, out, sent, slot, False, False)

    def comm(x, c, r):
        if c.done and c.acc:
            return None
        sym, transit, sync = c.sym, None, c.sync
        if x != END_MARKER:
            if sym is None:
                sym = x
            else:
                transit = x
        elif sync == QUIET:
            # a word of length one needs no synchronization
            sync = FIRE if c.transit is None else GENERAL_LEFT_END
        else:
            sync = sync_step(None, c.sync, wall(c, r))
        cat_state, out = simulate(c, sync, BOUNDARY, r)
        acc = c.acc or (cat_state is not None and cat.is_accepting(cat_state))
        emitted = ""
        sent, done = c.sent, c.done
        if out is not None and not sent:
            emitted = out
            sent = True
            done = r.sym is None
        elif c.sent and r.slot is not None:
            word, is_last = r.slot
            emitted = word
            done = is_last
        return emitted, IatCell(sym, transit, sync, cat_state, out, sent, None, acc, done)

    return IatSpec(
        states=None,
        accepting=lambda s: s.acc,
        input_alphabet=tuple(cat.input_alphabet),
        output_alphabet=frozenset(cat.output_alphabet),
        quiescent=EMPTY_CELL,
        end_marker=END_MARKER,
        interior_rule=interior,
        comm_rule=comm,
        name=f"iat({cat.name})",
        info={
            "construction": {"compiler": "cat", "source": machine_to_dict(cat)},
            "source": cat,
            "step_cap": lambda n: cat_to_iat_cap(n, _cap_of(cat, n)),
        },
    )


def _cap_of(machine, n):
    cap = machine.info.get("step_cap")
    return cap(n) if cap is not None else None


def cat_to_iat_cap(n: int, cat_cap: int | None = None) -> int:
    """A step cap comfortably above the compiled IAT's running time."""
    inner = 4 * n + 16 if cat_cap is None else cat_cap
    return 3 * n + inner + 3 * n + 8


__all__ = [
    "AccCell",
    "IatCell",
    "OutCell",
    "REST",
    "UnfairComplexity",
    "compile_cat_to_iat",
    "compile_iat_to_cat",
    "decode_front",
    "normalize_iat",
    "cat_to_iat_cap",
]
