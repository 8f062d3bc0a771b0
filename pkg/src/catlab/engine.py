"""Synchronous execution of CAT and IAT machines with full traces."""
from __future__ import annotations

from dataclasses import dataclass, field

from .machine import BOUNDARY, CatSpec, IatSpec


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class CatConfiguration:
    cells: tuple
    outputs: tuple  # word or None per cell
    time: int = 0


@dataclass(frozen=True)
class IatConfiguration:
    cells: tuple  # cells[0] is the communication cell; the rest is the grown tape
    emitted: str  # output emitted at this step
    time: int = 0


@dataclass
class RunTrace:
    kind: str
    word: str
    configurations: list = field(default_factory=list)
    accept_time: int | None = None
    output_complete_time: int | None = None
    final_output: str | None = None
    incomplete: bool = False
    halted: bool = False

    @property
    def accepted(self) -> bool:
        return self.accept_time is not None

    @property
    def success(self) -> bool:
        return self.final_output is not None

    def fill_times(self) -> list:
        """For a CAT run: the step at which each output register was filled."""
        n = len(self.word)
        times = [None] * n
        for conf in self.configurations:
            for i, o in enumerate(conf.outputs):
                if o is not None and times[i] is None:
                    times[i] = conf.time
        return times


def default_cap(n: int) -> int:
    return 4 * n + 16


def initial_configuration(spec: CatSpec, word: str) -> CatConfiguration:
    if len(word) == 0:
        raise EngineError("empty input: transductions are defined on non-empty words")
    for a in word:
        if a not in spec.input_alphabet:
            raise EngineError(f"symbol {a!r} is not in the input alphabet")
    return CatConfiguration(tuple(spec.initial_state(a) for a in word), (None,) * len(word), 0)


def cat_step(spec: CatSpec, config: CatConfiguration) -> CatConfiguration:
    cells = config.cells
    n = len(cells)
    new_cells = []
    new_out = []
    delta = spec.transition
    for i in range(n):
        l = cells[i - 1] if i > 0 else BOUNDARY
        r = cells[i + 1] if i < n - 1 else BOUNDARY
        nxt, word = delta(l, cells[i], r)
        new_cells.append(nxt)
        old = config.outputs[i]
        new_out.append(old if old is not None else word)
    return CatConfiguration(tuple(new_cells), tuple(new_out), config.time + 1)


def cat_run(spec: CatSpec, word: str, step_cap: int | None = None, keep: bool = True) -> RunTrace:
    """Run from the initial configuration until acceptance and full output.

    With ``keep=False`` only the last configuration is retained.
    """
    conf = initial_configuration(spec, word)
    cap = default_cap(len(word)) if step_cap is None else step_cap
    if cap < 1:
        raise EngineError("step_cap must be at least 1")
    trace = RunTrace("cat", word)
    trace.configurations.append(conf)
    if spec.is_accepting(conf.cells[0]):
        trace.accept_time = 0
    while True:
        if trace.output_complete_time is None and all(o is not None for o in conf.outputs):
            trace.output_complete_time = conf.time
        if trace.accept_time is not None and trace.output_complete_time is not None:
            break
        if conf.time >= cap:
            trace.incomplete = True
            return trace
        conf = cat_step(spec, conf)
        if keep:
            trace.configurations.append(conf)
        else:
            trace.configurations[-1:] = [conf]
        if trace.accept_time is None and spec.is_accepting(conf.cells[0]):
            trace.accept_time = conf.time
    trace.final_output = "".join(conf.outputs)
    return trace


def iat_run(spec: IatSpec, word: str, step_cap: int | None = None, keep: bool = True) -> RunTrace:
    """Run an IAT; the comm cell reads the word, then the end marker forever."""
    if len(word) == 0:
        raise EngineError("empty input: transductions are defined on non-empty words")
    for a in word:
        if a not in spec.input_alphabet:
            raise EngineError(f"symbol {a!r} is not in the input alphabet")
    q = spec.quiescent
    cap = default_cap(len(word)) if step_cap is None else step_cap
    trace = RunTrace("iat", word)
    cells = (q, q)
    conf = IatConfiguration(cells, "", 0)
    trace.configurations.append(conf)
    pieces = []
    if spec.is_accepting(q):
        trace.accept_time = 0
    t = 0
    while True:
        if t >= cap:
            trace.incomplete = True
            return trace
        x = word[t] if t < len(word) else spec.end_marker
        step = spec.comm(x, cells[0], cells[1])
        if step is None:
            trace.halted = True
            break
        out, first = step
        n = len(cells)
        new = [first]
        interior = spec.interior
        for j in range(1, n):
            r = cells[j + 1] if j + 1 < n else q
            new.append(interior(cells[j - 1], cells[j], r))
        # grow the tape so that it always ends in a quiescent cell
        if new[-1] != q:
            new.append(q)
        cells = tuple(new)
        t += 1
        pieces.append(out)
        conf = IatConfiguration(cells, out, t)
        if keep:
            trace.configurations.append(conf)
        else:
            trace.configurations[-1:] = [conf]
        if trace.accept_time is None and spec.is_accepting(first):
            trace.accept_time = t
    trace.output_complete_time = t
    if trace.accept_time is not None:
        trace.final_output = "".join(pieces)
    return trace


def run_machine(spec, word: str, step_cap: int | None = None, keep: bool = True) -> RunTrace:
    if isinstance(spec, CatSpec):
        return cat_run(spec, word, step_cap, keep)
    if isinstance(spec, IatSpec):
        return iat_run(spec, word, step_cap, keep)
    raise TypeError(f"cannot run {type(spec).__name__}")


def _select(how, a, b):
    if callable(how):
        return how(a, b)
    if how == "a":
        return a
    if how == "b":
        return b
    if how == "both":
        return a and b
    if how == "either":
        return a or b
    raise ValueError(f"unknown selector {how!r}")


def compose_tracks(a: CatSpec, b: CatSpec, output_from="b", accept_from="a", name: str = "") -> CatSpec:
    """Product of two CATs over the same input alphabet.

    ``output_from`` is ``"a"``, ``"b"`` or a function of both output chunks;
    ``accept_from`` is ``"a"``, ``"b"``, ``"both"``, ``"either"`` or a function
    of both acceptance flags.
    """
    if tuple(sorted(a.input_alphabet)) != tuple(sorted(b.input_alphabet)):
        raise ValueError("tracks must share the input alphabet")

    def split(x):
        return (BOUNDARY, BOUNDARY) if x == BOUNDARY else x

    def rule(l, c, r):
        la, lb = split(l)
        ra, rb = split(r)
        na, oa = a.transition(la, c[0], ra)
        nb, ob = b.transition(lb, c[1], rb)
        if output_from == "a":
            out = oa
        elif output_from == "b":
            out = ob
        else:
            out = output_from(oa, ob)
        return (na, nb), out

    initial = {x: (a.initial_state(x), b.initial_state(x)) for x in a.input_alphabet}
    states = None
    if a.states is not None and b.states is not None:
        states = frozenset((x, y) for x in a.states for y in b.states)
    return CatSpec(
        states=states,
        accepting=lambda s: _select(accept_from, a.is_accepting(s[0]), b.is_accepting(s[1])),
        input_alphabet=tuple(a.input_alphabet),
        output_alphabet=frozenset(a.output_alphabet) | frozenset(b.output_alphabet),
        rule=rule,
        initial=initial,
        name=name or f"{a.name}*{b.name}",
    )
