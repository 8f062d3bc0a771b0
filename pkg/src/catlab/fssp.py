"""Minimal-time firing squad synchronization as reusable CAT tracks.

The construction is signal based.  A general launches a main signal at speed
one and an unbounded family of slower markers: marker k+1 advances one cell
for every second signal it receives from marker k, so every marker is slower
than the one before, and a reflected main signal meets marker k exactly at a
point dividing its segment.  Meetings create new generals, splitting every
segment in two (a cell for odd lengths, a pair of cells for even lengths)
until every cell is a general with general or boundary neighbours.

Per direction a cell carries: ``ray`` (main signal), ``mk`` (marker with a
parity bit, None when absent), ``fr`` (family signal in flight towards the
marker) and ``frs`` (the marker just moved in, so the family signal that
pushed it must not be counted twice).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .machine import BOUNDARY, CatSpec


class SyncState(NamedTuple):
    gen: str | None  # None, "B" (both ways), "L", "R"; "U" before the first step
    fire: bool
    rayR: bool
    mkR: int | None
    frR: bool
    frsR: bool
    rayL: bool
    mkL: int | None
    frL: bool
    frsL: bool


def _mk(gen=None, rayR=False, rayL=False, fire=False):
    return SyncState(gen, fire, rayR, None, False, False, rayL, None, False, False)


QUIET = _mk()
FIRE = _mk("F", fire=True)
UNSTARTED = _mk("U")
GENERAL_LEFT_END = _mk("R", rayR=True)
GENERAL_RIGHT_END = _mk("L", rayL=True)


def mirror(s):
    if s is None:
        return None
    g = {"L": "R", "R": "L"}.get(s.gen, s.gen)
    return SyncState(g, s.fire, s.rayL, s.mkL, s.frL, s.frsL, s.rayR, s.mkR, s.frR, s.frsR)


def _is_gen(s):
    return s is None or s.gen is not None


def _half(a, c, b):
    """Right-travelling components of the successor of c (a left, b right)."""
    inc = b is not None and b.frR
    ray = a is not None and a.rayR
    mk = None
    frs = fr = False
    ghost = c.mkR == 1 and b is not None and b.frsR
    if c.mkR is not None and not ghost:
        mk = c.mkR ^ (1 if inc else 0)
        inc = False
    elif a is not None and a.mkR == 1 and inc:
        # the neighbouring marker has collected its second signal and moves in
        mk = 0
        frs = fr = True
        inc = False
    if inc:
        fr = True
    return ray, mk, fr, frs, ray


def sync_step(a, c, b):
    """Successor of cell state c; ``None`` stands for the boundary."""
    if c.fire:
        return c
    if c.gen == "U":
        # every cell starts unstarted; the ends become generals
        if a is None and b is None:
            return FIRE
        if a is None:
            return GENERAL_LEFT_END
        if b is None:
            return GENERAL_RIGHT_END
        return QUIET
    if c.gen is not None and _is_gen(a) and _is_gen(b):
        return FIRE
    rR, mR, fR, sR, eR = _half(a, c, b)
    rL, mL, fL, sL, eL = _half(mirror(b), mirror(c), mirror(a))
    gen = c.gen
    if gen is None:
        if rR and rL:
            gen = "B"
        elif c.rayR and b is not None and b.rayL:
            # crossing signals in adjacent cells: the pair becomes a double general
            gen = "L"
            eR = eL = False
        elif c.rayL and a is not None and a.rayR:
            gen = "R"
            eR = eL = False
        elif rR and b is None:
            gen = "L"
        elif rL and a is None:
            gen = "R"
        elif rL and mR is not None:
            gen = "L" if mR == 1 else "B"
        elif rR and mL is not None:
            gen = "R" if mL == 1 else "B"
        elif c.rayL and a is not None and a.mkR is not None:
            p = a.mkR ^ (1 if c.frR else 0)
            if p == 1 and not (a.mkR == 1 and c.frR):
                gen = "R"
        if gen is None and c.rayR and b is not None and b.mkL is not None:
            p = b.mkL ^ (1 if c.frL else 0)
            if p == 1 and not (b.mkL == 1 and c.frL):
                gen = "L"
        if gen == "L" and rL and mR == 1:
            eL = False
        if gen == "R" and rR and mL == 1:
            eR = False
        fR = fR or eR
        fL = fL or eL
        if gen is not None:
            return SyncState(gen, False, gen in ("B", "R"), None, fR, sR, gen in ("B", "L"), None, fL, sL)
    fR = fR or eR
    fL = fL or eL
    if gen is not None:
        # generals absorb arriving signals and give birth to new markers
        if gen in ("B", "R") and mR is None:
            mR = 1 if (b is not None and b.frR) else 0
            fR = False
        if gen in ("B", "L") and mL is None:
            mL = 1 if (a is not None and a.frL) else 0
            fL = False
        return SyncState(gen, False, False, mR, fR, sR, False, mL, fL, sL)
    return SyncState(None, False, rR, mR, fR, sR, rL, mL, fL, sL)


def sync_label(s) -> str:
    """Short printable label for traces."""
    if s == BOUNDARY:
        return BOUNDARY
    if s.fire:
        return "F"
    if s.gen is not None:
        return s.gen
    if s.rayR or s.rayL:
        return ">" if not s.rayL else ("<" if not s.rayR else "X")
    if s.mkR is not None or s.mkL is not None:
        return "m"
    if s.frR or s.frL:
        return ":"
    return "."


def is_fire(s) -> bool:
    return isinstance(s, SyncState) and s.fire


@dataclass
class SyncComponent:
    variant: str  # "two-general" or "single-general"
    fire_time: Callable[[int], int]
    overrides: dict = field(default_factory=dict)

    def transition(self, l, c, r):
        key = (l, c, r)
        if key in self.overrides:
            return self.overrides[key]
        a = None if l == BOUNDARY else l
        b = None if r == BOUNDARY else r
        return sync_step(a, c, b)

    def initial_configuration(self, n: int) -> tuple:
        if n < 1:
            raise ValueError("n must be positive")
        if self.variant == "two-general":
            return (UNSTARTED,) * n
        if n == 1:
            return (FIRE,)
        return (GENERAL_LEFT_END,) + (QUIET,) * (n - 1)

    def is_fire(self, s) -> bool:
        return is_fire(s)

    def track(self, input_alphabet) -> CatSpec:
        """The component as a CAT track: every input symbol starts unstarted."""
        if self.variant != "two-general":
            raise ValueError("only the two-general variant starts from the input")
        return CatSpec(
            states=None,
            accepting=frozenset(),
            input_alphabet=tuple(input_alphabet),
            output_alphabet=frozenset(),
            rule=lambda l, c, r: (self.transition(l, c, r), None),
            initial={a: UNSTARTED for a in input_alphabet},
            name="sync",
        )

    def corrupted(self, key, value) -> "SyncComponent":
        return SyncComponent(self.variant, self.fire_time, {**self.overrides, key: value})

    def reachable_states(self, n_max: int = 40) -> set:
        seen = set()
        for n in range(1, n_max + 1):
            conf = list(self.initial_configuration(n))
            for _ in range(self.fire_time(n) + 1):
                seen.update(conf)
                conf = _advance(self, conf)
        return seen


def _advance(component, conf):
    n = len(conf)
    step = component.transition
    return [
        step(conf[i - 1] if i else BOUNDARY, conf[i], conf[i + 1] if i < n - 1 else BOUNDARY)
        for i in range(n)
    ]


def build_sync(variant: str = "two-general") -> SyncComponent:
    if variant == "two-general":
        return SyncComponent(variant, lambda n: n)
    if variant == "single-general":
        return SyncComponent(variant, lambda n: 0 if n == 1 else 2 * n - 2)
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class SyncFailure:
    n: int
    problem: str  # "early", "late", "partial"
    time: int

    def __str__(self):
        return f"n={self.n}: {self.problem} firing at step {self.time}"


def simulate_sync(component: SyncComponent, n: int, steps: int | None = None) -> list:
    """Configurations from time 0 up to ``steps`` (default: the firing time)."""
    steps = component.fire_time(n) if steps is None else steps
    conf = list(component.initial_configuration(n))
    hist = [tuple(conf)]
    for _ in range(steps):
        conf = _advance(component, conf)
        hist.append(tuple(conf))
    return hist


def verify_sync(component: SyncComponent, n_max: int) -> list[SyncFailure]:
    """Check exact simultaneous firing for every n in 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    ids: dict = {}
    states: list = []
    table: dict = {}

    def intern(s):
        k = ids.get(s)
        if k is None:
            k = ids[s] = len(states)
            states.append(s)
        return k

    bnd = intern(BOUNDARY)
    fires: list = []  # per state id: fire flag

    def fire_flag(k):
        while len(fires) <= k:
            fires.append(is_fire(states[len(fires)]) if states[len(fires)] != BOUNDARY else False)
        return fires[k]

    failures = []
    for n in range(1, n_max + 1):
        conf = [intern(s) for s in component.initial_configuration(n)]
        target = component.fire_time(n)
        t = 0
        failed = None
        while True:
            flags = [fire_flag(k) for k in conf]
            if t < target and any(flags):
                failed = SyncFailure(n, "early", t)
                break
            if t == target:
                if not all(flags):
                    failed = SyncFailure(n, "partial" if any(flags) else "late", t)
                break
            padded = [bnd] + conf + [bnd]
            nxt = []
            for i in range(n):
                key = (padded[i], padded[i + 1], padded[i + 2])
                v = table.get(key)
                if v is None:
                    s = component.transition(states[key[0]], states[key[1]], states[key[2]])
                    v = table[key] = intern(s)
                nxt.append(v)
            conf = nxt
            t += 1
        if failed is not None:
            failures.append(failed)
    return failures
