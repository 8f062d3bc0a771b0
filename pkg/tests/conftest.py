import random
from itertools import product

import pytest
from hypothesis import settings

from catlab.machine import BOUNDARY, CatSpec

settings.register_profile("catlab", deadline=None, max_examples=60)
settings.load_profile("catlab")


def random_cat(rng: random.Random, n_states: int = 3, alphabet=("a", "b"), outputs="xy") -> CatSpec:
    """A small explicit CAT with a total random delta."""
    extra = [f"s{i}" for i in range(max(0, n_states - len(alphabet)))]
    states = list(alphabet) + extra
    delta = {}
    side = states + [BOUNDARY]
    for l, c, r in product(side, states, side):
        nxt = rng.choice(states)
        out = None if rng.random() < 0.6 else "".join(rng.choice(outputs) for _ in range(rng.randint(0, 2)))
        delta[(l, c, r)] = (nxt, out)
    accepting = frozenset(s for s in states if rng.random() < 0.4)
    return CatSpec(
        states=frozenset(states),
        accepting=accepting,
        input_alphabet=tuple(alphabet),
        output_alphabet=frozenset(outputs),
        delta=delta,
        name="random",
    )


@pytest.fixture
def rng():
    return random.Random(12345)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """Records one pass/fail line per acceptance criterion for the summary."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
