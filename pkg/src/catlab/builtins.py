"""Hand-built CATs for the example transductions over {a, b}.

Every builder returns a rule-backed :class:`CatSpec`; input symbols are the
initial cell states and all later states are tuples.
"""
from __future__ import annotations

from .engine import compose_tracks
from .fssp import UNSTARTED, build_sync, is_fire
from .machine import BOUNDARY, CatSpec

ALPHABET = ("a", "b")
_SYNC = build_sync("two-general")


def _lift(x, fn):
    return BOUNDARY if x == BOUNDARY else fn(x)


# ---------------------------------------------------------------------------
# copy: w -> ww


def _copy_view(s):
    # (left-moving register, right-moving register, left front, right front, done, initial)
    if isinstance(s, str):
        return (s, s, False, False, False, True)
    return s + (False,)


def _copy_rule(l, c, r):
    L, R, _, _, done, init = _copy_view(c)
    lv = None if l == BOUNDARY else _copy_view(l)
    rv = None if r == BOUNDARY else _copy_view(r)
    new_L = rv[0] if rv is not None else None
    new_R = lv[1] if lv is not None else None
    hit_l = (lv is None and init) or (lv is not None and lv[2])
    hit_r = (rv is None and init) or (rv is not None and rv[3])
    out = None
    front_l = front_r = False
    if not done and (hit_l or hit_r):
        if hit_l and hit_r:
            out = L + R
        elif hit_l:
            out = L + (rv[0] if rv is not None and rv[0] else "")
        else:
            out = (lv[1] if lv is not None and lv[1] else "") + R
        front_l, front_r = hit_l, hit_r
        done = True
    return (new_L, new_R, front_l, front_r, done), out


def build_copy_cat() -> CatSpec:
    """{(w, ww)}: two shift registers and a front signal from each end."""
    return CatSpec(
        states=None,
        accepting=lambda s: isinstance(s, str),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(ALPHABET),
        rule=_copy_rule,
        name="copy",
        info={"construction": {"builtin": "copy"}},
    )


# ---------------------------------------------------------------------------
# sort: w -> a^|w|_a b^|w|_b


def _sym(x):
    return x if isinstance(x, str) else x[0]


def _swap(l, c, r):
    """A b followed by an a swap; such pairs never overlap."""
    if c == "b" and r == "a":
        return "a"
    if c == "a" and l == "b":
        return "b"
    return c


def _sync_of(s):
    return UNSTARTED if isinstance(s, str) else s[1]


def _emit_on_fire(l, c, r, symbol):
    """Next sync state and the chunk to emit when it fires."""
    ls = BOUNDARY if l == BOUNDARY else _sync_of(l)
    rs = BOUNDARY if r == BOUNDARY else _sync_of(r)
    nxt = _SYNC.transition(ls, _sync_of(c), rs)
    return nxt, (symbol if is_fire(nxt) and not is_fire(_sync_of(c)) else None)


def _sort_rule(l, c, r):
    sym = _swap(_lift(l, _sym), _sym(c), _lift(r, _sym))
    sync, out = _emit_on_fire(l, c, r, sym)
    return (sym, sync), out


def build_sort_cat() -> CatSpec:
    """Sorting by local b/a transpositions, emitted when the cells fire at step n."""
    return CatSpec(
        states=None,
        accepting=lambda s: isinstance(s, str),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(ALPHABET),
        rule=_sort_rule,
        name="sort",
        info={"construction": {"builtin": "sort"}},
    )


def sort_tracks() -> tuple[CatSpec, CatSpec]:
    """The sort machine as separate acceptance and output tracks."""
    accept = CatSpec(
        states=frozenset(ALPHABET) | {"ok"},
        accepting=frozenset(ALPHABET),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(),
        delta={},
        default_rule=True,
        name="accept-all",
    )
    output = CatSpec(
        states=None,
        accepting=frozenset(),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(ALPHABET),
        rule=_sort_rule,
        name="sort-output",
    )
    return accept, output


def build_sort_cat_from_tracks() -> CatSpec:
    accept, output = sort_tracks()
    return compose_tracks(accept, output, output_from="b", accept_from="a", name="sort")


# ---------------------------------------------------------------------------
# reverse: w -> w^R


def _rev_view(s):
    # (upper, lower); None is the empty register
    return (s, None) if isinstance(s, str) else s[0]


def _rev_rule(l, c, r):
    p2, q2 = _rev_view(c)
    if l == BOUNDARY and r == BOUNDARY:
        regs = (q2, p2)
    elif l == BOUNDARY:
        regs = (_rev_view(r)[0], p2)
    elif r == BOUNDARY:
        regs = (q2, _rev_view(l)[1])
    else:
        regs = (_rev_view(r)[0], _rev_view(l)[1])
    sync, out = _emit_on_fire(l, c, r, regs[1] or "")
    return (regs, sync), out


def build_reverse_cat() -> CatSpec:
    """Circulating two-track register; the lower track holds w^R at step n."""
    return CatSpec(
        states=None,
        accepting=lambda s: isinstance(s, str),
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(ALPHABET),
        rule=_rev_rule,
        name="reverse",
        info={"construction": {"builtin": "reverse"}},
    )


# ---------------------------------------------------------------------------
# square marker: ww -> w c^|w|
#
# Output: a cell belongs to the left half when the signal from the left end
# reaches it strictly before the signal from the right end; at firing it emits
# its symbol there and c elsewhere.
#
# Acceptance (even n = 2m, finishes at 2n): the end signals become adjacent at
# the centre at time m; cell m then starts a launch signal moving left.  It
# releases every a_j as a right-moving element, a_m first.  An element stops in
# the rightmost free cell, so a_j settles on cell m+j and is compared with the
# symbol stored there.  All stops lie on one anti-diagonal, along which a
# left-moving result signal collects the comparisons and reaches cell 1 at 4m.


def _sq_view(s):
    # (orig, sync, half, sig from left end, sig from right end, launch, moving, stopped, result)
    if isinstance(s, str):
        return (s, UNSTARTED, None, False, False, False, None, None, None), True
    return s, False


def _square_rule(l, c, r):
    cv, init = _sq_view(c)
    lv = None if l == BOUNDARY else _sq_view(l)[0]
    rv = None if r == BOUNDARY else _sq_view(r)[0]
    orig, sync, half, sr, sl, launch, mov, occ, res = cv
    # end signals
    n_sr = (lv is None and init) or (lv is not None and lv[3])
    n_sl = (rv is None and init) or (rv is not None and rv[4])
    if half is None:
        if n_sr and n_sl:
            half = "M"
        elif n_sr:
            half = "L"
        elif n_sl:
            half = "R"
    # centre of an even-length word: my left-end signal meets the right-end one next door
    centre = sr and rv is not None and rv[4]
    n_launch = centre or (rv is not None and rv[5])
    n_mov = orig if n_launch else None
    n_occ = occ
    n_res = None
    arriving = lv[6] if lv is not None else None
    right_full = rv is None or rv[7] is not None
    if arriving is not None and right_full and occ is None:
        n_occ = arriving
        prior = True if rv is None else rv[8]
        n_res = prior is True and arriving == orig
    elif arriving is not None and n_mov is None:
        n_mov = arriving
    if n_res is None and rv is not None and rv[8] is not None:
        n_res = rv[8]
    if lv is None and cv[8] is not None:
        n_res = cv[8]  # the result stays in cell 1 once it has arrived
    nsync = _SYNC.transition(
        BOUNDARY if lv is None else lv[1], sync, BOUNDARY if rv is None else rv[1]
    )
    out = None
    if is_fire(nsync) and not is_fire(sync):
        out = orig if half == "L" else "c"
    return (orig, nsync, half, n_sr, n_sl, n_launch and lv is not None, n_mov, n_occ, n_res), out


def _square_accepts(s):
    return not isinstance(s, str) and s[8] is True


def build_square_marker_cat() -> CatSpec:
    """{(ww, w c^|w|)} with a linear-time acceptor for {ww}."""
    return CatSpec(
        states=None,
        accepting=_square_accepts,
        input_alphabet=ALPHABET,
        output_alphabet=frozenset(ALPHABET) | {"c"},
        rule=_square_rule,
        name="square_marker",
        info={"construction": {"builtin": "square_marker"}},
    )


BUILTINS = {
    "copy": build_copy_cat,
    "sort": build_sort_cat,
    "reverse": build_reverse_cat,
    "square_marker": build_square_marker_cat,
}


def builtin(name: str) -> CatSpec:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}") from None
