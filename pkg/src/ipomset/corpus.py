"""Built-in worked examples.

The fig* builders return the fixed pomsets, HDAs, and presentations
used by the documentation, the test suite, and the `corpus` command.
Names follow the numbering of the bundled examples.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable

from .algebra import (
    Presentation,
    coherent_closure,
    is_counter_free_module,
    make_presentation,
    presentation_to_hda,
    suffix_presentation,
    validate_presentation,
)
from .errors import CorpusMismatch, UnknownName
from .fo import builtin, fo_language, satisfies
from .hda import (
    HDA,
    accepts,
    enumerate_language,
    is_counter_free_hda,
    validate_hda,
)
from .pomsets import (
    IiPomset,
    canonical_pomset,
    glue,
    glue_st,
    make_ipomset,
    st_decompose_sparse,
    starter,
    terminator,
)


def fig1_left() -> IiPomset:
    """Pomset with b preceding d; b enters started, a and d stay open."""
    return make_ipomset(
        ("a", "b", "d"), ("a", "b", "d"),
        precedence=[("b", "d")],
        event_order=[("a", "b"), ("a", "d")],
        sources=("b",), targets=("a", "d"),
    )


def fig1_right() -> IiPomset:
    """Pomset with a preceding c; a and d enter started, d stays open."""
    return make_ipomset(
        ("a", "c", "d"), ("a", "c", "d"),
        precedence=[("a", "c")],
        event_order=[("a", "d"), ("c", "d")],
        sources=("a", "d"), targets=("d",),
    )


def fig1_glued() -> IiPomset:
    """The composite of fig1_left and fig1_right."""
    return make_ipomset(
        ("a", "b", "c", "d"), ("a", "b", "c", "d"),
        precedence=[("b", "d"), ("a", "c"), ("b", "c")],
        event_order=[("a", "b"), ("a", "d"), ("c", "d")],
        sources=("b",), targets=("d",),
    )


def fig3_pomset() -> IiPomset:
    """Two a-events interleaved with a b and a c; the last a stays open."""
    return make_ipomset(
        ("x", "y", "z", "w"), ("a", "b", "c", "a"),
        precedence=[("x", "z"), ("x", "w"), ("y", "w")],
        event_order=[("x", "y"), ("z", "y"), ("z", "w")],
        sources=(), targets=("w",),
    )


def p2n_pomset(n: int) -> IiPomset:
    """Zigzag of 2n a-events, each concurrent with its neighbours only.

    Odd positions sit above even ones in the event order, so the shape
    fixes the parity of its length without any precedence counting.
    """
    k = 2 * n
    events = tuple(f"e{i}" for i in range(k))
    prec = [(f"e{i}", f"e{j}") for i in range(k) for j in range(i + 2, k)]
    evord = []
    for i in range(k - 1):
        if i % 2 == 0:
            evord.append((f"e{i}", f"e{i + 1}"))
        else:
            evord.append((f"e{i + 1}", f"e{i}"))
    return make_ipomset(events, "a" * k, prec, evord)


def fig2_hda() -> HDA:
    """Grid of nine vertices and twelve edges carrying three squares.

    Vertices are named by grid coordinates; h and v edges step right
    and up.  The accepting cell is the top right vertical a-edge, so
    every accepted pomset leaves its final a unterminated.
    """
    cells: dict[str, tuple[str, ...]] = {}
    lower: dict[str, dict[int, str]] = {}
    upper: dict[str, dict[int, str]] = {}
    for i in range(3):
        for j in range(3):
            cells[f"{i}{j}"] = ()
    hlab = {(0, 0): "a", (1, 0): "c", (0, 1): "a", (1, 1): "c",
            (0, 2): "a", (1, 2): "c"}
    vlab = {(0, 0): "b", (1, 0): "b", (2, 0): "b",
            (0, 1): "a", (1, 1): "a", (2, 1): "a"}
    for (i, j), l in hlab.items():
        e = f"h{i}{j}"
        cells[e] = (l,)
        lower[e] = {0: f"{i}{j}"}
        upper[e] = {0: f"{i + 1}{j}"}
    for (i, j), l in vlab.items():
        e = f"v{i}{j}"
        cells[e] = (l,)
        lower[e] = {0: f"{i}{j}"}
        upper[e] = {0: f"{i}{j + 1}"}
    cells["sx"] = ("a", "b")
    lower["sx"] = {0: "v00", 1: "h00"}
    upper["sx"] = {0: "v10", 1: "h01"}
    cells["sy"] = ("c", "b")
    lower["sy"] = {0: "v10", 1: "h10"}
    upper["sy"] = {0: "v20", 1: "h11"}
    cells["sz"] = ("c", "a")
    lower["sz"] = {0: "v11", 1: "h11"}
    upper["sz"] = {0: "v21", 1: "h12"}
    return validate_hda(
        list(cells), cells, lower, upper, initial=["00"], accepting=["v21"])


def fig5b_hda() -> HDA:
    """One filled square plus a b-cycle between two accepting vertices.

    The two middle b-edges form a cycle of length two, so reachability
    under repeated b alternates and the HDA is not counter-free even
    though its language is plain.
    """
    cells = {
        "00": (), "01": (), "10": (), "11": (), "20": (),
        "b_left": ("b",), "a_bottom": ("a",), "a_top": ("a",),
        "b_up": ("b",), "b_down": ("b",), "b_right": ("b",),
        "b_loop": ("b",),
        "ab": ("a", "b"),
    }
    lower = {
        "b_left": {0: "00"}, "a_bottom": {0: "00"}, "a_top": {0: "01"},
        "b_up": {0: "10"}, "b_down": {0: "11"}, "b_right": {0: "10"},
        "b_loop": {0: "20"},
        "ab": {0: "b_left", 1: "a_bottom"},
    }
    upper = {
        "b_left": {0: "01"}, "a_bottom": {0: "10"}, "a_top": {0: "11"},
        "b_up": {0: "11"}, "b_down": {0: "10"}, "b_right": {0: "20"},
        "b_loop": {0: "20"},
        "ab": {0: "b_up", 1: "a_top"},
    }
    return validate_hda(
        list(cells), cells, lower, upper,
        initial=["00"], accepting=["10", "11", "20"])


def fig5_merged_hda() -> HDA:
    """fig5b with its three accepting vertices collapsed into one.

    All four b-edges between accepting cells become parallel loops, so
    repeated b reaches a fixed cell set and the counter disappears.
    """
    cells = {
        "00": (), "01": (), "m": (),
        "b_left": ("b",), "a_bottom": ("a",), "a_top": ("a",),
        "b_up": ("b",), "b_down": ("b",), "b_right": ("b",),
        "b_loop": ("b",),
        "ab": ("a", "b"),
    }
    lower = {
        "b_left": {0: "00"}, "a_bottom": {0: "00"}, "a_top": {0: "01"},
        "b_up": {0: "m"}, "b_down": {0: "m"}, "b_right": {0: "m"},
        "b_loop": {0: "m"},
        "ab": {0: "b_left", 1: "a_bottom"},
    }
    upper = {
        "b_left": {0: "01"}, "a_bottom": {0: "m"}, "a_top": {0: "m"},
        "b_up": {0: "m"}, "b_down": {0: "m"}, "b_right": {0: "m"},
        "b_loop": {0: "m"},
        "ab": {0: "b_up", 1: "a_top"},
    }
    return validate_hda(
        list(cells), cells, lower, upper, initial=["00"], accepting=["m"])


def point_hda() -> HDA:
    """A single vertex, both initial and accepting; accepts only id_e."""
    return validate_hda(["v"], {"v": ()}, {}, {},
                        initial=["v"], accepting=["v"])


def a_loop_hda() -> HDA:
    """One vertex with an a-loop; accepts every finite word of a's."""
    return validate_hda(
        ["v", "e"], {"v": (), "e": ("a",)},
        {"e": {0: "v"}}, {"e": {0: "v"}},
        initial=["v"], accepting=["v"])


def aa_cycle_hda() -> HDA:
    """Two vertices joined by a-edges in a cycle; accepts even a-words."""
    return validate_hda(
        ["v0", "v1", "e01", "e10"],
        {"v0": (), "v1": (), "e01": ("a",), "e10": ("a",)},
        {"e01": {0: "v0"}, "e10": {0: "v1"}},
        {"e01": {0: "v1"}, "e10": {0: "v0"}},
        initial=["v0"], accepting=["v0"])


def fig5a_presentation() -> Presentation:
    """Counter-free module presentation of one a, or a with b's around it.

    The recognized language is the downward closure of (a paralleled
    with b) followed by any number of b's, together with the single
    letter a.  Element names follow a grid reading of the diagram; all
    elements classify pomsets with empty source interface.
    """
    tgt = {
        "v00": (), "v02": (), "v20": (), "v22": (), "v40": (),
        "v10": ("a",), "v12": ("a",),
        "v01": ("b",), "v21": ("b",), "v30": ("b",), "v31": ("b",),
        "v41": ("b",),
        "v11": ("a", "b"),
    }
    st_a = starter(("a",), (0,))
    st_b = starter(("b",), (0,))
    tm_a = terminator(("a",), (0,))
    tm_b = terminator(("b",), (0,))
    action = {
        ("v00", st_b): "v01",
        ("v01", tm_b): "v02",
        ("v00", st_a): "v10",
        ("v10", starter(("a", "b"), (1,))): "v11",
        ("v01", starter(("a", "b"), (0,))): "v11",
        ("v00", starter(("a", "b"), (0, 1))): "v11",
        ("v11", terminator(("a", "b"), (1,))): "v12",
        ("v11", terminator(("a", "b"), (0,))): "v21",
        ("v11", terminator(("a", "b"), (0, 1))): "v22",
        ("v02", st_a): "v12",
        ("v10", tm_a): "v20",
        ("v12", tm_a): "v22",
        ("v21", tm_b): "v22",
        ("v22", st_b): "v31",
        ("v31", tm_b): "v20",
        ("v20", st_b): "v30",
        ("v30", tm_b): "v40",
        ("v40", st_b): "v41",
        ("v41", tm_b): "v40",
    }
    return make_presentation(
        sorted(tgt), {m: () for m in tgt}, tgt, action,
        {(): "v00"}, ["v20", "v22", "v40"])


CORPUS_HDAS: dict[str, Callable[[], HDA]] = {
    "fig2": fig2_hda,
    "fig5b": fig5b_hda,
    "fig5-merged": fig5_merged_hda,
    "point": point_hda,
    "a-loop": a_loop_hda,
    "aa-cycle": aa_cycle_hda,
}


@dataclass(frozen=True)
class CorpusEntry:
    """A named example with a runner that rechecks its known results."""

    name: str
    summary: str
    run: Callable[[], dict]


def _expect(entry: str, check: str, got, want) -> dict:
    if got != want:
        raise CorpusMismatch(entry, f"{check}: expected {want!r}, got {got!r}")
    value = got if isinstance(got, (bool, int, str)) else str(got)
    return {"check": check, "value": value}


def _report(name: str, checks: list[dict]) -> dict:
    return {"entry": name, "summary": ENTRIES[name].summary, "checks": checks}


def _run_fig1() -> dict:
    glued = glue(fig1_left(), fig1_right())
    checks = [
        _expect("fig1", "events after gluing", len(glued), 4),
        _expect("fig1", "gluing matches the drawn composite",
                canonical_pomset(glued) == canonical_pomset(fig1_glued()), True),
    ]
    return _report("fig1", checks)


def _run_fig2() -> dict:
    x = fig2_hda()
    checks = [
        _expect("fig2", "cells", len(x), 24),
        _expect("fig2", "dimension", x.dimension, 2),
        _expect("fig2", "accepts the dashed-path pomset",
                accepts(x, fig3_pomset()), True),
        _expect("fig2", "counter-free", is_counter_free_hda(x)[0], True),
    ]
    return _report("fig2", checks)


def _run_fig3() -> dict:
    p = fig3_pomset()
    src, letters = st_decompose_sparse(p)
    checks = [
        _expect("fig3", "source conclist", src.labels, ()),
        _expect("fig3", "sparse letters", [str(l) for l in letters],
                ["st[+a +b]", "tm[-a b]", "st[+c b]",
                 "tm[c -b]", "st[c +a]", "tm[-c a]"]),
        _expect("fig3", "gluing the letters restores the pomset",
                canonical_pomset(glue_st(letters, src)) == canonical_pomset(p),
                True),
    ]
    return _report("fig3", checks)


def _run_fig5a() -> dict:
    p = fig5a_presentation()
    ok, witness = is_counter_free_module(p)
    checks = [
        _expect("fig5a", "validation issues", validate_presentation(p), []),
        _expect("fig5a", "elements", len(p), 13),
        _expect("fig5a", "module counter-free", ok, True),
    ]
    return _report("fig5a", checks)


def _run_fig5_counter() -> dict:
    x = presentation_to_hda(coherent_closure(fig5a_presentation()))
    ok, witness = is_counter_free_hda(x)
    checks = [
        _expect("fig5-counter", "closure cells", len(x), 13),
        _expect("fig5-counter", "counter found", not ok, True),
        _expect("fig5-counter", "counter word",
                [str(l) for l in witness["word"]], ["st[+b]", "tm[-b]"]),
        _expect("fig5-counter", "counter period", witness["period"], 2),
        _expect("fig5-counter", "counter swaps the accepting edge cells",
                {("v20", "v22"), ("v22", "v20")} <= witness["relation"], True),
    ]
    return _report("fig5-counter", checks)


def _run_fig5_merged() -> dict:
    x = presentation_to_hda(coherent_closure(fig5a_presentation()))
    sp = suffix_presentation(x)
    y = presentation_to_hda(coherent_closure(sp))
    merged = fig5_merged_hda()
    checks = [
        _expect("fig5-merged", "suffix elements", len(sp), 12),
        _expect("fig5-merged", "accepting classes", sorted(sp.accepting),
                ["[]{v20,v40}"]),
        _expect("fig5-merged", "suffix module counter-free",
                is_counter_free_module(sp)[0], True),
        _expect("fig5-merged", "rebuilt state space counter-free",
                is_counter_free_hda(y)[0], True),
        _expect("fig5-merged", "language matches the drawn merged shape",
                enumerate_language(y, 6) == enumerate_language(merged, 6), True),
        _expect("fig5-merged", "language forms up to six events",
                len(enumerate_language(merged, 6)), 16),
    ]
    return _report("fig5-merged", checks)


def _ladder(k: int) -> IiPomset:
    """k pairs of concurrent a-events run one after the other."""
    empty = make_ipomset((), "")
    pair = make_ipomset("xy", "aa", (), [("x", "y")])
    return reduce(glue, [pair] * k, empty)


def _run_prop31() -> dict:
    models = fo_language(builtin("prop31"), 6, 2)
    closed = frozenset(p for p in models if not p.sources and not p.targets)
    ladders = frozenset(canonical_pomset(_ladder(k)) for k in range(4))
    checks = [
        _expect("prop31", "models up to six events", len(models), 49),
        _expect("prop31", "interface-free models", len(closed), 4),
        _expect("prop31", "interface-free models are the a-pair chains",
                closed == ladders, True),
    ]
    return _report("prop31", checks)


def _run_p2n() -> dict:
    phi = builtin("p2n_family")
    family = fo_language(phi, 6, 2)
    want = frozenset(canonical_pomset(p2n_pomset(n)) for n in range(4))
    word = make_ipomset("xy", "aa", [("x", "y")])
    checks = [
        _expect("p2n", "family members up to six events", family == want, True),
        _expect("p2n", "member count", len(family), 4),
        _expect("p2n", "eight-event zigzag satisfies the formula",
                satisfies(p2n_pomset(4), phi), True),
        _expect("p2n", "two-letter word is in the complement",
                satisfies(word, builtin("complement_p2n")), True),
    ]
    return _report("p2n", checks)


ENTRIES: dict[str, CorpusEntry] = {
    e.name: e
    for e in (
        CorpusEntry("fig1", "gluing two open pomsets", _run_fig1),
        CorpusEntry("fig2", "two-dimensional state space and its language", _run_fig2),
        CorpusEntry("fig3", "sparse step decomposition of a pomset", _run_fig3),
        CorpusEntry("fig5a", "counter-free module on thirteen elements", _run_fig5a),
        CorpusEntry("fig5-counter",
                    "state space of the closure has a two-cycle", _run_fig5_counter),
        CorpusEntry("fig5-merged",
                    "suffix classes merge the counter away", _run_fig5_merged),
        CorpusEntry("prop31", "one formula pinning chains of a-pairs", _run_prop31),
        CorpusEntry("p2n", "zigzag family and its complement", _run_p2n),
    )
}


def run_entry(name: str) -> dict:
    """Re-run one example, checking every frozen result along the way."""
    if name not in ENTRIES:
        raise UnknownName(f"no corpus entry named {name!r}")
    return ENTRIES[name].run()
