"""JSON documents and DOT text for the package's objects.

Every document is a plain dict with a "kind" and a "version" field, so
files can be sniffed without knowing what they hold.  Letter documents
reuse "kind" for the letter kind (starter, terminator, id); detect_kind
folds those back to "letter".  serialize produces deterministic text:
sorted keys, two-space indent, trailing newline.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .algebra import Presentation, make_presentation
from .errors import DocumentError, UnknownDocumentKind
from .hda import HDA, validate_hda
from .pomsets import (
    Conclist,
    IDENTITY,
    IiPomset,
    STARTER,
    STLetter,
    TERMINATOR,
    canonical_pomset,
    idletter,
    make_ipomset,
    starter,
    terminator,
)
from .st_automata import STAutomaton, make_st_automaton

__all__ = [
    "detect_kind",
    "doc_to_automaton",
    "doc_to_hda",
    "doc_to_letter",
    "doc_to_pomset",
    "doc_to_presentation",
    "doc_to_sequence",
    "automaton_to_doc",
    "automaton_dot",
    "export_dot",
    "hda_dot",
    "hda_to_doc",
    "letter_to_doc",
    "load_document",
    "parse_document",
    "pomset_dot",
    "pomset_to_doc",
    "presentation_dot",
    "presentation_to_doc",
    "sequence_to_doc",
    "serialize",
    "to_document",
]

VERSION = 1

_LETTER_KINDS = (STARTER, TERMINATOR, IDENTITY)


def _require(doc: Mapping, field: str, types) -> Any:
    if field not in doc:
        raise DocumentError(f"missing field {field!r}")
    value = doc[field]
    if not isinstance(value, types):
        raise DocumentError(f"field {field!r} has the wrong shape")
    return value


def _labels(doc: Mapping, field: str) -> tuple[str, ...]:
    raw = _require(doc, field, list)
    for lab in raw:
        if not isinstance(lab, str):
            raise DocumentError(f"field {field!r} must list labels")
    return tuple(raw)


def _ids(doc: Mapping, field: str) -> tuple[str, ...]:
    return _labels(doc, field)


def _pairs(doc: Mapping, field: str) -> tuple[tuple[str, str], ...]:
    raw = _require(doc, field, list)
    out = []
    for pair in raw:
        if not (isinstance(pair, list) and len(pair) == 2
                and all(isinstance(e, str) for e in pair)):
            raise DocumentError(f"field {field!r} must list [id, id] pairs")
        out.append((pair[0], pair[1]))
    return tuple(out)


def detect_kind(doc: Mapping) -> str:
    """Name the document family; letter kinds all report "letter"."""
    if not isinstance(doc, Mapping):
        raise DocumentError("document must be a JSON object")
    kind = doc.get("kind")
    if kind in _LETTER_KINDS:
        return "letter"
    if kind in ("pomset", "st-sequence", "hda", "st-automaton", "presentation"):
        return kind
    raise UnknownDocumentKind(f"missing or unrecognized kind field: {kind!r}")


def pomset_to_doc(p: IiPomset) -> dict:
    return {
        "kind": "pomset",
        "version": VERSION,
        "alphabet": sorted(set(p.labels)),
        "events": [{"id": e, "label": p.label_of[e]} for e in p.events],
        "precedence": sorted([a, b] for a, b in p.precedence),
        "event_order": sorted([a, b] for a, b in p.event_order),
        "sources": sorted(p.sources),
        "targets": sorted(p.targets),
    }


def doc_to_pomset(doc: Mapping) -> IiPomset:
    alphabet = set(_labels(doc, "alphabet"))
    raw_events = _require(doc, "events", list)
    events = []
    labels = []
    for entry in raw_events:
        if not isinstance(entry, Mapping):
            raise DocumentError("events must be objects with id and label")
        events.append(_require(entry, "id", str))
        labels.append(_require(entry, "label", str))
    for lab in labels:
        if lab not in alphabet:
            raise DocumentError(f"label {lab!r} not in the declared alphabet")
    return make_ipomset(
        events,
        labels,
        _pairs(doc, "precedence"),
        _pairs(doc, "event_order"),
        _ids(doc, "sources"),
        _ids(doc, "targets"),
    )


def letter_to_doc(l: STLetter) -> dict:
    """conclist is the wide side: the target of a starter, else the source."""
    return {
        "kind": l.kind,
        "version": VERSION,
        "conclist": list(l.conclist.labels),
        "subset": sorted(l.subset),
    }


def doc_to_letter(doc: Mapping) -> STLetter:
    kind = _require(doc, "kind", str)
    labels = _labels(doc, "conclist")
    subset = _require(doc, "subset", list)
    for i in subset:
        if not isinstance(i, int) or isinstance(i, bool):
            raise DocumentError("letter subset must list event positions")
    if kind == STARTER:
        return starter(labels, subset)
    if kind == TERMINATOR:
        return terminator(labels, subset)
    if kind == IDENTITY:
        if subset:
            raise DocumentError("identity letter cannot carry a subset")
        return idletter(labels)
    raise DocumentError(f"unknown letter kind {kind!r}")


def sequence_to_doc(source: Conclist, letters) -> dict:
    return {
        "kind": "st-sequence",
        "version": VERSION,
        "source": list(source.labels),
        "letters": [letter_to_doc(l) for l in letters],
    }


def doc_to_sequence(doc: Mapping) -> tuple[Conclist, tuple[STLetter, ...]]:
    source = Conclist(_labels(doc, "source"))
    raw = _require(doc, "letters", list)
    letters = []
    for entry in raw:
        if not isinstance(entry, Mapping):
            raise DocumentError("letters must be letter documents")
        letters.append(doc_to_letter(entry))
    return source, tuple(letters)


def _faces_to_doc(x: HDA, faces: Mapping[str, tuple[str, ...]]) -> dict:
    out = {}
    for cell in x.cells:
        if len(x.ev[cell]):
            out[cell] = {str(i): f for i, f in enumerate(faces[cell])}
    return out


def _doc_to_faces(doc: Mapping, field: str) -> dict[str, dict[int, str]]:
    raw = _require(doc, field, Mapping)
    out: dict[str, dict[int, str]] = {}
    for cell, faces in raw.items():
        if not isinstance(faces, Mapping):
            raise DocumentError(f"{field} entries must map positions to cells")
        inner = {}
        for pos, target in faces.items():
            try:
                i = int(pos)
            except (TypeError, ValueError):
                raise DocumentError(f"{field} position {pos!r} is not a number")
            if not isinstance(target, str):
                raise DocumentError(f"{field} face of {cell!r} must name a cell")
            inner[i] = target
        out[cell] = inner
    return out


def hda_to_doc(x: HDA) -> dict:
    return {
        "kind": "hda",
        "version": VERSION,
        "cells": [{"id": c, "conclist": list(x.ev[c].labels)} for c in x.cells],
        "lower": _faces_to_doc(x, x.lower),
        "upper": _faces_to_doc(x, x.upper),
        "initial": sorted(x.initial),
        "accepting": sorted(x.accepting),
    }


def doc_to_hda(doc: Mapping) -> HDA:
    raw = _require(doc, "cells", list)
    cells = []
    conclists = {}
    for entry in raw:
        if not isinstance(entry, Mapping):
            raise DocumentError("cells must be objects with id and conclist")
        cid = _require(entry, "id", str)
        cells.append(cid)
        conclists[cid] = _labels(entry, "conclist")
    return validate_hda(
        cells,
        conclists,
        _doc_to_faces(doc, "lower"),
        _doc_to_faces(doc, "upper"),
        _ids(doc, "initial"),
        _ids(doc, "accepting"),
    )


def automaton_to_doc(a: STAutomaton) -> dict:
    return {
        "kind": "st-automaton",
        "version": VERSION,
        "states": [{"id": q, "conclist": list(a.label[q].labels)} for q in a.states],
        "initial": sorted(a.initial),
        "final": sorted(a.final),
        "transitions": [
            {"from": q, "letter": letter_to_doc(l), "to": r}
            for q, l, r in sorted(a.transitions, key=lambda t: (t[0], t[1].key, t[2]))
        ],
    }


def doc_to_automaton(doc: Mapping) -> STAutomaton:
    raw = _require(doc, "states", list)
    states = []
    label = {}
    for entry in raw:
        if not isinstance(entry, Mapping):
            raise DocumentError("states must be objects with id and conclist")
        q = _require(entry, "id", str)
        states.append(q)
        label[q] = _labels(entry, "conclist")
    transitions = []
    for entry in _require(doc, "transitions", list):
        if not isinstance(entry, Mapping):
            raise DocumentError("transitions must be objects")
        transitions.append((
            _require(entry, "from", str),
            doc_to_letter(_require(entry, "letter", Mapping)),
            _require(entry, "to", str),
        ))
    return make_st_automaton(
        states, label, _ids(doc, "initial"), _ids(doc, "final"), transitions)


def _conclist_key(c: Conclist) -> str:
    return " ".join(c.labels)


def presentation_to_doc(p: Presentation) -> dict:
    doc = {
        "kind": "presentation",
        "version": VERSION,
        "elements": [
            {"id": m, "src": list(p.src[m].labels), "tgt": list(p.tgt[m].labels)}
            for m in p.elements
        ],
        "actions": [
            {"element": m, "letter": letter_to_doc(l), "to": n}
            for (m, l), n in sorted(
                p.action.items(), key=lambda kv: (kv[0][0], kv[0][1].key, kv[1]))
        ],
        "initials": {_conclist_key(c): m for c, m in p.initials.items()},
        "accepting": sorted(p.accepting),
        "lower": None,
    }
    if p.lower is not None:
        doc["lower"] = [
            {"element": m, "subset": sorted(s), "to": n}
            for (m, s), n in sorted(
                p.lower.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]), kv[1]))
        ]
    return doc


def doc_to_presentation(doc: Mapping) -> Presentation:
    elements = []
    src = {}
    tgt = {}
    for entry in _require(doc, "elements", list):
        if not isinstance(entry, Mapping):
            raise DocumentError("elements must be objects with id, src, tgt")
        m = _require(entry, "id", str)
        elements.append(m)
        src[m] = _labels(entry, "src")
        tgt[m] = _labels(entry, "tgt")
    action = {}
    for entry in _require(doc, "actions", list):
        if not isinstance(entry, Mapping):
            raise DocumentError("actions must be objects")
        key = (_require(entry, "element", str),
               doc_to_letter(_require(entry, "letter", Mapping)))
        if key in action:
            raise DocumentError(f"duplicate action for {key[0]!r}")
        action[key] = _require(entry, "to", str)
    raw_initials = _require(doc, "initials", Mapping)
    initials = {}
    for key, m in raw_initials.items():
        if not isinstance(m, str):
            raise DocumentError("initials must name elements")
        initials[tuple(key.split())] = m
    lower = None
    if doc.get("lower") is not None:
        raw_lower = _require(doc, "lower", list)
        lower = {}
        for entry in raw_lower:
            if not isinstance(entry, Mapping):
                raise DocumentError("lower entries must be objects")
            subset = _require(entry, "subset", list)
            for i in subset:
                if not isinstance(i, int) or isinstance(i, bool):
                    raise DocumentError("lower subset must list positions")
            key = (_require(entry, "element", str), frozenset(subset))
            if key in lower:
                raise DocumentError(f"duplicate removal face for {key[0]!r}")
            lower[key] = _require(entry, "to", str)
    return make_presentation(
        elements, src, tgt, action, initials, _ids(doc, "accepting"), lower)


def to_document(obj) -> dict:
    """Serialize any supported object by its type."""
    if isinstance(obj, IiPomset):
        return pomset_to_doc(obj)
    if isinstance(obj, STLetter):
        return letter_to_doc(obj)
    if isinstance(obj, HDA):
        return hda_to_doc(obj)
    if isinstance(obj, STAutomaton):
        return automaton_to_doc(obj)
    if isinstance(obj, Presentation):
        return presentation_to_doc(obj)
    if (isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], Conclist)):
        return sequence_to_doc(obj[0], obj[1])
    raise DocumentError(f"cannot serialize {type(obj).__name__}")


_PARSERS = {
    "pomset": doc_to_pomset,
    "letter": doc_to_letter,
    "st-sequence": doc_to_sequence,
    "hda": doc_to_hda,
    "st-automaton": doc_to_automaton,
    "presentation": doc_to_presentation,
}


def load_document(doc: Mapping):
    """Parse a document into its object, dispatching on kind."""
    return _PARSERS[detect_kind(doc)](doc)


def parse_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    return doc


def serialize(obj) -> str:
    doc = obj if isinstance(obj, Mapping) else to_document(obj)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _transitive_reduction(pairs, events):
    closed = set(pairs)
    keep = []
    for a, b in sorted(closed):
        if not any((a, c) in closed and (c, b) in closed for c in events):
            keep.append((a, b))
    return keep


def pomset_dot(p: IiPomset) -> str:
    """Solid arrows for precedence (reduced), dotted for the event order.

    The canonical form is rendered, so isomorphic pomsets give the same
    bytes and node names follow the canonical order.
    """
    p = canonical_pomset(p)
    lines = ["digraph pomset {", "  rankdir=LR;", "  node [shape=plaintext];"]
    for e in p.events:
        text = p.label_of[e]
        if e in p.sources:
            text = "•" + text
        if e in p.targets:
            text = text + "•"
        lines.append(f'  "{_dot_escape(e)}" [label="{_dot_escape(text)}"];')
    for a, b in _transitive_reduction(p.precedence, p.events):
        lines.append(f'  "{_dot_escape(a)}" -> "{_dot_escape(b)}";')
    for a, b in sorted(p.event_order):
        lines.append(f'  "{_dot_escape(a)}" -> "{_dot_escape(b)}" [style=dotted];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def hda_dot(x: HDA) -> str:
    """Vertices as points, edges as arrows, higher cells as boxes.

    A cell of dimension two or more is drawn as a box with dashed lines
    from its lower faces and to its upper faces.
    """
    lines = ["digraph hda {", "  rankdir=LR;"]
    order = sorted(x.cells, key=lambda c: (len(x.ev[c]), c))
    for c in order:
        dim = len(x.ev[c])
        labs = " ".join(x.ev[c].labels)
        marks = ""
        if c in x.initial:
            marks += "⊥"
        if c in x.accepting:
            marks += "⊤"
        text = _dot_escape(f"{c}{(' ' + marks) if marks else ''}")
        if dim == 0:
            lines.append(f'  "{_dot_escape(c)}" [shape=circle label="{text}"];')
        elif dim >= 2:
            lines.append(
                f'  "{_dot_escape(c)}" [shape=box label="{text} : {_dot_escape(labs)}"];')
    for c in order:
        dim = len(x.ev[c])
        if dim == 1:
            lab = _dot_escape(f"{c} : {x.ev[c].labels[0]}")
            lines.append(
                f'  "{_dot_escape(x.lower[c][0])}" -> "{_dot_escape(x.upper[c][0])}"'
                f' [label="{lab}"];')
        elif dim >= 2:
            for f in sorted(set(x.lower[c])):
                lines.append(
                    f'  "{_dot_escape(f)}" -> "{_dot_escape(c)}" [style=dashed];')
            for f in sorted(set(x.upper[c])):
                lines.append(
                    f'  "{_dot_escape(c)}" -> "{_dot_escape(f)}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def automaton_dot(a: STAutomaton) -> str:
    lines = ["digraph st_automaton {", "  rankdir=LR;"]
    for q in sorted(a.states):
        labs = " ".join(a.label[q].labels)
        shape = "doublecircle" if q in a.final else "circle"
        lines.append(
            f'  "{_dot_escape(q)}" [shape={shape} label="{_dot_escape(f"{q} : {labs}")}"];')
    for i, q in enumerate(sorted(a.initial)):
        lines.append(f'  "_start{i}" [shape=point];')
        lines.append(f'  "_start{i}" -> "{_dot_escape(q)}";')
    for q, l, r in sorted(a.transitions, key=lambda t: (t[0], t[1].key, t[2])):
        lines.append(
            f'  "{_dot_escape(q)}" -> "{_dot_escape(r)}" [label="{_dot_escape(str(l))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def presentation_dot(p: Presentation) -> str:
    lines = ["digraph presentation {", "  rankdir=LR;"]
    for m in p.elements:
        labs = " ".join(p.tgt[m].labels)
        shape = "doublecircle" if m in p.accepting else "ellipse"
        lines.append(
            f'  "{_dot_escape(m)}" [shape={shape} label="{_dot_escape(f"{m} : {labs}")}"];')
    for i, (c, m) in enumerate(sorted(p.initials.items())):
        lines.append(f'  "_start{i}" [shape=point];')
        lines.append(f'  "_start{i}" -> "{_dot_escape(m)}";')
    for (m, l), n in sorted(p.action.items(), key=lambda kv: (kv[0][0], kv[0][1].key, kv[1])):
        lines.append(
            f'  "{_dot_escape(m)}" -> "{_dot_escape(n)}" [label="{_dot_escape(str(l))}"];')
    if p.lower is not None:
        for (m, s), n in sorted(p.lower.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]), kv[1])):
            lab = "-{" + ",".join(str(i) for i in sorted(s)) + "}"
            lines.append(
                f'  "{_dot_escape(m)}" -> "{_dot_escape(n)}"'
                f' [style=dashed label="{_dot_escape(lab)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj) -> str:
    """DOT text for a pomset, HDA, ST-automaton, or presentation.

    Accepts either the object or its document.  Output is deterministic:
    the same input always gives the same bytes.
    """
    if isinstance(obj, Mapping):
        obj = load_document(obj)
    if isinstance(obj, IiPomset):
        return pomset_dot(obj)
    if isinstance(obj, HDA):
        return hda_dot(obj)
    if isinstance(obj, STAutomaton):
        return automaton_dot(obj)
    if isinstance(obj, Presentation):
        return presentation_dot(obj)
    raise UnknownDocumentKind(f"no DOT rendering for {type(obj).__name__}")
