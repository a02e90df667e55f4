"""Command-line interface.

Every command prints one machine-readable report (or document) on
standard output.  Exit status 0 means success or a true decision, 1 a
false decision, 2 an error.  Commands that produce a document print it
as JSON so the output can feed the next command.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import corpus as corpus_mod
from .algebra import (
    coherent_closure,
    is_aperiodic_category,
    is_counter_free_module,
    presentation_to_hda,
    suffix_presentation,
    syntactic_category,
    transition_category,
    validate_presentation,
)
from .documents import (
    doc_to_automaton,
    doc_to_hda,
    doc_to_pomset,
    doc_to_presentation,
    doc_to_sequence,
    export_dot,
    letter_to_doc,
    parse_document,
    pomset_to_doc,
    sequence_to_doc,
    serialize,
    to_document,
)
from .errors import DocumentError, IpomsetError
from .fo import builtin, fo_language, parse_formula, satisfies
from .hda import (
    accepts,
    enumerate_language,
    is_counter_free_hda,
    reach_set,
)
from .pomsets import (
    dimension,
    downward_closure,
    event_limit,
    glue,
    is_subsumed,
    st_decompose_sparse,
)
from .st_automata import (
    hda_to_st_automaton,
    is_aperiodic_monoid,
    is_counter_free_st_automaton,
    st_accepts,
    transition_monoid,
)

__all__ = ["build_parser", "main", "run"]


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str, parser) -> object:
    return parser(parse_document(_read_text(path)))


def _letter_word(letters) -> list[dict]:
    return [letter_to_doc(l) for l in letters]


def _hda_witness(witness: dict | None) -> dict | None:
    if witness is None:
        return None
    return {
        "conclist": list(witness["conclist"].labels),
        "word": _letter_word(witness["word"]),
        "relation": sorted([a, b] for a, b in witness["relation"]),
        "stabilizes_at": witness["stabilizes_at"],
        "period": witness["period"],
    }


def _module_witness(witness: dict | None) -> dict | None:
    if witness is None:
        return None
    return {
        "conclist": list(witness["conclist"].labels),
        "word": _letter_word(witness["word"]),
        "mapping": dict(sorted(witness["mapping"].items())),
        "stabilizes_at": witness["stabilizes_at"],
        "period": witness["period"],
    }


def _category_witness(witness: dict | None) -> dict | None:
    if witness is None:
        return None
    return {
        "object": list(witness["object"].labels),
        "morphism": witness["morphism"],
        "stabilizes_at": witness["stabilizes_at"],
        "period": witness["period"],
    }


class _Output:
    """Collects the report and how to render it before printing.

    document holds an object whose JSON form replaces the report (and
    that DOT can draw); raw_doc a pre-built document dict; text a fully
    rendered payload that ignores the format flag.
    """

    def __init__(self, report: dict, document=None, raw_doc=None,
                 text: str | None = None, status: int = 0):
        self.report = report
        self.document = document
        self.raw_doc = raw_doc
        self.text = text
        self.status = status


def _emit(out: _Output, fmt: str) -> int:
    if out.text is not None:
        sys.stdout.write(out.text)
        return out.status
    if fmt == "dot":
        if out.document is None:
            raise DocumentError("this command has no DOT rendering")
        sys.stdout.write(export_dot(out.document))
        return out.status
    if fmt == "json" and out.document is not None:
        sys.stdout.write(serialize(to_document(out.document)))
        return out.status
    if fmt == "json" and out.raw_doc is not None:
        sys.stdout.write(serialize(out.raw_doc))
        return out.status
    if fmt == "json":
        sys.stdout.write(json.dumps(out.report, indent=2, default=str) + "\n")
        return out.status
    for key, value in out.report.items():
        if isinstance(value, (list, dict)):
            value = json.dumps(value, default=str)
        sys.stdout.write(f"{key}: {value}\n")
    return out.status


def _bound(args) -> int:
    return args.max_events if args.max_events is not None else event_limit()


def _limit(args) -> int | None:
    return args.max_events


# pomset verbs

def _cmd_pomset_validate(args) -> _Output:
    try:
        p = _load(args.file, doc_to_pomset)
    except DocumentError:
        raise
    except IpomsetError as exc:
        return _Output({"valid": False, "error": type(exc).__name__,
                        "detail": str(exc)}, status=1)
    return _Output({"valid": True, "events": len(p),
                    "dimension": dimension(p)})


def _cmd_pomset_glue(args) -> _Output:
    p = _load(args.left, doc_to_pomset)
    q = _load(args.right, doc_to_pomset)
    glued = glue(p, q)
    return _Output({"events": len(glued)}, document=glued)


def _cmd_pomset_decompose(args) -> _Output:
    p = _load(args.file, doc_to_pomset)
    src, letters = st_decompose_sparse(p)
    report = {"source": list(src.labels), "steps": len(letters),
              "letters": [str(l) for l in letters]}
    return _Output(report, raw_doc=sequence_to_doc(src, letters))


def _cmd_pomset_subsumes(args) -> _Output:
    p = _load(args.wider, doc_to_pomset)
    q = _load(args.tighter, doc_to_pomset)
    result = is_subsumed(q, p)
    return _Output({"subsumes": result}, status=0 if result else 1)


def _cmd_pomset_downclose(args) -> _Output:
    p = _load(args.file, doc_to_pomset)
    closure = downward_closure(p)
    return _Output({"count": len(closure),
                    "pomsets": [pomset_to_doc(q) for q in closure]})


def _cmd_pomset_dim(args) -> _Output:
    p = _load(args.file, doc_to_pomset)
    return _Output({"events": len(p), "dimension": dimension(p)})


# hda verbs

def _cmd_hda_validate(args) -> _Output:
    try:
        x = _load(args.file, doc_to_hda)
    except DocumentError:
        raise
    except IpomsetError as exc:
        return _Output({"valid": False, "error": type(exc).__name__,
                        "detail": str(exc)}, status=1)
    return _Output({"valid": True, "cells": len(x), "dimension": x.dimension,
                    "initial": sorted(x.initial),
                    "accepting": sorted(x.accepting)})


def _cmd_hda_accepts(args) -> _Output:
    x = _load(args.hda, doc_to_hda)
    p = _load(args.pomset, doc_to_pomset)
    result = accepts(x, p)
    return _Output({"accepts": result}, status=0 if result else 1)


def _cmd_hda_language(args) -> _Output:
    x = _load(args.file, doc_to_hda)
    bound = _bound(args)
    language = enumerate_language(x, bound, limit=_limit(args))
    forms = sorted(language, key=lambda p: (len(p), p.labels, p.events))
    return _Output({"max_events": bound, "count": len(language),
                    "pomsets": [pomset_to_doc(p) for p in forms]})


def _cmd_hda_counterfree(args) -> _Output:
    x = _load(args.file, doc_to_hda)
    ok, witness = is_counter_free_hda(x)
    return _Output({"counter_free": ok, "witness": _hda_witness(witness)},
                   status=0 if ok else 1)


def _cmd_hda_reach(args) -> _Output:
    x = _load(args.hda, doc_to_hda)
    p = _load(args.pomset, doc_to_pomset)
    cells = reach_set(x, args.cell, p)
    return _Output({"from": args.cell, "count": len(cells),
                    "reachable": sorted(cells)},
                   status=0 if cells else 1)


# st verbs

def _cmd_st_from_hda(args) -> _Output:
    x = _load(args.file, doc_to_hda)
    a = hda_to_st_automaton(x)
    return _Output({"states": len(a.states),
                    "transitions": len(a.transitions)}, document=a)


def _cmd_st_accepts(args) -> _Output:
    a = _load(args.automaton, doc_to_automaton)
    _, letters = _load(args.sequence, doc_to_sequence)
    result = st_accepts(a, letters)
    return _Output({"accepts": result}, status=0 if result else 1)


def _cmd_st_monoid(args) -> _Output:
    a = _load(args.file, doc_to_automaton)
    m = transition_monoid(a)
    ok, witness = is_aperiodic_monoid(m)
    if witness is not None:
        witness = {"element": m.names[witness["element"]],
                   "stabilizes_at": witness["stabilizes_at"],
                   "period": witness["period"]}
    return _Output({"elements": len(m), "aperiodic": ok, "witness": witness})


def _cmd_st_counterfree(args) -> _Output:
    a = _load(args.file, doc_to_automaton)
    ok, witness = is_counter_free_st_automaton(a)
    return _Output({"counter_free": ok, "witness": _hda_witness(witness)},
                   status=0 if ok else 1)


# alg verbs

def _cmd_alg_transition_cat(args) -> _Output:
    x = _load(args.file, doc_to_hda)
    cat, fun, accepting = transition_category(x)
    return _Output({"objects": len(cat.objects),
                    "morphisms": len(cat.morphisms),
                    "accepting": len(accepting)})


def _cmd_alg_syntactic(args) -> _Output:
    x = _load(args.file, doc_to_hda)
    cat, accepting, _ = syntactic_category(x)
    return _Output({"objects": len(cat.objects),
                    "morphisms": len(cat.morphisms),
                    "accepting": len(accepting)})


def _cmd_alg_aperiodic(args) -> _Output:
    x = _load(args.file, doc_to_hda)
    cat, _, _ = syntactic_category(x)
    ok, witness = is_aperiodic_category(cat)
    return _Output({"aperiodic": ok, "category": "syntactic",
                    "morphisms": len(cat.morphisms),
                    "witness": _category_witness(witness)},
                   status=0 if ok else 1)


def _cmd_alg_counterfree_module(args) -> _Output:
    p = _load(args.file, doc_to_presentation)
    ok, witness = is_counter_free_module(p)
    return _Output({"counter_free": ok, "witness": _module_witness(witness)},
                   status=0 if ok else 1)


def _cmd_alg_suffix_pres(args) -> _Output:
    x = _load(args.file, doc_to_hda)
    p = suffix_presentation(x)
    return _Output({"elements": len(p)}, document=p)


def _cmd_alg_coherent(args) -> _Output:
    p = _load(args.file, doc_to_presentation)
    closed = coherent_closure(p)
    return _Output({"elements": len(closed)}, document=closed)


def _cmd_alg_to_hda(args) -> _Output:
    p = _load(args.file, doc_to_presentation)
    x = presentation_to_hda(p)
    return _Output({"cells": len(x)}, document=x)


def _cmd_alg_validate(args) -> _Output:
    p = _load(args.file, doc_to_presentation)
    issues = validate_presentation(p)
    return _Output({"valid": not issues, "issues": issues},
                   status=0 if not issues else 1)


# fo verbs

def _formula(args):
    if args.builtin is not None:
        if args.formula is not None:
            raise DocumentError("give a formula or --builtin, not both")
        return builtin(args.builtin), f"builtin:{args.builtin}"
    if args.formula is None:
        raise DocumentError("a formula (or --builtin) is required")
    return parse_formula(args.formula), args.formula


def _cmd_fo_check(args) -> _Output:
    p = _load(args.pomset, doc_to_pomset)
    phi, shown = _formula(args)
    result = satisfies(p, phi)
    return _Output({"satisfies": result, "formula": shown},
                   status=0 if result else 1)


def _cmd_fo_language(args) -> _Output:
    phi, shown = _formula(args)
    bound = _bound(args)
    max_dim = args.max_dim if args.max_dim is not None else 2
    language = fo_language(phi, bound, max_dim, limit=_limit(args))
    forms = sorted(language, key=lambda p: (len(p), p.labels, p.events))
    return _Output({"max_events": bound, "max_dim": max_dim,
                    "count": len(language), "formula": shown,
                    "pomsets": [pomset_to_doc(p) for p in forms]})


# corpus and export verbs

def _cmd_corpus_list(args) -> _Output:
    entries = [{"name": e.name, "summary": e.summary}
               for e in corpus_mod.ENTRIES.values()]
    return _Output({"count": len(entries), "entries": entries})


def _cmd_corpus_run(args) -> _Output:
    return _Output(corpus_mod.run_entry(args.name))


def _cmd_export_dot(args) -> _Output:
    doc = parse_document(_read_text(args.file))
    return _Output({}, text=export_dot(doc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-events", type=int, default=None,
                        help="bound for enumerations (lifts the safety cap)")
    common.add_argument("--max-dim", type=int, default=None,
                        help="bound on concurrency width")
    common.add_argument("--format", choices=("json", "dot", "text"),
                        default="json", help="output format")
    common.add_argument("--seed", type=int, default=None,
                        help="seed recorded in reports (reserved)")

    parser = argparse.ArgumentParser(
        prog="ipomset",
        description="Pomsets with interfaces, their state spaces, and deciders.")
    top = parser.add_subparsers(dest="group", required=True)

    def sub(group, _verb, _fn, **files):
        p = group.add_parser(_verb, parents=[common])
        for arg, help_text in files.items():
            p.add_argument(arg, help=help_text)
        p.set_defaults(fn=_fn)
        return p

    pomset = top.add_parser("pomset").add_subparsers(dest="verb", required=True)
    sub(pomset, "validate", _cmd_pomset_validate, file="pomset document")
    sub(pomset, "glue", _cmd_pomset_glue,
        left="left pomset document", right="right pomset document")
    sub(pomset, "decompose", _cmd_pomset_decompose, file="pomset document")
    sub(pomset, "subsumes", _cmd_pomset_subsumes,
        wider="pomset with less order", tighter="pomset with more order")
    sub(pomset, "downclose", _cmd_pomset_downclose, file="pomset document")
    sub(pomset, "dim", _cmd_pomset_dim, file="pomset document")

    hda = top.add_parser("hda").add_subparsers(dest="verb", required=True)
    sub(hda, "validate", _cmd_hda_validate, file="state space document")
    sub(hda, "accepts", _cmd_hda_accepts,
        hda="state space document", pomset="pomset document")
    sub(hda, "language", _cmd_hda_language, file="state space document")
    sub(hda, "counterfree", _cmd_hda_counterfree, file="state space document")
    sub(hda, "reach", _cmd_hda_reach,
        hda="state space document", cell="start cell id",
        pomset="pomset document")

    st = top.add_parser("st").add_subparsers(dest="verb", required=True)
    sub(st, "from-hda", _cmd_st_from_hda, file="state space document")
    sub(st, "accepts", _cmd_st_accepts,
        automaton="automaton document", sequence="step sequence document")
    sub(st, "monoid", _cmd_st_monoid, file="automaton document")
    sub(st, "counterfree", _cmd_st_counterfree, file="automaton document")

    alg = top.add_parser("alg").add_subparsers(dest="verb", required=True)
    sub(alg, "transition-cat", _cmd_alg_transition_cat, file="state space document")
    sub(alg, "syntactic", _cmd_alg_syntactic, file="state space document")
    sub(alg, "aperiodic", _cmd_alg_aperiodic, file="state space document")
    sub(alg, "counterfree-module", _cmd_alg_counterfree_module,
        file="presentation document")
    sub(alg, "suffix-pres", _cmd_alg_suffix_pres, file="state space document")
    sub(alg, "coherent", _cmd_alg_coherent, file="presentation document")
    sub(alg, "to-hda", _cmd_alg_to_hda, file="presentation document")
    sub(alg, "validate", _cmd_alg_validate, file="presentation document")

    fo = top.add_parser("fo").add_subparsers(dest="verb", required=True)
    check = sub(fo, "check", _cmd_fo_check, pomset="pomset document")
    check.add_argument("formula", nargs="?", default=None, help="formula text")
    check.add_argument("--builtin", default=None, help="named builtin formula")
    lang = fo.add_parser("language", parents=[common])
    lang.add_argument("formula", nargs="?", default=None, help="formula text")
    lang.add_argument("--builtin", default=None, help="named builtin formula")
    lang.set_defaults(fn=_cmd_fo_language)

    corpus = top.add_parser("corpus").add_subparsers(dest="verb", required=True)
    sub(corpus, "list", _cmd_corpus_list)
    sub(corpus, "run", _cmd_corpus_run, name="corpus entry name")

    export = top.add_parser("export").add_subparsers(dest="verb", required=True)
    sub(export, "dot", _cmd_export_dot, file="any document")

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.fn(args)
        if args.seed is not None and out.document is None and out.raw_doc is None:
            out.report["seed"] = args.seed
        return _emit(out, args.format)
    except IpomsetError as exc:
        report = {"error": type(exc).__name__, "detail": str(exc)}
        if getattr(exc, "entry", None) is not None:
            report["entry"] = exc.entry
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
        return 2


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        sys.exit(0)
    sys.exit(code)


if __name__ == "__main__":
    main()
