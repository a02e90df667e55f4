"""JSON document round trips and DOT rendering.

Round trips are checked by exact equality: parsing a serialized value
must rebuild the very same object, field for field.  DOT edge counts
are cross-checked against a reduction computed directly from the
stored precedence pairs.
"""

import itertools
import json

import pytest

from ipomset.algebra import coherent_closure, presentation_to_hda, suffix_presentation
from ipomset.corpus import (
    CORPUS_HDAS,
    fig1_glued,
    fig1_left,
    fig2_hda,
    fig3_pomset,
    fig5a_presentation,
    p2n_pomset,
)
from ipomset.documents import (
    automaton_dot,
    detect_kind,
    doc_to_automaton,
    doc_to_hda,
    doc_to_letter,
    doc_to_pomset,
    doc_to_presentation,
    doc_to_sequence,
    export_dot,
    hda_dot,
    letter_to_doc,
    load_document,
    parse_document,
    pomset_dot,
    pomset_to_doc,
    presentation_dot,
    sequence_to_doc,
    serialize,
    to_document,
)
from ipomset.errors import (
    DocumentError,
    PrecedenceCyclic,
    UnknownDocumentKind,
    ValidationError,
)
from ipomset.pomsets import (
    canonical_pomset,
    enumerate_pomsets,
    glue_st,
    idletter,
    is_isomorphic,
    make_ipomset,
    st_decompose_sparse,
    starter,
    terminator,
)
from ipomset.st_automata import hda_to_st_automaton


def roundtrip(value):
    return load_document(parse_document(serialize(value)))


class TestDetectKind:
    def test_known_kinds(self):
        assert detect_kind(pomset_to_doc(fig3_pomset())) == "pomset"
        assert detect_kind(letter_to_doc(starter("ab", [0]))) == "letter"
        assert detect_kind(letter_to_doc(terminator("a", [0]))) == "letter"
        assert detect_kind(letter_to_doc(idletter("ab"))) == "letter"
        assert detect_kind(to_document(fig2_hda())) == "hda"
        a = hda_to_st_automaton(CORPUS_HDAS["a-loop"]())
        assert detect_kind(to_document(a)) == "st-automaton"
        assert detect_kind(to_document(fig5a_presentation())) == "presentation"
        src, letters = st_decompose_sparse(fig3_pomset())
        assert detect_kind(sequence_to_doc(src, letters)) == "st-sequence"

    def test_unknown_kind(self):
        with pytest.raises(UnknownDocumentKind):
            detect_kind({"kind": "mystery"})
        with pytest.raises(UnknownDocumentKind):
            detect_kind({})

    def test_not_an_object(self):
        with pytest.raises(DocumentError):
            detect_kind([1, 2])
        with pytest.raises(DocumentError):
            parse_document("[1, 2]")
        with pytest.raises(DocumentError):
            parse_document("not json at all {")


class TestPomsetDocuments:
    def test_corpus_round_trips(self):
        for p in (fig1_left(), fig1_glued(), fig3_pomset(), p2n_pomset(2),
                  make_ipomset((), "")):
            assert roundtrip(p) == p

    def test_enumerated_round_trips(self):
        count = 0
        for p in enumerate_pomsets(("a", "b"), 4, 2):
            assert roundtrip(p) == p
            count += 1
        assert count > 100

    def test_serialize_deterministic(self):
        p = fig3_pomset()
        assert serialize(p) == serialize(roundtrip(p))
        assert serialize(p).endswith("\n")

    def test_alphabet_must_cover_labels(self):
        doc = pomset_to_doc(fig3_pomset())
        doc["alphabet"] = ["a", "b"]
        with pytest.raises(DocumentError):
            doc_to_pomset(doc)

    def test_missing_field(self):
        doc = pomset_to_doc(fig3_pomset())
        del doc["events"]
        with pytest.raises(DocumentError):
            doc_to_pomset(doc)

    def test_bad_pair_shape(self):
        doc = pomset_to_doc(fig3_pomset())
        doc["precedence"] = [["x"]]
        with pytest.raises(DocumentError):
            doc_to_pomset(doc)

    def test_semantic_errors_still_raised(self):
        doc = {
            "kind": "pomset", "version": 1, "alphabet": ["a"],
            "events": [{"id": "x", "label": "a"}, {"id": "y", "label": "a"}],
            "precedence": [["x", "y"], ["y", "x"]],
            "event_order": [], "sources": [], "targets": [],
        }
        with pytest.raises(PrecedenceCyclic):
            doc_to_pomset(doc)


class TestLetterDocuments:
    def test_round_trips(self):
        letters = [
            starter("ab", [0]), starter("ab", [0, 1]), terminator("a", [0]),
            terminator("abc", [1]), idletter(""), idletter("ab"),
        ]
        for l in letters:
            assert roundtrip(l) == l

    def test_identity_with_subset_rejected(self):
        doc = {"kind": "id", "version": 1, "conclist": ["a"], "subset": [0]}
        with pytest.raises(DocumentError):
            doc_to_letter(doc)

    def test_subset_must_hold_positions(self):
        doc = {"kind": "starter", "version": 1, "conclist": ["a"], "subset": ["0"]}
        with pytest.raises(DocumentError):
            doc_to_letter(doc)


class TestSequenceDocuments:
    def test_round_trip_and_reglue(self):
        p = fig3_pomset()
        src, letters = st_decompose_sparse(p)
        back_src, back_letters = roundtrip((src, letters))
        assert (back_src, back_letters) == (src, letters)
        glued = glue_st(back_letters, back_src)
        assert is_isomorphic(glued, p)

    def test_letters_must_be_objects(self):
        doc = sequence_to_doc(*st_decompose_sparse(fig3_pomset()))
        doc["letters"] = ["st[+a]"]
        with pytest.raises(DocumentError):
            doc_to_sequence(doc)


class TestHdaDocuments:
    def test_corpus_round_trips(self):
        for name, build in CORPUS_HDAS.items():
            x = build()
            assert roundtrip(x) == x, name

    def test_face_positions_parsed_from_strings(self):
        doc = to_document(fig2_hda())
        text = serialize(doc)
        raw = json.loads(text)
        for faces in raw["lower"].values():
            for key in faces:
                assert isinstance(key, str)
        assert doc_to_hda(raw) == fig2_hda()

    def test_broken_face_is_semantic_error(self):
        doc = to_document(CORPUS_HDAS["a-loop"]())
        name = next(iter(doc["lower"]))
        doc["lower"][name]["0"] = "nowhere"
        with pytest.raises(ValidationError):
            doc_to_hda(doc)

    def test_face_position_must_be_numeric(self):
        doc = to_document(CORPUS_HDAS["a-loop"]())
        name = next(iter(doc["lower"]))
        doc["lower"][name] = {"zero": "v"}
        with pytest.raises(DocumentError):
            doc_to_hda(doc)


class TestAutomatonDocuments:
    def test_round_trips(self):
        for name in ("fig2", "fig5b", "aa-cycle", "point"):
            a = hda_to_st_automaton(CORPUS_HDAS[name]())
            assert roundtrip(a) == a, name

    def test_transition_letter_must_be_document(self):
        a = hda_to_st_automaton(CORPUS_HDAS["point"]())
        doc = to_document(a)
        doc["transitions"] = [{"from": "x", "letter": "st[+a]", "to": "y"}]
        with pytest.raises(DocumentError):
            doc_to_automaton(doc)


class TestPresentationDocuments:
    def test_round_trips(self):
        p = fig5a_presentation()
        assert roundtrip(p) == p
        closed = coherent_closure(p)
        assert roundtrip(closed) == closed
        sp = suffix_presentation(presentation_to_hda(closed))
        assert roundtrip(sp) == sp

    def test_lower_field_round_trips_none(self):
        p = fig5a_presentation()
        assert p.lower is None
        doc = to_document(p)
        assert doc["lower"] is None
        assert roundtrip(p).lower is None

    def test_duplicate_action_rejected(self):
        doc = to_document(fig5a_presentation())
        doc["actions"].append(dict(doc["actions"][0]))
        with pytest.raises(DocumentError):
            doc_to_presentation(doc)

    def test_initials_key_holds_labels(self):
        p = fig5a_presentation()
        doc = to_document(p)
        assert list(doc["initials"]) == [""]
        assert doc["initials"][""] == "v00"


class TestDotExport:
    def reduction(self, p):
        closed = set(p.precedence)
        return [(a, b) for a, b in closed
                if not any((a, c) in closed and (c, b) in closed
                           for c in p.events)]

    def counts(self, dot):
        lines = dot.splitlines()
        nodes = sum(1 for ln in lines
                    if "label=" in ln and "->" not in ln and "node [" not in ln)
        dotted = sum(1 for ln in lines if "dotted" in ln)
        solid = sum(1 for ln in lines if '" -> "' in ln and "dotted" not in ln)
        return nodes, solid, dotted

    def test_four_event_pomset(self):
        p = fig3_pomset()
        assert self.counts(pomset_dot(p)) == (4, 3, 3)

    def test_single_event(self):
        p = make_ipomset("x", "a")
        assert self.counts(pomset_dot(p)) == (1, 0, 0)

    def test_solid_edges_match_reduction(self):
        for p in itertools.islice(enumerate_pomsets(("a", "b"), 4, 2), 0, None, 7):
            _, solid, dotted = self.counts(pomset_dot(p))
            q = canonical_pomset(p)
            assert solid == len(self.reduction(q))
            assert dotted == len(q.event_order)

    def test_interface_bullets(self):
        dot = pomset_dot(fig1_left())
        assert 'label="•b"' in dot
        assert 'label="a•"' in dot

    def test_isomorphic_pomsets_render_identically(self):
        p = make_ipomset("xy", "ab", [("x", "y")])
        q = make_ipomset("uv", "ba", [("v", "u")])
        assert pomset_dot(p) == pomset_dot(q)

    def test_repeated_export_byte_identical(self):
        for build in (fig2_hda, CORPUS_HDAS["fig5-merged"]):
            x = build()
            assert hda_dot(x) == hda_dot(roundtrip(x))
        a = hda_to_st_automaton(fig2_hda())
        assert automaton_dot(a) == automaton_dot(roundtrip(a))
        p = fig5a_presentation()
        assert presentation_dot(p) == presentation_dot(roundtrip(p))

    def test_dispatch_accepts_documents(self):
        doc = pomset_to_doc(fig3_pomset())
        assert export_dot(doc) == pomset_dot(fig3_pomset())
        assert export_dot(to_document(fig2_hda())).startswith("digraph hda")

    def test_sequence_has_no_rendering(self):
        src, letters = st_decompose_sparse(fig3_pomset())
        with pytest.raises(UnknownDocumentKind):
            export_dot(sequence_to_doc(src, letters))

    def test_presentation_dot_shows_faces(self):
        closed = coherent_closure(fig5a_presentation())
        dot = presentation_dot(closed)
        assert "style=dashed" in dot
        assert dot.startswith("digraph presentation")
