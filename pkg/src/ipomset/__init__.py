"""Interval pomsets with interfaces, higher-dimensional automata, and
the language theory connecting them."""

from .algebra import (
    FiniteCategory,
    Functor,
    Presentation,
    coherent_closure,
    is_aperiodic_category,
    is_counter_free_module,
    make_presentation,
    presentation_to_hda,
    recognizes,
    suffix_presentation,
    syntactic_category,
    transition_category,
)
from .documents import (
    detect_kind,
    export_dot,
    load_document,
    parse_document,
    serialize,
    to_document,
)
from .errors import IpomsetError, ValidationError
from .fo import builtin, fo_language, parse_formula, satisfies
from .hda import (
    HDA,
    accepts,
    enumerate_language,
    hda_isomorphic,
    is_counter_free_hda,
    validate_hda,
)
from .pomsets import (
    Conclist,
    IiPomset,
    STLetter,
    canonical_pomset,
    dimension,
    downward_closure,
    enumerate_pomsets,
    enumerate_runs,
    glue,
    glue_st,
    identity_pomset,
    idletter,
    is_isomorphic,
    is_subsumed,
    make_ipomset,
    remove_events,
    st_decompose_sparse,
    starter,
    terminator,
    validate_ipomset,
)
from .st_automata import (
    STAutomaton,
    hda_to_st_automaton,
    is_counter_free_st_automaton,
    st_accepts,
    transition_monoid,
)

__all__ = [
    "IpomsetError",
    "ValidationError",
    "Conclist",
    "IiPomset",
    "STLetter",
    "HDA",
    "STAutomaton",
    "FiniteCategory",
    "Functor",
    "Presentation",
    "accepts",
    "builtin",
    "canonical_pomset",
    "coherent_closure",
    "detect_kind",
    "dimension",
    "downward_closure",
    "enumerate_language",
    "enumerate_pomsets",
    "enumerate_runs",
    "export_dot",
    "fo_language",
    "glue",
    "glue_st",
    "hda_isomorphic",
    "hda_to_st_automaton",
    "identity_pomset",
    "idletter",
    "is_aperiodic_category",
    "is_counter_free_hda",
    "is_counter_free_module",
    "is_counter_free_st_automaton",
    "is_isomorphic",
    "is_subsumed",
    "load_document",
    "make_ipomset",
    "make_presentation",
    "parse_document",
    "parse_formula",
    "presentation_to_hda",
    "recognizes",
    "remove_events",
    "satisfies",
    "serialize",
    "st_accepts",
    "st_decompose_sparse",
    "starter",
    "suffix_presentation",
    "syntactic_category",
    "terminator",
    "to_document",
    "transition_category",
    "transition_monoid",
    "validate_hda",
    "validate_ipomset",
]
