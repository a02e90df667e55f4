"""Typed relations and their closures.

The automaton and algebra layers both reduce questions about an HDA or a
module to questions about finite sets of relations: each generator (a
starter or terminator letter, usually) induces a relation between the
objects it connects, arbitrary words induce composites, and properties
like counter-freeness become statements about power periods of the
endo-relations in the generated closure.  Relations are plain frozensets
of pairs, typed by a (src, tgt) object pair carried alongside.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Iterator

Rel = frozenset


def compose(r: Rel, s: Rel) -> Rel:
    """Relation composition: pairs (a, c) with some (a, b) in r, (b, c) in s."""
    by_first: dict = {}
    for b, c in s:
        by_first.setdefault(b, []).append(c)
    return frozenset(
        (a, c) for a, b in r for c in by_first.get(b, ()))


def identity_rel(xs: Iterable[Hashable]) -> Rel:
    return frozenset((x, x) for x in xs)


def close_typed(
    generators: Iterable[tuple[Hashable, Hashable, Rel, Hashable]],
    identities: Iterable[tuple[Hashable, Rel]] = (),
) -> dict[tuple[Hashable, Hashable, Rel], tuple]:
    """Close typed generator relations under composition.

    generators yields (src, tgt, relation, token); identities yields
    (object, identity relation) seeds.  Returns every reachable
    composite keyed by (src, tgt, relation), mapped to a shortest
    generating word (tuple of tokens, breadth-first so length-minimal).
    """
    gens: list[tuple[Hashable, Hashable, Rel, Hashable]] = list(generators)
    found: dict[tuple[Hashable, Hashable, Rel], tuple] = {}
    queue: deque[tuple[Hashable, Hashable, Rel]] = deque()

    def add(src, tgt, rel, word):
        key = (src, tgt, rel)
        if key not in found:
            found[key] = word
            queue.append(key)

    for obj, rel in identities:
        add(obj, obj, rel, ())
    for src, tgt, rel, token in gens:
        add(src, tgt, rel, (token,))
    while queue:
        src, mid, rel = queue.popleft()
        word = found[(src, mid, rel)]
        for gsrc, gtgt, grel, token in gens:
            if gsrc == mid:
                add(src, gtgt, compose(rel, grel), word + (token,))
    return found


def power_period(rel: Rel) -> tuple[int, int]:
    """Stabilization data of an endo-relation's power sequence.

    Returns (n, period): the smallest n >= 1 such that rel^n recurs,
    and the least period p >= 1 with rel^(n+p) = rel^n.  Aperiodic
    means period 1.
    """
    seen: dict[Rel, int] = {}
    power = rel
    k = 1
    while power not in seen:
        seen[power] = k
        power = compose(power, rel)
        k += 1
    return seen[power], k - seen[power]


def endomorphisms(
    closure: dict[tuple[Hashable, Hashable, Rel], tuple],
) -> Iterator[tuple[Hashable, Rel, tuple]]:
    """The (object, relation, word) triples of endo type in a closure."""
    for (src, tgt, rel), word in closure.items():
        if src == tgt:
            yield src, rel, word


def aperiodicity_witness(
    closure: dict[tuple[Hashable, Hashable, Rel], tuple],
) -> tuple[Hashable, Rel, tuple, int, int] | None:
    """The worst endomorphism of a closure, or None when all have period 1.

    Returns (object, relation, word, n, period) for a shortest-word
    endomorphism of maximal period when any period exceeds 1.
    """
    worst = None
    for obj, rel, word in endomorphisms(closure):
        n, period = power_period(rel)
        if period > 1 and (worst is None or period > worst[4]):
            worst = (obj, rel, word, n, period)
    return worst
