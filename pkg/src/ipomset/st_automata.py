"""Word automata over starter and terminator letters.

States carry conclists and every transition letter must match the
conclists of its endpoints, so runs spell out composable letter
sequences.  An HDA turns into such an automaton by reading cells as
states and subset faces as transitions; language questions about the
HDA then become questions about sparse words.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import LabelMismatch, ValidationError
from .hda import HDA, subset_face
from .pomsets import Conclist, STLetter, starter, terminator
from .relations import aperiodicity_witness, close_typed

Transition = tuple[str, STLetter, str]


@dataclass(frozen=True)
class STAutomaton:
    """States labeled by conclists, letter transitions, marked subsets."""

    states: tuple[str, ...]
    label: Mapping[str, Conclist]
    initial: frozenset[str]
    final: frozenset[str]
    transitions: frozenset[Transition]

    def __len__(self) -> int:
        return len(self.states)

    @cached_property
    def alphabet(self) -> tuple[STLetter, ...]:
        return tuple(sorted({l for _, l, _ in self.transitions},
                            key=lambda l: l.key))

    @cached_property
    def step(self) -> dict[tuple[str, STLetter], frozenset[str]]:
        out: dict[tuple[str, STLetter], set[str]] = {}
        for q, l, r in self.transitions:
            out.setdefault((q, l), set()).add(r)
        return {k: frozenset(v) for k, v in out.items()}

    def after(self, states: Iterable[str], letter: STLetter) -> frozenset[str]:
        nxt: set[str] = set()
        for q in states:
            nxt.update(self.step.get((q, letter), ()))
        return frozenset(nxt)


def make_st_automaton(
    states: Iterable[str],
    label: Mapping[str, Iterable[str]],
    initial: Iterable[str],
    final: Iterable[str],
    transitions: Iterable[tuple[str, STLetter, str]],
) -> STAutomaton:
    states = tuple(states)
    if len(set(states)) != len(states):
        raise ValidationError("duplicate state ids")
    known = set(states)
    lab = {}
    for q in states:
        if q not in label:
            raise ValidationError(f"no conclist for state {q!r}")
        lab[q] = Conclist(tuple(label[q]))
    for subset in (initial, final):
        for q in subset:
            if q not in known:
                raise ValidationError(f"marked state {q!r} does not exist")
    triples = set()
    for q, letter, r in transitions:
        if q not in known or r not in known:
            raise ValidationError(f"transition endpoint missing: {(q, r)!r}")
        if lab[q] != letter.source or lab[r] != letter.target:
            raise LabelMismatch(
                f"transition {q!r} -{letter}-> {r!r} does not match the "
                f"state conclists {lab[q]} and {lab[r]}")
        triples.add((q, letter, r))
    return STAutomaton(states, lab, frozenset(initial), frozenset(final),
                       frozenset(triples))


def hda_to_st_automaton(x: HDA) -> STAutomaton:
    """States are the cells; each subset face becomes one transition."""
    transitions = []
    for z in x.cells:
        u = x.ev[z]
        for r in range(1, len(u) + 1):
            for combo in itertools.combinations(range(len(u)), r):
                transitions.append(
                    (subset_face(x, z, combo, 0), starter(u.labels, combo), z))
                transitions.append(
                    (z, terminator(u.labels, combo), subset_face(x, z, combo, 1)))
    return make_st_automaton(
        x.cells, {c: x.ev[c] for c in x.cells},
        x.initial, x.accepting, transitions)


def st_accepts(a: STAutomaton, word: Sequence[STLetter]) -> bool:
    """Nondeterministic acceptance of a composable letter word."""
    if not word:
        return bool(a.initial & a.final)
    cur = frozenset(q for q in a.initial if a.label[q] == word[0].source)
    for letter in word:
        cur = a.after(cur, letter)
        if not cur:
            return False
    return bool(cur & a.final)


def _state_name(states: frozenset[str]) -> str:
    return "{" + ",".join(sorted(states)) + "}"


def _sink_name(u: Conclist) -> str:
    return "sink(" + " ".join(u.labels) + ")"


def determinize_reachable(
    a: STAutomaton,
) -> tuple[STAutomaton, dict[str, frozenset[str]]]:
    """Subset construction over the occurring alphabet.

    Only reachable subset states are kept; each state holds cells of
    one conclist.  A sink per conclist makes the result total, so the
    letter step is a function.  Also returns what each new state
    contains.
    """
    letters_from: dict[Conclist, list[STLetter]] = {}
    conclists = {a.label[q] for q in a.states}
    for l in a.alphabet:
        letters_from.setdefault(l.source, []).append(l)
        conclists.add(l.source)
        conclists.add(l.target)

    contents: dict[str, frozenset[str]] = {}
    label: dict[str, Conclist] = {}
    for u in conclists:
        contents[_sink_name(u)] = frozenset()
        label[_sink_name(u)] = u

    transitions: list[Transition] = []
    queue: list[tuple[str, Conclist]] = []

    def admit(cells: frozenset[str], u: Conclist) -> str:
        if not cells:
            return _sink_name(u)
        name = _state_name(cells)
        if name not in contents:
            contents[name] = cells
            label[name] = u
            queue.append((name, u))
        return name

    initial = []
    for u in sorted({a.label[q] for q in a.initial}):
        name = admit(frozenset(q for q in a.initial if a.label[q] == u), u)
        initial.append(name)
    for u in sorted(conclists):
        queue.append((_sink_name(u), u))

    seen = set()
    while queue:
        name, u = queue.pop()
        if name in seen:
            continue
        seen.add(name)
        for l in letters_from.get(u, ()):
            target = admit(a.after(contents[name], l), l.target)
            transitions.append((name, l, target))

    states = sorted(contents)
    final = [n for n in states if contents[n] & a.final]
    det = make_st_automaton(states, {n: label[n] for n in states},
                            initial, final, transitions)
    return det, contents


def is_deterministic(a: STAutomaton) -> bool:
    return all(len(v) == 1 for v in a.step.values())


def sparse_suffix_equivalent(a: STAutomaton, q1: str, q2: str) -> bool:
    """Whether two states accept the same sparse letter words.

    Sparse words alternate starters and terminators without identity
    letters, so the product search tracks the kind of the last letter
    and compares acceptance at every reachable pair, the empty word
    included.
    """
    if a.label[q1] != a.label[q2]:
        raise LabelMismatch(
            f"states {q1!r} and {q2!r} carry different conclists")
    letters_from: dict[Conclist, list[STLetter]] = {}
    for l in a.alphabet:
        if l.subset:
            letters_from.setdefault(l.source, []).append(l)

    start = (frozenset({q1}), frozenset({q2}), None)
    todo = [(start, a.label[q1])]
    seen = {start}
    while todo:
        (s1, s2, last), u = todo.pop()
        if bool(s1 & a.final) != bool(s2 & a.final):
            return False
        for l in letters_from.get(u, ()):
            if l.kind == last:
                continue
            nxt = (a.after(s1, l), a.after(s2, l), l.kind)
            if nxt[0] or nxt[1]:
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append((nxt, l.target))
    return True


# ----------------------------------------------------------------- algebra


@dataclass(frozen=True)
class FiniteMonoid:
    """Elements 0..n-1 with a multiplication table and a unit.

    names give a readable word for each element; generators map the
    originating letters to elements.
    """

    table: tuple[tuple[int, ...], ...]
    unit: int
    names: tuple[str, ...]
    generators: Mapping[STLetter, int]

    def __len__(self) -> int:
        return len(self.table)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]


def validate_monoid(m: FiniteMonoid) -> None:
    n = len(m.table)
    for row in m.table:
        if len(row) != n or any(not 0 <= v < n for v in row):
            raise ValidationError("malformed multiplication table")
    for i in range(n):
        if m.table[m.unit][i] != i or m.table[i][m.unit] != i:
            raise ValidationError(f"unit law fails at {i}")
    for i in range(n):
        for j in range(n):
            ij = m.table[i][j]
            for k in range(n):
                if m.table[ij][k] != m.table[i][m.table[j][k]]:
                    raise ValidationError(
                        f"associativity fails at {(i, j, k)}")


def transition_monoid(a: STAutomaton) -> FiniteMonoid:
    """Monoid of state transformations of a deterministic automaton.

    Conclist typing is absorbed by one extra dead point: a letter sends
    states with the wrong conclist there, so every letter acts as a
    total function and words compose freely.
    """
    if not is_deterministic(a):
        raise ValidationError("transition monoid needs a deterministic input")
    order = list(a.states)
    dead = len(order)
    index = {q: i for i, q in enumerate(order)}

    def letter_fn(l: STLetter) -> tuple[int, ...]:
        out = []
        for q in order:
            targets = a.step.get((q, l))
            out.append(index[next(iter(targets))] if targets else dead)
        out.append(dead)
        return tuple(out)

    identity = tuple(range(dead + 1))
    elems: dict[tuple[int, ...], int] = {identity: 0}
    names = [""]
    gens: dict[STLetter, int] = {}
    todo = deque([identity])
    gen_fns = []
    for l in a.alphabet:
        fn = letter_fn(l)
        gen_fns.append((l, fn))
        if fn not in elems:
            elems[fn] = len(names)
            names.append(str(l))
            todo.append(fn)
        gens[l] = elems[fn]
    while todo:
        cur = todo.popleft()
        for l, fn in gen_fns:
            nxt = tuple(fn[v] for v in cur)
            if nxt not in elems:
                elems[nxt] = len(names)
                names.append((names[elems[cur]] + ";" + str(l)).lstrip(";"))
                todo.append(nxt)
    order_elems = sorted(elems.items(), key=lambda kv: kv[1])
    table = []
    for fn, _ in order_elems:
        row = []
        for gn, _ in order_elems:
            row.append(elems[tuple(gn[v] for v in fn)])
        table.append(tuple(row))
    return FiniteMonoid(tuple(table), 0, tuple(names), gens)


def is_aperiodic_monoid(m: FiniteMonoid) -> tuple[bool, dict | None]:
    """True when every element's powers stabilize with period one."""
    worst = None
    for e in range(len(m.table)):
        seen = {}
        cur = e
        n = 1
        while cur not in seen:
            seen[cur] = n
            cur = m.table[cur][e]
            n += 1
        period = n - seen[cur]
        if period > 1 and (worst is None or period > worst["period"]):
            worst = {"element": e, "name": m.names[e],
                     "stabilizes_at": seen[cur], "period": period}
    return worst is None, worst


def letter_relation(a: STAutomaton, l: STLetter) -> frozenset[tuple[str, str]]:
    return frozenset((q, r) for q, ll, r in a.transitions if ll == l)


def is_counter_free_st_automaton(a: STAutomaton) -> tuple[bool, dict | None]:
    """Power period one for every endomorphism of the relation closure.

    Mirrors the counter-freeness decider of HDA cells: generators are
    the letter relations over the state set, typed by conclists.
    """
    generators = [(l.source, l.target, letter_relation(a, l), l)
                  for l in a.alphabet]
    conclists = {a.label[q] for q in a.states}
    identities = [(u, frozenset((q, q) for q in a.states if a.label[q] == u))
                  for u in conclists]
    closure = close_typed(generators, identities)
    witness = aperiodicity_witness(closure)
    if witness is None:
        return True, None
    obj, rel, word, n, period = witness
    return False, {"conclist": obj, "word": word, "relation": rel,
                   "stabilizes_at": n, "period": period}
