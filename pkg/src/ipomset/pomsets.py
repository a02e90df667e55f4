"""Interval pomsets with interfaces and their step decompositions.

The central type is IiPomset: a finite set of events, labelled, with a
transitively closed interval precedence, a lateral event order stored on
precedence-incomparable pairs only, and two interface sets (sources must
be minimal, targets maximal).  Pomsets compose by gluing targets to
sources, and every pomset splits uniquely into an alternating sequence
of starter and terminator letters; that sequence doubles as a canonical
form and drives most algorithms downstream.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .errors import (
    BoundTooLarge,
    EventOrderCyclic,
    EventOrderIncomplete,
    InterfaceMismatch,
    InterfaceNotExtremal,
    NotInTargetInterface,
    NotIntervalOrder,
    PrecedenceCyclic,
    ValidationError,
)

STARTER = "starter"
TERMINATOR = "terminator"
IDENTITY = "id"

DEFAULT_EVENT_LIMIT = 7


def event_limit(limit: int | None = None) -> int:
    """Safety cap for enumerations; IPOMSET_MAX_EVENTS overrides the default."""
    if limit is not None:
        return limit
    env = os.environ.get("IPOMSET_MAX_EVENTS")
    if env is not None:
        return int(env)
    return DEFAULT_EVENT_LIMIT


@dataclass(frozen=True, order=True)
class Conclist:
    """A list of concurrent events, reduced to its label tuple.

    Concurrent events always carry a total event order, so once event
    identities are forgotten a set of concurrently active events is just
    a tuple of labels.  Interfaces of pomsets and cells of automata are
    both conclists, and positions in the tuple are how individual events
    are addressed.
    """

    labels: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, i: int) -> str:
        return self.labels[i]

    def minus(self, positions: Iterable[int]) -> "Conclist":
        drop = set(positions)
        return _conclist(tuple(l for i, l in enumerate(self.labels) if i not in drop))

    def __str__(self) -> str:
        return "(" + " ".join(self.labels) + ")"


_CONCLISTS: dict[tuple[str, ...], Conclist] = {}


def _conclist(labels: tuple[str, ...]) -> Conclist:
    # interned: the distinct conclists in any run form a small set and
    # the hot loops construct them millions of times
    got = _CONCLISTS.get(labels)
    if got is None:
        got = _CONCLISTS[labels] = Conclist(labels)
    return got


@dataclass(frozen=True)
class STLetter:
    """One step of a step sequence: start some events, or end some.

    conclist lists the events active on the wide side of the step (after
    a start, before an end) and subset gives the positions started or
    ended.  An empty subset is normalized to the identity kind.
    """

    kind: str
    conclist: Conclist
    subset: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.kind not in (STARTER, TERMINATOR, IDENTITY):
            raise ValidationError(f"unknown letter kind {self.kind!r}")
        for i in self.subset:
            if not 0 <= i < len(self.conclist):
                raise ValidationError(f"letter subset position {i} out of range")
        if self.kind == IDENTITY and self.subset:
            raise ValidationError("identity letter cannot carry a subset")
        if not self.subset and self.kind != IDENTITY:
            object.__setattr__(self, "kind", IDENTITY)

    @cached_property
    def source(self) -> Conclist:
        return self.conclist.minus(self.subset) if self.kind == STARTER else self.conclist

    @cached_property
    def target(self) -> Conclist:
        return self.conclist.minus(self.subset) if self.kind == TERMINATOR else self.conclist

    @property
    def key(self) -> tuple:
        """Hashable, totally orderable stand-in (frozensets do not sort)."""
        return (self.kind, self.conclist.labels, tuple(sorted(self.subset)))

    def __str__(self) -> str:
        tag = {STARTER: "st", TERMINATOR: "tm", IDENTITY: "id"}[self.kind]
        mark = {STARTER: "+", TERMINATOR: "-", IDENTITY: ""}[self.kind]
        parts = [
            (mark if i in self.subset else "") + lab
            for i, lab in enumerate(self.conclist.labels)
        ]
        return f"{tag}[{' '.join(parts)}]"

    def as_pomset(self) -> "IiPomset":
        events = tuple(f"e{i}" for i in range(len(self.conclist)))
        evord = frozenset(
            (events[i], events[j])
            for i in range(len(events))
            for j in range(i + 1, len(events))
        )
        everything = frozenset(events)
        rest = frozenset(events[i] for i in range(len(events)) if i not in self.subset)
        if self.kind == STARTER:
            sources, targets = rest, everything
        elif self.kind == TERMINATOR:
            sources, targets = everything, rest
        else:
            sources = targets = everything
        return IiPomset(events, self.conclist.labels, frozenset(), evord, sources, targets)


_LETTERS: dict[tuple, STLetter] = {}


def _letter(kind: str, labels: tuple[str, ...], subset: frozenset[int]) -> STLetter:
    key = (kind, labels, subset)
    got = _LETTERS.get(key)
    if got is None:
        got = _LETTERS[key] = STLetter(kind, _conclist(labels), subset)
    return got


def starter(labels: Iterable[str], subset: Iterable[int]) -> STLetter:
    return _letter(STARTER, tuple(labels), frozenset(subset))


def terminator(labels: Iterable[str], subset: Iterable[int]) -> STLetter:
    return _letter(TERMINATOR, tuple(labels), frozenset(subset))


def idletter(labels: Iterable[str]) -> STLetter:
    return _letter(IDENTITY, tuple(labels), frozenset())


@dataclass(frozen=True)
class IiPomset:
    """An interval pomset with interfaces.

    precedence is stored transitively closed.  event_order is stored
    only on precedence-incomparable pairs, where it restricts to a
    strict total order on every antichain.  sources and targets name the
    interface events; sources are minimal, targets maximal.  Instances
    are built by make_ipomset (which validates) or by internal
    constructions that preserve the invariants.
    """

    events: tuple[str, ...]
    labels: tuple[str, ...]
    precedence: frozenset[tuple[str, str]]
    event_order: frozenset[tuple[str, str]]
    sources: frozenset[str]
    targets: frozenset[str]

    def __len__(self) -> int:
        return len(self.events)

    @cached_property
    def label_of(self) -> dict[str, str]:
        return dict(zip(self.events, self.labels))

    @cached_property
    def down(self) -> dict[str, frozenset[str]]:
        """Strict predecessors of each event."""
        acc: dict[str, set[str]] = {x: set() for x in self.events}
        for a, b in self.precedence:
            acc[b].add(a)
        return {x: frozenset(s) for x, s in acc.items()}

    def concurrent(self, x: str, y: str) -> bool:
        return x != y and (x, y) not in self.precedence and (y, x) not in self.precedence

    def ordered_events(self, subset: Iterable[str]) -> tuple[str, ...]:
        """An antichain sorted by the event order."""
        out: list[str] = []
        for x in subset:
            i = 0
            while i < len(out) and (out[i], x) in self.event_order:
                i += 1
            out.insert(i, x)
        return tuple(out)

    def conclist_of(self, subset: Iterable[str]) -> Conclist:
        return _conclist(tuple(self.label_of[x] for x in self.ordered_events(subset)))

    @cached_property
    def source_events(self) -> tuple[str, ...]:
        return self.ordered_events(self.sources)

    @cached_property
    def target_events(self) -> tuple[str, ...]:
        return self.ordered_events(self.targets)

    @cached_property
    def source_conclist(self) -> Conclist:
        return _conclist(tuple(self.label_of[x] for x in self.source_events))

    @cached_property
    def target_conclist(self) -> Conclist:
        return _conclist(tuple(self.label_of[x] for x in self.target_events))

    @cached_property
    def sparse_steps(self) -> tuple[Conclist, tuple[STLetter, ...]]:
        return _decompose_sparse(self)

    @cached_property
    def canonical_form(self) -> tuple:
        """Complete isomorphism invariant: source labels plus letter keys."""
        src, letters = self.sparse_steps
        return (src.labels, tuple(l.key for l in letters))

    def __str__(self) -> str:
        src, letters = self.sparse_steps
        if not letters:
            return "id" + str(src)
        return f"{src} | " + " ".join(str(l) for l in letters)


def _pomset(events, labels, precedence, event_order, sources, targets) -> IiPomset:
    # trusted fast constructor: skips dataclass __init__, fields are
    # written straight into the instance dict
    obj = IiPomset.__new__(IiPomset)
    d = obj.__dict__
    d["events"] = events
    d["labels"] = labels
    d["precedence"] = precedence
    d["event_order"] = event_order
    d["sources"] = sources
    d["targets"] = targets
    return obj


def _close(succ: dict[str, set[str]], events: tuple[str, ...]) -> set[tuple[str, str]]:
    closed: set[tuple[str, str]] = set()
    for x in events:
        seen: set[str] = set()
        stack = list(succ.get(x, ()))
        while stack:
            y = stack.pop()
            if y in seen:
                continue
            seen.add(y)
            stack.extend(succ.get(y, ()))
        closed.update((x, y) for y in seen)
    return closed


def _digraph_cycle(edges: Iterable[tuple[str, str]]) -> tuple[str, ...] | None:
    succ: dict[str, list[str]] = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    color: dict[str, int] = {}
    trail: list[str] = []

    def visit(x: str) -> tuple[str, ...] | None:
        color[x] = 1
        trail.append(x)
        for y in succ.get(x, ()):
            if color.get(y) == 1:
                return tuple(trail[trail.index(y):])
            if y not in color:
                found = visit(y)
                if found:
                    return found
        trail.pop()
        color[x] = 2
        return None

    for x in list(succ):
        if x not in color:
            found = visit(x)
            if found:
                return found
    return None


def make_ipomset(
    events: Iterable[str],
    labels: Iterable[str],
    precedence: Iterable[tuple[str, str]] = (),
    event_order: Iterable[tuple[str, str]] = (),
    sources: Iterable[str] = (),
    targets: Iterable[str] = (),
) -> IiPomset:
    """Build and validate an interval pomset with interfaces.

    The precedence may be any relation and is transitively closed here;
    event-order pairs on comparable events are dropped.  Raises a
    ValidationError subclass describing the first problem found.
    """
    events = tuple(events)
    labels = tuple(labels)
    if len(events) != len(labels):
        raise ValidationError("events and labels differ in length")
    if len(set(events)) != len(events):
        raise ValidationError("duplicate event names")
    evset = set(events)
    for rel, name in ((precedence, "precedence"), (event_order, "event order")):
        for a, b in rel:
            for x in (a, b):
                if x not in evset:
                    raise ValidationError(f"{name} mentions unknown event {x!r}")

    succ: dict[str, set[str]] = {}
    for a, b in precedence:
        succ.setdefault(a, set()).add(b)
    closed = _close(succ, events)
    for x in events:
        if (x, x) in closed:
            cycle = _digraph_cycle(succ_pairs(succ))
            raise PrecedenceCyclic(cycle or (x,))
    edges = sorted(closed)
    for w, x in edges:
        for y, z in edges:
            if (w, z) not in closed and (y, x) not in closed:
                raise NotIntervalOrder((w, x, y, z))

    stored: set[tuple[str, str]] = set()
    for a, b in event_order:
        if a == b:
            raise EventOrderCyclic((a,))
        if (a, b) in closed or (b, a) in closed:
            continue
        stored.add((a, b))
    for i, a in enumerate(events):
        for b in events[i + 1:]:
            if (a, b) in closed or (b, a) in closed:
                continue
            ab, ba = (a, b) in stored, (b, a) in stored
            if ab and ba:
                raise EventOrderCyclic((a, b))
            if not ab and not ba:
                raise EventOrderIncomplete((a, b))
    cycle = _digraph_cycle(stored)
    if cycle is not None:
        raise EventOrderCyclic(cycle)

    sources = frozenset(sources)
    targets = frozenset(targets)
    for iface, side in ((sources, "source"), (targets, "target")):
        for x in iface:
            if x not in evset:
                raise ValidationError(f"{side} interface mentions unknown event {x!r}")
    for s in sources:
        if any((x, s) in closed for x in events):
            raise InterfaceNotExtremal(s, "source")
    for t in targets:
        if any((t, x) in closed for x in events):
            raise InterfaceNotExtremal(t, "target")

    return IiPomset(events, labels, frozenset(closed), frozenset(stored), sources, targets)


def succ_pairs(succ: dict[str, set[str]]) -> list[tuple[str, str]]:
    return [(a, b) for a, bs in succ.items() for b in bs]


def validate_ipomset(p: IiPomset) -> IiPomset:
    """Re-run all structural checks on an existing instance."""
    return make_ipomset(
        p.events, p.labels, p.precedence, p.event_order, p.sources, p.targets
    )


def identity_pomset(conclist: Conclist) -> IiPomset:
    """The do-nothing pomset over a conclist: every event in both interfaces."""
    events = tuple(f"e{i}" for i in range(len(conclist)))
    evord = frozenset(
        (events[i], events[j])
        for i in range(len(events))
        for j in range(i + 1, len(events))
    )
    eset = frozenset(events)
    return IiPomset(events, conclist.labels, frozenset(), evord, eset, eset)


def glue(p: IiPomset, q: IiPomset, *, check: bool = True) -> IiPomset:
    """Compose two pomsets, identifying targets of p with sources of q
    position by position.

    Events of p not in the interface precede events of q not in the
    interface; nothing else is added, and the result is already
    transitively closed.  check=False skips revalidation.
    """
    if p.target_conclist != q.source_conclist:
        raise InterfaceMismatch(
            f"cannot glue target {p.target_conclist} to source {q.source_conclist}"
        )
    pairing = dict(zip(q.source_events, p.target_events))
    taken = set(p.events)
    rename: dict[str, str] = {}
    for x in q.events:
        if x in pairing:
            rename[x] = pairing[x]
            continue
        fresh = x
        while fresh in taken:
            fresh += "'"
        rename[x] = fresh
        taken.add(fresh)

    events = p.events + tuple(rename[x] for x in q.events if x not in pairing)
    labels = p.labels + tuple(q.label_of[x] for x in q.events if x not in pairing)
    prec = set(p.precedence)
    prec.update((rename[a], rename[b]) for a, b in q.precedence)
    left = [x for x in p.events if x not in p.targets]
    right = [rename[x] for x in q.events if x not in q.sources]
    prec.update((a, b) for a in left for b in right)
    evord = set(p.event_order)
    evord.update((rename[a], rename[b]) for a, b in q.event_order)
    targets = frozenset(rename[x] for x in q.targets)
    if check:
        return make_ipomset(events, labels, prec, evord, p.sources, targets)
    return IiPomset(events, labels, frozenset(prec), frozenset(evord), p.sources, targets)


def _decompose_sparse(p: IiPomset) -> tuple[Conclist, tuple[STLetter, ...]]:
    prec = p.precedence
    evord = p.event_order
    lab = dict(zip(p.events, p.labels))
    down: dict[str, set[str]] = {x: set() for x in p.events}
    for a, b in prec:
        down[b].add(a)
    done: set[str] = set()
    active: list[str] = []
    for x in p.sources:
        i = 0
        while i < len(active) and (active[i], x) in evord:
            i += 1
        active.insert(i, x)
    active_labels = [lab[x] for x in active]
    source = _conclist(tuple(active_labels))
    unstarted = [x for x in p.events if x not in p.sources]
    letters: list[STLetter] = []
    while True:
        can = [x for x in unstarted if down[x] <= done]
        if can:
            for x in can:
                i = 0
                while i < len(active) and (active[i], x) in evord:
                    i += 1
                active.insert(i, x)
                active_labels.insert(i, lab[x])
            canset = set(can)
            letters.append(_letter(
                STARTER,
                tuple(active_labels),
                frozenset(i for i, x in enumerate(active) if x in canset),
            ))
            unstarted = [x for x in unstarted if x not in canset]
            continue
        if unstarted:
            need = set(down[unstarted[0]])
            for z in unstarted[1:]:
                need &= down[z]
            toterm = need.intersection(active)
        else:
            toterm = {x for x in active if x not in p.targets}
        if toterm:
            letters.append(_letter(
                TERMINATOR,
                tuple(active_labels),
                frozenset(i for i, x in enumerate(active) if x in toterm),
            ))
            done |= toterm
            keep = [i for i, x in enumerate(active) if x not in toterm]
            active = [active[i] for i in keep]
            active_labels = [active_labels[i] for i in keep]
            continue
        break
    assert not unstarted and set(active) == set(p.targets), "pomset not decomposable"
    return source, tuple(letters)


def st_decompose_sparse(p: IiPomset) -> tuple[Conclist, tuple[STLetter, ...]]:
    """The unique alternating sequence of non-identity starters and
    terminators that glues back to p (cached on the instance)."""
    return p.sparse_steps


class _RunState:
    """Mutable gluing state shared by glue_st and the run enumerator.

    Keeps the full event list plus the currently active events (with a
    parallel label list), the events already ended, the accumulated
    precedence and event order.  Precedence pairs appear when a starter
    runs: everything ended so far precedes the fresh events.
    """

    __slots__ = ("events", "labels", "active", "active_labels",
                 "ended", "evord", "prec")

    def __init__(self, source: Conclist):
        n0 = len(source)
        self.events = [_ename(i) for i in range(n0)]
        self.labels = list(source.labels)
        self.active = list(self.events)
        self.active_labels = list(source.labels)
        self.ended: list[str] = []
        self.evord: set[tuple[str, str]] = {
            (self.events[i], self.events[j])
            for i in range(n0)
            for j in range(i + 1, n0)
        }
        self.prec: set[tuple[str, str]] = set()

    def apply(self, letter: STLetter) -> tuple:
        """Run one letter; returns the undo record for unapply."""
        active = self.active
        if letter.source.labels != tuple(self.active_labels):
            raise InterfaceMismatch(
                f"letter {letter} starts from {letter.source}, "
                f"state is {_conclist(tuple(self.active_labels))}"
            )
        if letter.kind == STARTER:
            subset = letter.subset
            events = self.events
            merged: list[str] = []
            merged_labels: list[str] = []
            fresh: list[str] = []
            old = iter(active)
            for i, l in enumerate(letter.conclist.labels):
                if i in subset:
                    x = _ename(len(events))
                    events.append(x)
                    self.labels.append(l)
                    fresh.append(x)
                    merged.append(x)
                else:
                    merged.append(next(old))
                merged_labels.append(l)
            freshset = set(fresh)
            new_ev = [
                (merged[i], merged[j])
                for i in range(len(merged))
                for j in range(i + 1, len(merged))
                if merged[i] in freshset or merged[j] in freshset
            ]
            self.evord.update(new_ev)
            new_prec = [(x, y) for x in self.ended for y in fresh]
            self.prec.update(new_prec)
            undo = (STARTER, active, self.active_labels, fresh, new_ev, new_prec)
            self.active = merged
            self.active_labels = merged_labels
            return undo
        if letter.kind == TERMINATOR:
            subset = letter.subset
            term = [active[i] for i in subset]
            self.ended.extend(term)
            undo = (TERMINATOR, active, self.active_labels, term, None, None)
            self.active = [x for i, x in enumerate(active) if i not in subset]
            self.active_labels = [
                l for i, l in enumerate(self.active_labels) if i not in subset
            ]
            return undo
        return (IDENTITY, active, self.active_labels, (), None, None)

    def unapply(self, undo: tuple) -> None:
        kind, active, active_labels, changed, new_ev, new_prec = undo
        if kind == STARTER:
            self.evord.difference_update(new_ev)
            self.prec.difference_update(new_prec)
            for _ in changed:
                self.events.pop()
                self.labels.pop()
        elif kind == TERMINATOR:
            del self.ended[len(self.ended) - len(changed):]
        self.active = active
        self.active_labels = active_labels

    def pomset(self, sources: frozenset[str]) -> IiPomset:
        return _pomset(
            tuple(self.events), tuple(self.labels), frozenset(self.prec),
            frozenset(self.evord), sources, frozenset(self.active),
        )


def glue_st(
    letters: Iterable[STLetter],
    source: Conclist | None = None,
    *,
    check: bool = True,
) -> IiPomset:
    """Glue a letter sequence into a single pomset.

    source names the conclist the sequence starts from; when omitted it
    is read off the first letter (empty for an empty sequence).  Each
    letter must pick up exactly the conclist the previous one produced.
    """
    letters = list(letters)
    if source is None:
        source = letters[0].source if letters else _conclist(())
    st = _RunState(source)
    sources = frozenset(st.events)
    for letter in letters:
        st.apply(letter)
    result = st.pomset(sources)
    return validate_ipomset(result) if check else result


def canonical_pomset(p: IiPomset) -> IiPomset:
    """The canonically named representative of p's isomorphism class."""
    src, letters = p.sparse_steps
    return glue_st(letters, src, check=False)


def is_isomorphic(p: IiPomset, q: IiPomset) -> bool:
    return p.canonical_form == q.canonical_form


def dimension(p: IiPomset) -> int:
    """Largest number of simultaneously active events."""
    src, letters = p.sparse_steps
    return max([len(src), *(len(l.conclist) for l in letters)])


def is_subsumed(p: IiPomset, q: IiPomset) -> bool:
    """Whether p refines q: some label- and interface-preserving bijection
    turns every q-precedence into a p-precedence and keeps the event
    order of pairs concurrent on both sides."""
    if len(p) != len(q) or sorted(p.labels) != sorted(q.labels):
        return False
    if p.source_conclist != q.source_conclist:
        return False
    if p.target_conclist != q.target_conclist:
        return False

    f: dict[str, str] = {}
    used: set[str] = set()

    def compatible(a: str, b: str, a2: str, b2: str) -> bool:
        if (b, b2) in q.precedence and (a, a2) not in p.precedence:
            return False
        if (b2, b) in q.precedence and (a2, a) not in p.precedence:
            return False
        if (a, a2) in p.event_order and (b, b2) not in q.event_order:
            return False
        if (a2, a) in p.event_order and (b2, b) not in q.event_order:
            return False
        return True

    # interface events pair up positionally; conclist order forces this
    seeds = list(zip(p.source_events, q.source_events)) + list(
        zip(p.target_events, q.target_events)
    )
    for a, b in seeds:
        if a in f:
            if f[a] != b:
                return False
        elif b in used:
            return False
        else:
            if p.label_of[a] != q.label_of[b]:
                return False
            f[a] = b
            used.add(b)
    bound = list(f.items())
    for i, (a, b) in enumerate(bound):
        for a2, b2 in bound[:i]:
            if not compatible(a, b, a2, b2):
                return False

    remaining = [a for a in p.events if a not in f]
    candidates = [b for b in q.events if b not in used]

    def extend(i: int) -> bool:
        if i == len(remaining):
            return True
        a = remaining[i]
        for b in candidates:
            if b in used or q.label_of[b] != p.label_of[a]:
                continue
            if all(compatible(a, b, a2, b2) for a2, b2 in f.items()):
                f[a] = b
                used.add(b)
                if extend(i + 1):
                    return True
                del f[a]
                used.remove(b)
        return False

    return extend(0)


def _two_two_witness(
    closed: frozenset[tuple[str, str]]
) -> tuple[str, str, str, str] | None:
    edges = list(closed)
    for w, x in edges:
        for y, z in edges:
            if (w, z) not in closed and (y, x) not in closed:
                return (w, x, y, z)
    return None


def downward_closure(p: IiPomset) -> tuple[IiPomset, ...]:
    """All pomsets subsumed by p, up to isomorphism, p included.

    Orders one concurrent pair at a time on the fixed event set and
    closes transitively.  A stage that breaks the interval property
    stays on the frontier, since further ordering can repair it; only
    interval stages are reported.  Pairs into a source or out of a
    target are never ordered, so interfaces stay extremal throughout.
    """

    def extensions(prec: frozenset) -> Iterator[frozenset]:
        downs: dict[str, set[str]] = {x: {x} for x in p.events}
        ups: dict[str, set[str]] = {x: {x} for x in p.events}
        for a, b in prec:
            downs[b].add(a)
            ups[a].add(b)
        for x in p.events:
            for y in p.events:
                if x == y or (x, y) in prec or (y, x) in prec:
                    continue
                if y in p.sources or x in p.targets:
                    continue
                yield prec | frozenset(
                    (a, b) for a in downs[x] for b in ups[y]
                )

    def as_pomset(prec: frozenset) -> IiPomset:
        evord = frozenset(
            (a, b) for a, b in p.event_order
            if (a, b) not in prec and (b, a) not in prec
        )
        return IiPomset(p.events, p.labels, prec, evord, p.sources, p.targets)

    seen = {p.precedence}
    frontier = [p.precedence]
    out: dict[tuple, IiPomset] = {p.canonical_form: p}
    while frontier:
        prec = frontier.pop()
        for bigger in extensions(prec):
            if bigger in seen:
                continue
            seen.add(bigger)
            frontier.append(bigger)
            if _two_two_witness(bigger) is None:
                candidate = as_pomset(bigger)
                out.setdefault(candidate.canonical_form, candidate)
    return tuple(out[k] for k in sorted(out))


def remove_events(p: IiPomset, positions: Iterable[int]) -> IiPomset:
    """Drop target-interface events, addressed by position in the target
    conclist.  Dropped events leave both interfaces."""
    positions = frozenset(positions)
    for i in positions:
        if not 0 <= i < len(p.target_events):
            raise NotInTargetInterface(f"no target position {i}")
    drop = {p.target_events[i] for i in positions}
    keep = tuple(x for x in p.events if x not in drop)
    keepset = set(keep)
    return IiPomset(
        keep,
        tuple(p.label_of[x] for x in keep),
        frozenset((a, b) for a, b in p.precedence if a in keepset and b in keepset),
        frozenset((a, b) for a, b in p.event_order if a in keepset and b in keepset),
        p.sources - drop,
        p.targets - drop,
    )


_NAME_POOL = tuple(f"e{i}" for i in range(128))


def _ename(i: int) -> str:
    return _NAME_POOL[i] if i < len(_NAME_POOL) else f"e{i}"


def enumerate_runs(
    alphabet: Iterable[str],
    max_events: int,
    max_dim: int,
    source: Conclist | None = None,
    *,
    limit: int | None = None,
) -> Iterator[tuple[Conclist, tuple[STLetter, ...], IiPomset]]:
    """Walk every alternating letter sequence within the bounds, yielding
    (source conclist, letters so far, glued pomset) at every stage.

    Each sequence is the sparse decomposition of its own gluing, so the
    pomsets enumerate isomorphism classes without repetition: at most
    max_events events, dimension at most max_dim, labels from alphabet.
    source fixes the starting conclist; None ranges over all of them.
    """
    alphabet = tuple(alphabet)
    cap = event_limit(limit)
    if max_events > cap:
        raise BoundTooLarge(
            f"max_events {max_events} exceeds the safety cap {cap}; "
            "pass limit or set IPOMSET_MAX_EVENTS"
        )
    width_cap = min(max_dim, max_events)
    if source is not None:
        if len(source) > width_cap:
            return
        sources_iter: Iterable[tuple[str, ...]] = [source.labels]
    else:
        sources_iter = (
            labs
            for n in range(width_cap + 1)
            for labs in itertools.product(alphabet, repeat=n)
        )
    combos: dict[tuple[int, int], tuple] = {}

    def positions(n: int, k: int) -> tuple:
        got = combos.get((n, k))
        if got is None:
            got = combos[(n, k)] = tuple(
                (c, frozenset(c)) for c in itertools.combinations(range(n), k)
            )
        return got

    labsets = {
        k: tuple(itertools.product(alphabet, repeat=k))
        for k in range(1, width_cap + 1)
    }

    for src_labels in sources_iter:
        src = _conclist(src_labels)
        st = _RunState(src)
        srcset = frozenset(st.events)
        letters: list[STLetter] = []

        def moves(last_kind: str | None) -> list[tuple]:
            out: list[tuple] = []
            width = len(st.active)
            if last_kind != STARTER:
                room = min(width_cap - width, max_events - len(st.events))
                for k in range(1, room + 1):
                    for pos, posset in positions(width + k, k):
                        for labs in labsets[k]:
                            out.append((STARTER, pos, posset, labs))
            if last_kind != TERMINATOR and width:
                cl = tuple(st.active_labels)
                for r in range(1, width + 1):
                    for _, posset in positions(width, r):
                        out.append((TERMINATOR, None, posset, cl))
            return out

        def apply(mv: tuple) -> tuple:
            if mv[0] == STARTER:
                _, pos, posset, labs = mv
                li = iter(labs)
                old = iter(st.active_labels)
                cl = tuple(
                    next(li) if i in posset else next(old)
                    for i in range(len(st.active_labels) + len(pos))
                )
                letter = _letter(STARTER, cl, posset)
            else:
                letter = _letter(TERMINATOR, mv[3], mv[2])
            letters.append(letter)
            return st.apply(letter)

        yield src, tuple(letters), st.pomset(srcset)
        stack: list[tuple] = [("m", mv) for mv in reversed(moves(None))]
        while stack:
            entry = stack.pop()
            if entry[0] == "m":
                mv = entry[1]
                undo = apply(mv)
                yield src, tuple(letters), st.pomset(srcset)
                stack.append(("u", undo))
                stack.extend(("m", child) for child in reversed(moves(mv[0])))
            else:
                letters.pop()
                st.unapply(entry[1])


def enumerate_pomsets(
    alphabet: Iterable[str],
    max_events: int,
    max_dim: int,
    source: Conclist | None = None,
    *,
    limit: int | None = None,
) -> Iterator[IiPomset]:
    """One representative of every isomorphism class within the bounds."""
    for _, _, pom in enumerate_runs(alphabet, max_events, max_dim, source, limit=limit):
        yield pom
