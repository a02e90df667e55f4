"""Finite categories and module presentations recognizing HDA languages.

The transition category of an HDA collects every composite of the
letter relations between cell sets, typed by conclists; a language is
then a question about which composites meet initial-times-accepting.
Module presentations describe the same data element-wise: a carrier
set with a letter action, an initial element per conclist, and an
accepting subset.  The canonical suffix presentation quotients the
determinized letter automaton, the coherent closure enriches a
presentation with event-removal faces, and a coherent presentation
unfolds back into an HDA.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    ActionUndefined,
    LabelMismatch,
    NotCoherent,
    SourceNotEmpty,
    ValidationError,
)
from .hda import HDA, subset_face, validate_hda
from .pomsets import (
    STARTER,
    TERMINATOR,
    Conclist,
    IiPomset,
    STLetter,
    canonical_pomset,
    glue_st,
    st_decompose_sparse,
    starter,
    terminator,
)
from .relations import close_typed, compose, identity_rel
from .st_automata import (
    determinize_reachable,
    hda_to_st_automaton,
    sparse_suffix_equivalent,
)


@dataclass(frozen=True)
class FiniteCategory:
    """Objects are conclists; morphisms carry a total composition table."""

    objects: tuple[Conclist, ...]
    morphisms: tuple[str, ...]
    src: Mapping[str, Conclist]
    tgt: Mapping[str, Conclist]
    identity: Mapping[Conclist, str]
    table: Mapping[tuple[str, str], str]

    def __len__(self) -> int:
        return len(self.morphisms)

    def hom(self, u: Conclist, v: Conclist) -> tuple[str, ...]:
        return tuple(m for m in self.morphisms
                     if self.src[m] == u and self.tgt[m] == v)

    def compose(self, f: str, g: str) -> str:
        return self.table[(f, g)]


def validate_category(c: FiniteCategory) -> None:
    for u in c.objects:
        i = c.identity.get(u)
        if i is None or c.src[i] != u or c.tgt[i] != u:
            raise ValidationError(f"bad identity at {u}")
    for m in c.morphisms:
        if c.src[m] not in c.objects or c.tgt[m] not in c.objects:
            raise ValidationError(f"morphism {m!r} has unknown endpoints")
        if c.table[(c.identity[c.src[m]], m)] != m:
            raise ValidationError(f"left identity law fails at {m!r}")
        if c.table[(m, c.identity[c.tgt[m]])] != m:
            raise ValidationError(f"right identity law fails at {m!r}")
    outgoing: dict[Conclist, list[str]] = {}
    for m in c.morphisms:
        outgoing.setdefault(c.src[m], []).append(m)
    for f in c.morphisms:
        for g in outgoing.get(c.tgt[f], ()):
            fg = c.table.get((f, g))
            if fg is None:
                raise ValidationError(f"composition missing for {(f, g)!r}")
            if c.src[fg] != c.src[f] or c.tgt[fg] != c.tgt[g]:
                raise ValidationError(f"composite {(f, g)!r} badly typed")
    for f in c.morphisms:
        for g in outgoing.get(c.tgt[f], ()):
            fg = c.table[(f, g)]
            for h in outgoing.get(c.tgt[g], ()):
                if c.table[(fg, h)] != c.table[(f, c.table[(g, h)])]:
                    raise ValidationError(
                        f"associativity fails at {(f, g, h)!r}")


@dataclass(frozen=True)
class Functor:
    """Letter-wise functor into a finite category.

    The object map is the identity on conclists, so the functor is
    just a value for every letter; a pomset is evaluated through its
    sparse decomposition.
    """

    category: FiniteCategory
    letter_value: Mapping[STLetter, str]

    def apply(self, p: IiPomset) -> str | None:
        """Value on a pomset, or None when a piece is outside the domain."""
        src, letters = st_decompose_sparse(p)
        cur = self.category.identity.get(src)
        if cur is None:
            return None
        for l in letters:
            v = self.letter_value.get(l)
            if v is None:
                return None
            cur = self.category.table[(cur, v)]
        return cur


def _all_conclists(labels: tuple[str, ...], k: int) -> tuple[Conclist, ...]:
    out = [Conclist(())]
    for n in range(1, k + 1):
        out.extend(Conclist(t) for t in itertools.product(labels, repeat=n))
    return tuple(out)


def _morphism_name(src: Conclist, word: tuple) -> str:
    if not word:
        return "id" + str(src)
    return ";".join(str(l) for l in word)


def transition_category(
    x: HDA,
) -> tuple[FiniteCategory, Functor, frozenset[str]]:
    """The category of reachability relations of an HDA.

    Objects are all conclists over the occurring labels up to the
    HDA's dimension; hom(U, V) holds every composite of letter
    relations between the U-cells and the V-cells.  Also returns the
    letter functor and the morphisms meeting initial x accepting.
    """
    objects = _all_conclists(x.labels, x.dimension)
    cells_by = {u: x.by_conclist.get(u, ()) for u in objects}
    generators = []
    for v in objects:
        cv = cells_by[v]
        for r in range(1, len(v) + 1):
            for combo in itertools.combinations(range(len(v)), r):
                st = starter(v.labels, combo)
                rel = frozenset((subset_face(x, z, combo, 0), z) for z in cv)
                generators.append((st.source, v, rel, st))
                tm = terminator(v.labels, combo)
                rel = frozenset((z, subset_face(x, z, combo, 1)) for z in cv)
                generators.append((v, tm.target, rel, tm))
    closure = close_typed(
        generators, [(u, identity_rel(cells_by[u])) for u in objects])

    names: dict[tuple, str] = {}
    for (s, t, rel), word in closure.items():
        names[(s, t, rel)] = _morphism_name(s, word)
    if len(set(names.values())) != len(names):
        raise ValidationError("morphism naming collision")

    outgoing: dict[Conclist, list[tuple[str, Conclist, frozenset]]] = {}
    for (s, t, rel) in closure:
        outgoing.setdefault(s, []).append((names[(s, t, rel)], t, rel))
    table = {}
    for (s, t, rel) in closure:
        f = names[(s, t, rel)]
        for g, w, grel in outgoing.get(t, ()):
            table[(f, g)] = names[(s, w, compose(rel, grel))]

    identity = {u: names[(u, u, identity_rel(cells_by[u]))] for u in objects}
    cat = FiniteCategory(
        objects, tuple(sorted(names.values())),
        {names[k]: k[0] for k in names}, {names[k]: k[1] for k in names},
        identity, table)

    letter_value = {}
    for s, t, rel, letter in generators:
        letter_value[letter] = names[(s, t, rel)]
    fun = Functor(cat, letter_value)

    kset = frozenset(
        names[(s, t, rel)] for (s, t, rel) in closure
        if any(q in x.initial and r in x.accepting for q, r in rel))
    return cat, fun, kset


def validate_functor(fun: Functor, max_letters: int = 4) -> list[str]:
    """Check one value per pomset on letter words gluing equally."""
    by_source: dict[Conclist, list[STLetter]] = {}
    for l in fun.letter_value:
        if l.subset:
            by_source.setdefault(l.source, []).append(l)
    for ls in by_source.values():
        ls.sort(key=lambda l: l.key)
    report = []
    for u in fun.category.objects:
        buckets: dict[IiPomset, tuple[tuple, str]] = {}
        stack = [((), u, fun.category.identity[u])]
        while stack:
            word, tgt, value = stack.pop()
            if word:
                key = canonical_pomset(glue_st(list(word), u, check=False))
                other = buckets.get(key)
                if other is None:
                    buckets[key] = (word, value)
                elif other[1] != value:
                    report.append(
                        f"words {[str(l) for l in other[0]]} and "
                        f"{[str(l) for l in word]} glue equally from {u} "
                        f"but evaluate differently")
            if len(word) < max_letters:
                for l in by_source.get(tgt, ()):
                    stack.append(
                        (word + (l,), l.target,
                         fun.category.table[(value, fun.letter_value[l])]))
    return report


def is_aperiodic_category(
    c: FiniteCategory,
) -> tuple[bool, dict | None]:
    """Whether every endomorphism's powers stabilize with period one.

    The witness reports the worst period together with the smallest
    power index from which the cycle starts.
    """
    worst = None
    for u in c.objects:
        for m in c.hom(u, u):
            seen: dict[str, int] = {}
            cur = m
            n = 1
            while cur not in seen:
                seen[cur] = n
                cur = c.table[(cur, m)]
                n += 1
            period = n - seen[cur]
            if period > 1 and (worst is None or period > worst["period"]):
                worst = {"object": u, "morphism": m,
                         "stabilizes_at": seen[cur], "period": period}
    return worst is None, worst


def syntactic_category(
    x: HDA,
) -> tuple[FiniteCategory, frozenset[str], dict[str, str]]:
    """Quotient of the transition category by the context congruence.

    Two parallel morphisms are identified when no pair of composable
    contexts separates them with respect to the accepting morphism
    set.  Returns the quotient, the image of that set, and the
    projection from transition-category morphisms to representatives.
    """
    cat, _, kset = transition_category(x)
    wordlen = {m: 0 if m.startswith("id(") else m.count(";") + 1
               for m in cat.morphisms}
    incoming: dict[Conclist, list[str]] = {}
    outgoing: dict[Conclist, list[str]] = {}
    for m in cat.morphisms:
        incoming.setdefault(cat.tgt[m], []).append(m)
        outgoing.setdefault(cat.src[m], []).append(m)

    signature = {}
    for m in cat.morphisms:
        sig = set()
        for c in incoming.get(cat.src[m], ()):
            cm = cat.table[(c, m)]
            for d in outgoing.get(cat.tgt[m], ()):
                if cat.table[(cm, d)] in kset:
                    sig.add((c, d))
        signature[m] = frozenset(sig)

    classes: dict[tuple, list[str]] = {}
    for m in cat.morphisms:
        classes.setdefault(
            (cat.src[m], cat.tgt[m], signature[m]), []).append(m)
    rep = {}
    for ms in classes.values():
        r = min(ms, key=lambda m: (wordlen[m], m))
        for m in ms:
            rep[m] = r
    for m in cat.morphisms:
        if (m in kset) != (rep[m] in kset):
            raise ValidationError("accepting set not saturated by classes")
    for (f, g), h in cat.table.items():
        if rep[h] != rep[cat.table[(rep[f], rep[g])]]:
            raise ValidationError("congruence does not respect composition")

    reps = tuple(sorted(set(rep.values())))
    table = {}
    for f in reps:
        for g in reps:
            if cat.tgt[f] == cat.src[g]:
                table[(f, g)] = rep[cat.table[(f, g)]]
    quotient = FiniteCategory(
        cat.objects, reps,
        {m: cat.src[m] for m in reps}, {m: cat.tgt[m] for m in reps},
        {u: rep[cat.identity[u]] for u in cat.objects}, table)
    return quotient, frozenset(rep[m] for m in kset), rep


# ------------------------------------------------------------ presentations


@dataclass(frozen=True)
class Presentation:
    """Elements with conclist types, a letter action, and marked parts.

    The action mapping holds only the defined entries; every missing
    entry is an implicit dead element that absorbs all actions and
    never accepts.  lower, when present, maps (element, removed
    position set) to the element of the pomset with those target
    events removed.
    """

    elements: tuple[str, ...]
    src: Mapping[str, Conclist]
    tgt: Mapping[str, Conclist]
    action: Mapping[tuple[str, STLetter], str]
    initials: Mapping[Conclist, str]
    accepting: frozenset[str]
    lower: Mapping[tuple[str, frozenset[int]], str] | None = None

    def __len__(self) -> int:
        return len(self.elements)


def make_presentation(
    elements: Iterable[str],
    src: Mapping[str, Iterable[str]],
    tgt: Mapping[str, Iterable[str]],
    action: Mapping[tuple[str, STLetter], str],
    initials: Mapping[Iterable[str], str],
    accepting: Iterable[str],
    lower: Mapping[tuple[str, Iterable[int]], str] | None = None,
) -> Presentation:
    elements = tuple(elements)
    if len(set(elements)) != len(elements):
        raise ValidationError("duplicate element ids")
    known = set(elements)
    srcs = {}
    tgts = {}
    for m in elements:
        if m not in src or m not in tgt:
            raise ValidationError(f"no conclists for element {m!r}")
        srcs[m] = Conclist(tuple(src[m]))
        tgts[m] = Conclist(tuple(tgt[m]))
    acts = {}
    for (m, letter), n in action.items():
        if m not in known or n not in known:
            raise ValidationError(f"action endpoint missing: {(m, n)!r}")
        if tgts[m] != letter.source or tgts[n] != letter.target:
            raise LabelMismatch(
                f"action {m!r} . {letter} = {n!r} does not match the "
                f"element conclists")
        acts[(m, letter)] = n
    inits = {}
    for u, m in initials.items():
        if m not in known:
            raise ValidationError(f"initial element {m!r} does not exist")
        inits[Conclist(tuple(u))] = m
    accepting = frozenset(accepting)
    for m in accepting:
        if m not in known:
            raise ValidationError(f"accepting element {m!r} does not exist")
    faces = None
    if lower is not None:
        faces = {}
        for (m, positions), n in lower.items():
            if m not in known or n not in known:
                raise ValidationError(f"face endpoint missing: {(m, n)!r}")
            drop = frozenset(positions)
            if not drop or not all(0 <= i < len(tgts[m]) for i in drop):
                raise ValidationError(
                    f"bad removal set {sorted(drop)} for {m!r}")
            faces[(m, drop)] = n
    return Presentation(elements, srcs, tgts, acts, inits, accepting, faces)


def act(p: Presentation, m: str, letter: STLetter) -> str | None:
    """One action step; None is the implicit dead element."""
    if p.tgt[m] != letter.source:
        raise LabelMismatch(
            f"element {m!r} has conclist {p.tgt[m]}, not {letter.source}")
    if not letter.subset:
        return m
    return p.action.get((m, letter))


def act_word(p: Presentation, m: str | None, letters: Iterable[STLetter]) -> str | None:
    for l in letters:
        if m is None:
            return None
        m = act(p, m, l)
    return m


def recognizes(p: Presentation, pom: IiPomset) -> bool:
    """Whether the pomset's image under the action lies in the accepting set."""
    src, letters = st_decompose_sparse(pom)
    start = p.initials.get(src)
    if start is None:
        raise ActionUndefined(
            f"no initial element for source conclist {src}")
    got = act_word(p, start, letters)
    return got is not None and got in p.accepting


def _occurring_letters(p: Presentation) -> dict[Conclist, list[STLetter]]:
    by_source: dict[Conclist, set[STLetter]] = {}
    for _, letter in p.action:
        if letter.subset:
            by_source.setdefault(letter.source, set()).add(letter)
    return {u: sorted(ls, key=lambda l: l.key) for u, ls in by_source.items()}


def is_counter_free_module(p: Presentation) -> tuple[bool, dict | None]:
    """Power period one for every letter-word transformation.

    For each conclist the elements with that target form a domain; an
    evaluable letter word acts on it as a partial transformation, dead
    results included.  The closure of these transformations under
    composition must contain no cycle longer than one.
    """
    domains = {}
    for m in p.elements:
        domains.setdefault(p.tgt[m], []).append(m)
    domains = {u: tuple(sorted(ms)) for u, ms in domains.items()}
    position = {u: {m: i for i, m in enumerate(ms)}
                for u, ms in domains.items()}
    letters = _occurring_letters(p)

    def letter_fn(l: STLetter) -> tuple[int | None, ...]:
        pos = position.get(l.target, {})
        out = []
        for m in domains.get(l.source, ()):
            n = p.action.get((m, l))
            out.append(None if n is None else pos[n])
        return tuple(out)

    found: dict[tuple[Conclist, Conclist, tuple], tuple] = {}
    queue: deque = deque()

    def add(s, t, fn, word):
        key = (s, t, fn)
        if key not in found:
            found[key] = word
            queue.append(key)

    for u, ms in domains.items():
        add(u, u, tuple(range(len(ms))), ())
    gens = []
    for u, ls in letters.items():
        for l in ls:
            fn = letter_fn(l)
            gens.append((u, l.target, fn, l))
            add(u, l.target, fn, (l,))
    while queue:
        s, mid, fn = queue.popleft()
        word = found[(s, mid, fn)]
        for gs, gt, gfn, l in gens:
            if gs == mid:
                nxt = tuple(None if v is None else gfn[v] for v in fn)
                add(s, gt, nxt, word + (l,))

    worst = None
    for (s, t, fn), word in found.items():
        if s != t:
            continue
        seen: dict[tuple, int] = {}
        cur = fn
        n = 1
        while cur not in seen:
            seen[cur] = n
            cur = tuple(None if v is None else fn[v] for v in cur)
            n += 1
        period = n - seen[cur]
        if period > 1 and (worst is None or period > worst["period"]):
            ms = domains[s]
            worst = {
                "conclist": s,
                "word": word,
                "mapping": {m: None if v is None else ms[v]
                            for m, v in zip(ms, fn)},
                "stabilizes_at": seen[cur],
                "period": period,
            }
    return worst is None, worst


def validate_presentation(p: Presentation, max_letters: int = 4) -> list[str]:
    """Report violations of the module laws; empty means clean.

    Action consistency is tested on letter words up to max_letters
    that glue to equal pomsets; that bound is the extent of the
    associativity guarantee.
    """
    report = []
    known = set(p.elements)
    for (m, letter), n in p.action.items():
        if m not in known or n not in known:
            report.append(f"action endpoint missing: {(m, n)!r}")
            continue
        if p.tgt[m] != letter.source or p.tgt[n] != letter.target:
            report.append(f"action {m!r} . {letter} = {n!r} badly typed")
        if p.src[m] != p.src[n]:
            report.append(f"action {m!r} . {letter} changes the source")
        if not letter.subset and n != m:
            report.append(f"identity letter moves {m!r}")
    for u, m in p.initials.items():
        if m not in known:
            report.append(f"initial element {m!r} does not exist")
        elif p.tgt[m] != u or p.src[m] != u:
            report.append(f"initial element {m!r} is not an identity image")
    for m in p.accepting:
        if m not in known:
            report.append(f"accepting element {m!r} does not exist")

    letters = _occurring_letters(p)
    starts = {u for u in letters} | {p.tgt[m] for m in p.elements}
    for u in sorted(starts):
        members = [m for m in p.elements if p.tgt[m] == u]
        buckets: dict[IiPomset, tuple] = {}
        stack = [((), u)]
        while stack:
            word, tgt = stack.pop()
            if word:
                key = canonical_pomset(glue_st(list(word), u, check=False))
                other = buckets.get(key)
                if other is None:
                    buckets[key] = word
                else:
                    for m in members:
                        if act_word(p, m, word) != act_word(p, m, other):
                            report.append(
                                f"words {[str(l) for l in other]} and "
                                f"{[str(l) for l in word]} glue equally "
                                f"from {u} but act differently on {m!r}")
            if len(word) < max_letters:
                for l in letters.get(tgt, ()):
                    stack.append((word + (l,), l.target))

    if p.lower is not None:
        report.extend(_face_report(p))
    return report


def _kept(n: int, removed: frozenset[int]) -> list[int]:
    return [i for i in range(n) if i not in removed]


def _face_report(p: Presentation) -> list[str]:
    report = []
    for (m, drop), n in p.lower.items():
        if p.tgt[m].minus(drop) != p.tgt[n]:
            report.append(f"face {m!r} - {sorted(drop)} = {n!r} badly typed")
        if p.src[m] != p.src[n]:
            report.append(f"face {m!r} - {sorted(drop)} changes the source")
    for (m, drop), n in p.lower.items():
        size = len(p.tgt[n])
        kept = _kept(len(p.tgt[m]), drop)
        for sub in _subsets(size):
            if not sub:
                continue
            two = p.lower.get((n, sub))
            direct = p.lower.get((m, drop | frozenset(kept[i] for i in sub)))
            if two is not None and direct is not None and two != direct:
                report.append(
                    f"iterated faces of {m!r} disagree at {sorted(drop)} "
                    f"then {sorted(sub)}")
    for (m, letter), n in p.action.items():
        if letter.kind == TERMINATOR:
            report.extend(_terminator_face_check(p, m, letter, n))
        elif letter.kind == STARTER:
            report.extend(_starter_face_check(p, m, letter, n))
    return report


def _terminator_face_check(p, m, letter, n) -> list[str]:
    out = []
    u = letter.source
    ended = letter.subset
    kept = _kept(len(u), ended)
    for sub in _subsets(len(letter.target)):
        if not sub:
            continue
        left = p.lower.get((n, sub))
        old = frozenset(kept[i] for i in sub)
        base = p.lower.get((m, old))
        if left is None or base is None:
            continue
        remaining = _kept(len(u), old)
        rank = {pos: i for i, pos in enumerate(remaining)}
        tm = terminator(u.minus(old).labels, sorted(rank[i] for i in ended))
        right = act(p, base, tm)
        if right != left:
            out.append(
                f"terminator action on {m!r} does not commute with "
                f"removing {sorted(sub)}")
    return out


def _starter_face_check(p, m, letter, n) -> list[str]:
    out = []
    v = letter.target
    added = letter.subset
    rank_src = {pos: i for i, pos in enumerate(_kept(len(v), added))}
    for sub in _subsets(len(v)):
        if not sub:
            continue
        left = p.lower.get((n, sub))
        if left is None:
            continue
        old = frozenset(rank_src[i] for i in sub - added)
        if old:
            base = p.lower.get((m, old))
        else:
            base = m
        if base is None:
            continue
        still = added - sub
        if still:
            remaining = _kept(len(v), sub)
            rank = {pos: i for i, pos in enumerate(remaining)}
            st = starter(v.minus(sub).labels, sorted(rank[i] for i in still))
            right = act(p, base, st)
        else:
            right = base
        if right != left:
            out.append(
                f"starter action on {m!r} does not commute with "
                f"removing {sorted(sub)}")
    return out


def _subsets(n: int) -> list[frozenset[int]]:
    out = []
    for r in range(n + 1):
        out.extend(frozenset(c) for c in itertools.combinations(range(n), r))
    return out


def suffix_presentation(x: HDA) -> Presentation:
    """The canonical presentation by suffix classes of subset states.

    Elements pair a source conclist of the HDA's initial cells with a
    sparse-suffix-equivalence class of determinized subset states
    reachable from that source's initial state.
    """
    d, _ = determinize_reachable(hda_to_st_automaton(x))
    letters_from: dict[Conclist, list[STLetter]] = {}
    for l in d.alphabet:
        letters_from.setdefault(l.source, []).append(l)

    elements = []
    srcs = {}
    tgts = {}
    action = {}
    initials = {}
    accepting = set()
    for q0 in sorted(d.initial):
        source = d.label[q0]
        reach = [q0]
        seen = {q0}
        i = 0
        while i < len(reach):
            q = reach[i]
            i += 1
            for l in letters_from.get(d.label[q], ()):
                (r,) = d.step[(q, l)]
                if r not in seen:
                    seen.add(r)
                    reach.append(r)
        rep = {}
        for q in reach:
            others = [r for r in reach
                      if d.label[r] == d.label[q]
                      and sparse_suffix_equivalent(d, q, r)]
            rep[q] = min(others)

        prefix = "[" + " ".join(source.labels) + "]"
        name = {q: prefix + r for q, r in rep.items()}
        for q in sorted(set(rep.values())):
            elements.append(name[q])
            srcs[name[q]] = source
            tgts[name[q]] = d.label[q]
            if q in d.final:
                accepting.add(name[q])
            for l in letters_from.get(d.label[q], ()):
                (r,) = d.step[(q, l)]
                action[(name[q], l)] = name[rep[r]]
        for q in reach:
            for l in letters_from.get(d.label[q], ()):
                (r,) = d.step[(q, l)]
                if name[rep[r]] != action[(name[rep[q]], l)]:
                    raise ValidationError(
                        "suffix classes are not closed under the action")
        initials[source.labels] = name[rep[q0]]
    return make_presentation(
        elements, {m: srcs[m] for m in elements},
        {m: tgts[m] for m in elements}, action, initials, accepting)


def _tuple_name(parts: list[str | None]) -> str:
    return "/".join("-" if m is None else m for m in parts)


def coherent_closure(p: Presentation) -> Presentation:
    """Extend a presentation with event-removal faces.

    Elements of the closure are tuples giving, for each subset of the
    target events, the image of the pomset with those events removed;
    letters act through the exchange of gluing and removal, and the
    removal faces are re-indexings of the tuples.
    """
    for m in p.elements:
        if p.src[m].labels != ():
            raise SourceNotEmpty(
                f"element {m!r} has source {p.src[m]}, not ()")
    empty = Conclist(())
    start = p.initials.get(empty)
    if start is None:
        raise ValidationError("no initial element at the empty conclist")
    letters = _occurring_letters(p)

    elements: dict[str, tuple[Conclist, dict[frozenset[int], str | None]]] = {}
    order: list[str] = []
    queue: deque[str] = deque()
    action = {}
    lower = {}

    def admit(u: Conclist, parts: dict[frozenset[int], str | None]) -> str:
        name = _tuple_name([parts[s] for s in _subsets(len(u))])
        got = elements.get(name)
        if got is None:
            elements[name] = (u, parts)
            order.append(name)
            queue.append(name)
        elif got != (u, parts):
            raise ValidationError(f"tuple naming collision at {name!r}")
        return name

    root = admit(empty, {frozenset(): start})
    while queue:
        name = queue.popleft()
        u, parts = elements[name]
        for l in letters.get(u, ()):
            new = _letter_on_tuple(p, u, parts, l)
            if new[frozenset()] is None:
                continue
            action[(name, l)] = admit(l.target, new)
        for drop in _subsets(len(u)):
            if not drop:
                continue
            if parts[drop] is None:
                continue
            kept = _kept(len(u), drop)
            face = {sub: parts[drop | frozenset(kept[i] for i in sub)]
                    for sub in _subsets(len(kept))}
            lower[(name, drop)] = admit(u.minus(drop), face)

    accepting = [n for n in order
                 if elements[n][1][frozenset()] in p.accepting]
    return make_presentation(
        order,
        {n: () for n in order},
        {n: elements[n][0] for n in order},
        action, {(): root}, accepting,
        lower)


def _letter_on_tuple(
    p: Presentation,
    u: Conclist,
    parts: dict[frozenset[int], str | None],
    l: STLetter,
) -> dict[frozenset[int], str | None]:
    new: dict[frozenset[int], str | None] = {}
    if l.kind == STARTER:
        v = l.target
        added = l.subset
        rank_src = {pos: i for i, pos in enumerate(_kept(len(v), added))}
        for sub in _subsets(len(v)):
            old = frozenset(rank_src[i] for i in sub - added)
            base = parts[old]
            if base is None:
                new[sub] = None
                continue
            still = added - sub
            if not still:
                new[sub] = base
                continue
            remaining = _kept(len(v), sub)
            rank = {pos: i for i, pos in enumerate(remaining)}
            st = starter(v.minus(sub).labels, sorted(rank[i] for i in still))
            new[sub] = p.action.get((base, st))
    else:
        ended = l.subset
        kept = _kept(len(u), ended)
        for sub in _subsets(len(l.target)):
            old = frozenset(kept[i] for i in sub)
            base = parts[old]
            if base is None:
                new[sub] = None
                continue
            remaining = _kept(len(u), old)
            rank = {pos: i for i, pos in enumerate(remaining)}
            tm = terminator(u.minus(old).labels,
                            sorted(rank[i] for i in ended))
            new[sub] = p.action.get((base, tm))
    return new


def presentation_to_hda(p: Presentation) -> HDA:
    """Unfold a coherent presentation into an HDA.

    Elements become cells of their target conclist, removal faces
    become lower faces, terminator actions become upper faces, the
    empty-conclist initial element starts, and the accepting set ends.
    """
    if p.lower is None:
        raise NotCoherent("presentation has no removal faces")
    empty = Conclist(())
    if empty not in p.initials:
        raise ValidationError("no initial element at the empty conclist")
    conclists = {m: p.tgt[m] for m in p.elements}
    lower = {}
    upper = {}
    for m in p.elements:
        u = p.tgt[m]
        lo = {}
        hi = {}
        for i in range(len(u)):
            below = p.lower.get((m, frozenset({i})))
            if below is None:
                raise NotCoherent(f"missing removal face {i} of {m!r}")
            lo[i] = below
            above = p.action.get((m, terminator(u.labels, (i,))))
            if above is None:
                raise NotCoherent(f"missing terminator action {i} of {m!r}")
            hi[i] = above
        lower[m] = lo
        upper[m] = hi
    return validate_hda(p.elements, conclists, lower, upper,
                        [p.initials[empty]], p.accepting)
