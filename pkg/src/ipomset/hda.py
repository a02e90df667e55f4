"""Higher-dimensional automata.

An HDA is a precubical set with initial and accepting cells.  A cell
carries a conclist of currently running events; its lower face at a
position is the cell where that event has not yet started, its upper
face the cell where it has terminated.  Paths alternate starting and
terminating event subsets, and the pomset of a path is the gluing of
the corresponding starters and terminators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import (
    BoundTooLarge,
    FaceTypeMismatch,
    InterfaceMismatch,
    MissingFace,
    PrecubicalViolation,
    ValidationError,
)
from .pomsets import (
    STARTER,
    TERMINATOR,
    Conclist,
    IiPomset,
    STLetter,
    event_limit,
    glue_st,
    st_decompose_sparse,
    starter,
    terminator,
)
from .relations import aperiodicity_witness, close_typed, identity_rel

UP = "up"
DOWN = "down"


@dataclass(frozen=True)
class HDA:
    """Cells with conclists, single-event face maps, and marked subsets.

    lower and upper map each cell to the tuple of its faces, indexed by
    position in the cell's conclist.  Built by validate_hda.
    """

    cells: tuple[str, ...]
    ev: Mapping[str, Conclist]
    lower: Mapping[str, tuple[str, ...]]
    upper: Mapping[str, tuple[str, ...]]
    initial: frozenset[str]
    accepting: frozenset[str]

    def __len__(self) -> int:
        return len(self.cells)

    def dim(self, cell: str) -> int:
        return len(self.ev[cell])

    @cached_property
    def dimension(self) -> int:
        return max((len(u) for u in self.ev.values()), default=0)

    @cached_property
    def by_conclist(self) -> dict[Conclist, tuple[str, ...]]:
        out: dict[Conclist, list[str]] = {}
        for x in self.cells:
            out.setdefault(self.ev[x], []).append(x)
        return {u: tuple(xs) for u, xs in out.items()}

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted({l for u in self.ev.values() for l in u}))

    @cached_property
    def starter_steps(self) -> dict[STLetter, dict[str, tuple[str, ...]]]:
        """For each starter letter, the map lower-subset-face -> cells above it."""
        out: dict[STLetter, dict[str, list[str]]] = {}
        for x in self.cells:
            u = self.ev[x]
            for k in range(1, len(u) + 1):
                for combo in itertools.combinations(range(len(u)), k):
                    letter = starter(u.labels, combo)
                    below = subset_face(self, x, combo, 0)
                    out.setdefault(letter, {}).setdefault(below, []).append(x)
        return {l: {c: tuple(xs) for c, xs in m.items()} for l, m in out.items()}


def face(x: HDA, cell: str, position: int, kind: int) -> str:
    faces = x.lower[cell] if kind == 0 else x.upper[cell]
    return faces[position]


def subset_face(x: HDA, cell: str, positions: Iterable[int], kind: int) -> str:
    """Iterated single-position face over a position set of the cell."""
    cur = cell
    for i in sorted(positions, reverse=True):
        cur = face(x, cur, i, kind)
    return cur


def validate_hda(
    cells: Iterable[str],
    conclists: Mapping[str, Iterable[str]],
    lower: Mapping[str, Mapping[int, str]],
    upper: Mapping[str, Mapping[int, str]],
    initial: Iterable[str] = (),
    accepting: Iterable[str] = (),
) -> HDA:
    """Check precubical structure and build the HDA.

    Every cell of dimension n needs lower and upper faces at all n
    positions, each face must live on the conclist with that position
    removed, and distinct-position faces must commute.
    """
    cells = tuple(cells)
    if len(set(cells)) != len(cells):
        raise ValidationError("duplicate cell ids")
    cellset = set(cells)
    ev: dict[str, Conclist] = {}
    for x in cells:
        if x not in conclists:
            raise ValidationError(f"no conclist for cell {x!r}")
        ev[x] = Conclist(tuple(conclists[x]))
    for x in conclists:
        if x not in cellset:
            raise ValidationError(f"conclist for unknown cell {x!r}")

    low: dict[str, tuple[str, ...]] = {}
    upp: dict[str, tuple[str, ...]] = {}
    for kind, given, store in ((0, lower, low), (1, upper, upp)):
        name = "lower" if kind == 0 else "upper"
        for x in given:
            if x not in cellset:
                raise ValidationError(f"{name} faces for unknown cell {x!r}")
        for x in cells:
            n = len(ev[x])
            entry = given.get(x, {})
            for i in entry:
                if not 0 <= i < n:
                    raise ValidationError(
                        f"{name} face of {x!r} at position {i} out of range")
            got = []
            for i in range(n):
                if i not in entry:
                    raise MissingFace(x, name, i)
                f = entry[i]
                if f not in cellset:
                    raise ValidationError(
                        f"{name} face of {x!r} at {i} is unknown cell {f!r}")
                if ev[f] != ev[x].minus((i,)):
                    raise FaceTypeMismatch(x, name, i, f)
                got.append(f)
            store[x] = tuple(got)

    for s in (initial, accepting):
        for x in s:
            if x not in cellset:
                raise ValidationError(f"marked cell {x!r} does not exist")

    result = HDA(cells, ev, low, upp,
                 frozenset(initial), frozenset(accepting))

    for x in cells:
        n = len(ev[x])
        for i, j in itertools.combinations(range(n), 2):
            for mu in (0, 1):
                for nu in (0, 1):
                    one = face(result, face(result, x, j, nu), i, mu)
                    two = face(result, face(result, x, i, mu), j - 1, nu)
                    if one != two:
                        raise PrecubicalViolation(
                            x,
                            f"d{mu}_{i} d{nu}_{j} gives {one!r} "
                            f"but d{nu}_{j - 1} d{mu}_{i} gives {two!r}",
                        )
    return result


# ------------------------------------------------------------------- paths


@dataclass(frozen=True)
class Path:
    """A start cell and steps (direction, positions, target cell).

    An up step starts the events at the given positions of the target
    cell; a down step terminates positions of the current cell.  Empty
    position sets are not stored.
    """

    start: str
    steps: tuple[tuple[str, frozenset[int], str], ...]

    @property
    def end(self) -> str:
        return self.steps[-1][2] if self.steps else self.start


def make_path(x: HDA, start: str, steps: Iterable[tuple[str, Iterable[int], str]]) -> Path:
    if start not in x.ev:
        raise ValidationError(f"unknown start cell {start!r}")
    cur = start
    out: list[tuple[str, frozenset[int], str]] = []
    for direction, positions, cell in steps:
        positions = frozenset(positions)
        if not positions:
            raise ValidationError("empty step; identity steps are not stored")
        if direction == UP:
            if cell not in x.ev:
                raise ValidationError(f"unknown cell {cell!r}")
            if not all(0 <= i < x.dim(cell) for i in positions):
                raise ValidationError(f"up step positions not in {cell!r}")
            if subset_face(x, cell, positions, 0) != cur:
                raise ValidationError(
                    f"up step into {cell!r} does not come from {cur!r}")
        elif direction == DOWN:
            if not all(0 <= i < x.dim(cur) for i in positions):
                raise ValidationError(f"down step positions not in {cur!r}")
            if subset_face(x, cur, positions, 1) != cell:
                raise ValidationError(
                    f"down step from {cur!r} does not reach {cell!r}")
        else:
            raise ValidationError(f"unknown step direction {direction!r}")
        out.append((direction, positions, cell))
        cur = cell
    return Path(start, tuple(out))


def path_letters(x: HDA, path: Path) -> list[STLetter]:
    letters = []
    cur = path.start
    for direction, positions, cell in path.steps:
        if direction == UP:
            letters.append(starter(x.ev[cell].labels, positions))
        else:
            letters.append(terminator(x.ev[cur].labels, positions))
        cur = cell
    return letters


def ev_path(x: HDA, path: Path) -> IiPomset:
    """The pomset a path recognizes: the gluing of its step letters."""
    return glue_st(path_letters(x, path), x.ev[path.start], check=False)


def normalize_path(x: HDA, path: Path) -> Path:
    """Merge consecutive same-direction steps; the result is sparse.

    Merging an up step A with a following up step B into cell c maps
    A's positions through the inclusion ev(mid) = ev(c) - B; down steps
    merge symmetrically on the source cell.
    """
    steps: list[tuple[str, frozenset[int], str]] = []
    for direction, positions, cell in path.steps:
        if steps and steps[-1][0] == direction:
            _, ppos, _ = steps[-1]
            if direction == UP:
                outside = [i for i in range(x.dim(cell)) if i not in positions]
                merged = positions | {outside[i] for i in ppos}
            else:
                before = steps[-2][2] if len(steps) > 1 else path.start
                outside = [i for i in range(x.dim(before)) if i not in ppos]
                merged = ppos | {outside[i] for i in positions}
            steps[-1] = (direction, merged, cell)
        else:
            steps.append((direction, positions, cell))
    return Path(path.start, tuple(steps))


# --------------------------------------------------------------- languages


def _run_letters(x: HDA, start: frozenset[str], letters: Iterable[STLetter]) -> frozenset[str]:
    cur = start
    for letter in letters:
        if not cur:
            return cur
        if letter.kind == STARTER:
            index = x.starter_steps.get(letter, {})
            nxt: set[str] = set()
            for below in cur:
                nxt.update(index.get(below, ()))
            cur = frozenset(nxt)
        elif letter.kind == TERMINATOR:
            cur = frozenset(
                subset_face(x, c, letter.subset, 1) for c in cur)
    return cur


def accepts(x: HDA, p: IiPomset) -> bool:
    """Whether some accepting path recognizes p.

    Simulates p's sparse decomposition over subsets of cells; complete
    because every path normalizes to the sparse path of its pomset.
    """
    src, letters = st_decompose_sparse(p)
    start = frozenset(c for c in x.initial if x.ev[c] == src)
    return bool(_run_letters(x, start, letters) & x.accepting)


def reach_set(x: HDA, cell: str, p: IiPomset) -> frozenset[str]:
    """d(cell, p): the cells reached from cell along paths with pomset p."""
    src, letters = st_decompose_sparse(p)
    if x.ev[cell] != src:
        raise InterfaceMismatch(
            f"cell {cell!r} has conclist {x.ev[cell]}, pomset starts at {src}")
    return _run_letters(x, frozenset({cell}), letters)


def enumerate_language(
    x: HDA, max_events: int = 6, *, limit: int | None = None,
) -> set[IiPomset]:
    """Canonical forms of all accepted pomsets with at most max_events events.

    Walks sparse letter sequences with subset states, so each accepted
    isomorphism class is produced exactly once.
    """
    cap = event_limit(limit)
    if max_events > cap:
        raise BoundTooLarge(
            f"max_events {max_events} exceeds the safety cap {cap}; "
            "pass limit or set IPOMSET_MAX_EVENTS")
    starters_from: dict[Conclist, list[STLetter]] = {}
    for letter in x.starter_steps:
        starters_from.setdefault(letter.source, []).append(letter)
    for lst in starters_from.values():
        lst.sort(key=lambda l: l.key)

    out: set[IiPomset] = set()
    seen_forms: set = set()

    def visit(src: Conclist, letters: list[STLetter], cur: frozenset[str],
              used: int, last: str | None) -> None:
        if cur & x.accepting:
            pom = glue_st(letters, src, check=False)
            if pom.canonical_form not in seen_forms:
                seen_forms.add(pom.canonical_form)
                out.add(pom)
        state = letters[-1].target if letters else src
        width = len(state)
        if last != STARTER:
            for letter in starters_from.get(state, ()):
                fresh = len(letter.subset)
                if used + fresh > max_events:
                    continue
                nxt = _run_letters(x, cur, [letter])
                if nxt:
                    letters.append(letter)
                    visit(src, letters, nxt, used + fresh, STARTER)
                    letters.pop()
        if last != TERMINATOR and width:
            for k in range(1, width + 1):
                for combo in itertools.combinations(range(width), k):
                    letter = terminator(state.labels, combo)
                    nxt = _run_letters(x, cur, [letter])
                    letters.append(letter)
                    visit(src, letters, nxt, used, TERMINATOR)
                    letters.pop()

    for src in sorted({x.ev[c] for c in x.initial}):
        if len(src) > max_events:
            continue
        start = frozenset(c for c in x.initial if x.ev[c] == src)
        visit(src, [], start, len(src), None)
    return out


# ---------------------------------------------------------- counter-freeness


def letter_relations(x: HDA) -> list[tuple[Conclist, Conclist, frozenset, STLetter]]:
    """The typed relation of every starter and terminator step of x."""
    out = []
    for letter, index in x.starter_steps.items():
        rel = frozenset(
            (below, above) for below, aboves in index.items() for above in aboves)
        out.append((letter.source, letter.target, rel, letter))
    for u, cells in x.by_conclist.items():
        for k in range(1, len(u) + 1):
            for combo in itertools.combinations(range(len(u)), k):
                letter = terminator(u.labels, combo)
                rel = frozenset(
                    (c, subset_face(x, c, combo, 1)) for c in cells)
                out.append((u, letter.target, rel, letter))
    return out


def transition_closure(x: HDA) -> dict:
    """All reachable path relations t(P), keyed by (src, tgt, relation)."""
    return close_typed(
        letter_relations(x),
        [(u, identity_rel(cells)) for u, cells in x.by_conclist.items()],
    )


def is_counter_free_hda(x: HDA) -> tuple[bool, dict | None]:
    """Whether every reachability relation has power period 1.

    d(cell, P^n) is the image of the cell under the n-th power of the
    relation t(P), so it suffices that every endo-relation in the
    transition closure stabilizes with period 1.  The witness names the
    conclist, a generator word for the relation, and its period.
    """
    worst = aperiodicity_witness(transition_closure(x))
    if worst is None:
        return True, None
    obj, rel, word, n, period = worst
    return False, {
        "conclist": obj,
        "word": word,
        "relation": rel,
        "stabilizes_at": n,
        "period": period,
    }


def hda_isomorphic(x: HDA, y: HDA) -> bool:
    """Face-, conclist-, and marking-preserving bijection between cells."""
    if len(x) != len(y):
        return False
    byc_x, byc_y = x.by_conclist, y.by_conclist
    if set(byc_x) != set(byc_y):
        return False
    if any(len(byc_x[u]) != len(byc_y[u]) for u in byc_x):
        return False

    # ascending dimension, so every face of a cell is placed before it
    order = [c for u in sorted(byc_x, key=lambda u: (len(u), u.labels))
             for c in byc_x[u]]

    def extend(f: dict[str, str], used: set[str], i: int) -> bool:
        if i == len(order):
            return True
        c = order[i]
        for d in byc_y[x.ev[c]]:
            if d in used:
                continue
            if (c in x.initial) != (d in y.initial):
                continue
            if (c in x.accepting) != (d in y.accepting):
                continue
            if any(f[xf[c][pos]] != yf[d][pos]
                   for xf, yf in ((x.lower, y.lower), (x.upper, y.upper))
                   for pos in range(x.dim(c))):
                continue
            f[c] = d
            used.add(d)
            if extend(f, used, i + 1):
                return True
            del f[c]
            used.discard(d)
        return False

    return extend({}, set(), 0)
