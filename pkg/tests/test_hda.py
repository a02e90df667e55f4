"""HDA layer: precubical validation, paths, membership, counters.

The oracles here avoid the code paths under test: membership and
reachability are re-derived from a raw depth-first enumeration of
paths whose pomsets are folded with the binary glue, and the
counter-freeness decider is compared against direct powering of
cell-set images under explicit letter words.
"""

import itertools

import pytest

from ipomset.corpus import (
    CORPUS_HDAS,
    a_loop_hda,
    aa_cycle_hda,
    fig2_hda,
    fig3_pomset,
    fig5_merged_hda,
    fig5b_hda,
    point_hda,
)
from ipomset.errors import (
    BoundTooLarge,
    FaceTypeMismatch,
    InterfaceMismatch,
    MissingFace,
    PrecubicalViolation,
    ValidationError,
)
from ipomset.hda import (
    DOWN,
    UP,
    accepts,
    enumerate_language,
    ev_path,
    face,
    hda_isomorphic,
    is_counter_free_hda,
    make_path,
    normalize_path,
    reach_set,
    subset_face,
    validate_hda,
)
from ipomset.pomsets import (
    STARTER,
    Conclist,
    enumerate_pomsets,
    glue,
    identity_pomset,
    is_isomorphic,
    st_decompose_sparse,
    starter,
    terminator,
)


def raw_parts(x):
    """Mutable copies of the structure of an HDA, for mutation tests."""
    cells = list(x.cells)
    conclists = {c: tuple(x.ev[c]) for c in cells}
    lower = {c: dict(enumerate(x.lower[c])) for c in cells if x.lower[c]}
    upper = {c: dict(enumerate(x.upper[c])) for c in cells if x.upper[c]}
    return cells, conclists, lower, upper, set(x.initial), set(x.accepting)


def up_moves(x):
    ups = {}
    for z in x.cells:
        k = x.dim(z)
        for r in range(1, k + 1):
            for combo in itertools.combinations(range(k), r):
                below = subset_face(x, z, combo, 0)
                ups.setdefault(below, []).append((combo, z))
    return ups


def iter_paths(x, start, max_steps):
    """Every nonempty raw step sequence from start, depth first."""
    ups = up_moves(x)
    steps = []

    def walk(cur):
        if steps:
            yield list(steps)
        if len(steps) == max_steps:
            return
        for combo, z in ups.get(cur, ()):
            steps.append((UP, frozenset(combo), z))
            yield from walk(z)
            steps.pop()
        k = x.dim(cur)
        for r in range(1, k + 1):
            for combo in itertools.combinations(range(k), r):
                z = subset_face(x, cur, combo, 1)
                steps.append((DOWN, frozenset(combo), z))
                yield from walk(z)
                steps.pop()

    yield from walk(start)


def fold_pomset(x, start, steps):
    """Pomset of a raw step sequence, by folding binary glue."""
    p = identity_pomset(x.ev[start])
    cur = start
    for direction, positions, target in steps:
        if direction == UP:
            letter = starter(x.ev[target].labels, positions)
        else:
            letter = terminator(x.ev[cur].labels, positions)
        p = glue(p, letter.as_pomset())
        cur = target
    return p


def oracle_language(x, max_steps):
    """Canonical forms of pomsets of accepting paths up to max_steps."""
    forms = set()
    for s in x.initial:
        if s in x.accepting:
            forms.add(identity_pomset(x.ev[s]).canonical_form)
        for steps in iter_paths(x, s, max_steps):
            if steps[-1][2] in x.accepting:
                forms.add(fold_pomset(x, s, steps).canonical_form)
    return forms


def letter_image(x, cells_set, letter, ups):
    """One letter appplied to a set of cells, straight from the faces."""
    out = set()
    if letter.kind == STARTER:
        for c in cells_set:
            for combo, z in ups.get(c, ()):
                if x.ev[z] == letter.conclist and frozenset(combo) == letter.subset:
                    out.add(z)
    else:
        for c in cells_set:
            if x.ev[c] == letter.conclist:
                out.add(subset_face(x, c, letter.subset, 1))
    return frozenset(out)


def occurring_letters(x):
    letters = set()
    for z in x.cells:
        u = x.ev[z]
        for r in range(1, len(u) + 1):
            for combo in itertools.combinations(range(len(u)), r):
                letters.add(starter(u.labels, combo))
                letters.add(terminator(u.labels, combo))
    return sorted(letters, key=lambda l: l.key)


def endo_words(x, max_len):
    """Composable letter words of bounded length returning to their source."""
    letters = occurring_letters(x)
    by_source = {}
    for l in letters:
        by_source.setdefault(l.source, []).append(l)
    out = []

    def grow(word, tgt, src0):
        if word and tgt == src0:
            out.append(tuple(word))
        if len(word) == max_len:
            return
        for l in by_source.get(tgt, ()):
            word.append(l)
            grow(word, l.target, src0)
            word.pop()

    for src0 in sorted({l.source for l in letters}, key=tuple):
        grow([], src0, src0)
    return out


def direct_counter_free(x, max_word=4):
    """Power every bounded endo word on every cell; demand period one."""
    ups = up_moves(x)
    for word in endo_words(x, max_word):
        src = word[0].source
        for c in x.cells:
            if x.ev[c] != src:
                continue
            seen = {}
            cur = frozenset({c})
            n = 0
            while cur not in seen:
                seen[cur] = n
                n += 1
                for l in word:
                    cur = letter_image(x, cur, l, ups)
            if n - seen[cur] > 1:
                return False
    return True


class TestValidation:
    def test_fig2_shape(self):
        x = fig2_hda()
        assert len(x) == 24
        assert x.dimension == 2
        assert x.labels == ("a", "b", "c")
        sizes = {tuple(u): len(cs) for u, cs in x.by_conclist.items()}
        assert sizes == {(): 9, ("a",): 6, ("b",): 3, ("c",): 3,
                         ("a", "b"): 1, ("c", "b"): 1, ("c", "a"): 1}

    def test_corpus_all_valid(self):
        for name, build in CORPUS_HDAS.items():
            x = build()
            assert len(x) > 0, name

    def test_missing_face(self):
        cells, conclists, lower, upper, ini, acc = raw_parts(fig2_hda())
        del lower["h00"][0]
        with pytest.raises(MissingFace) as info:
            validate_hda(cells, conclists, lower, upper, ini, acc)
        assert info.value.cell == "h00"
        assert info.value.position == 0

    def test_face_type_mismatch(self):
        cells, conclists, lower, upper, ini, acc = raw_parts(fig2_hda())
        # a-edge where the b-edge belongs
        lower["sx"][0] = "h00"
        with pytest.raises(FaceTypeMismatch):
            validate_hda(cells, conclists, lower, upper, ini, acc)

    def test_swapped_edge_endpoint(self):
        cells, conclists, lower, upper, ini, acc = raw_parts(fig2_hda())
        upper["v10"][0] = "01"
        with pytest.raises(PrecubicalViolation) as info:
            validate_hda(cells, conclists, lower, upper, ini, acc)
        assert info.value.cell in {"sx", "sy"}

    def test_unknown_cells_rejected(self):
        with pytest.raises(ValidationError):
            validate_hda(["v", "v"], {"v": ()}, {}, {})
        with pytest.raises(ValidationError):
            validate_hda(["v"], {"v": (), "w": ()}, {}, {})
        with pytest.raises(ValidationError):
            validate_hda(["v"], {"v": ()}, {}, {}, initial=["w"])
        with pytest.raises(ValidationError):
            validate_hda(["e"], {"e": ("a",)}, {"e": {0: "nope"}},
                         {"e": {0: "nope"}})

    def test_subset_faces_order_independent(self):
        x = fig2_hda()
        for s in ("sx", "sy", "sz"):
            for kind in (0, 1):
                both = subset_face(x, s, (0, 1), kind)
                assert both == face(x, face(x, s, 1, kind), 0, kind)
                assert both == face(x, face(x, s, 0, kind), 0, kind)


class TestPaths:
    def dashed(self, x):
        return make_path(x, "00", [
            (UP, {0, 1}, "sx"), (DOWN, {0}, "v10"),
            (UP, {0}, "sy"), (DOWN, {1}, "h11"),
            (UP, {1}, "sz"), (DOWN, {0}, "v21"),
        ])

    def test_figure_path_pomset(self):
        x = fig2_hda()
        p = ev_path(x, self.dashed(x))
        assert is_isomorphic(p, fig3_pomset())

    def test_empty_path(self):
        x = fig2_hda()
        path = make_path(x, "sx", [])
        assert path.end == "sx"
        assert ev_path(x, path) == identity_pomset(x.ev["sx"])

    def test_make_path_rejects_bad_steps(self):
        x = fig2_hda()
        with pytest.raises(ValidationError):
            make_path(x, "nope", [])
        with pytest.raises(ValidationError):
            make_path(x, "00", [(UP, set(), "h00")])
        with pytest.raises(ValidationError):
            make_path(x, "00", [(UP, {0}, "h10")])
        with pytest.raises(ValidationError):
            make_path(x, "00", [(UP, {3}, "sx")])
        with pytest.raises(ValidationError):
            make_path(x, "sx", [(DOWN, {0}, "h01")])
        with pytest.raises(ValidationError):
            make_path(x, "00", [("sideways", {0}, "h00")])

    def test_ev_interfaces_match_endpoints(self):
        for build in CORPUS_HDAS.values():
            x = build()
            for s in x.cells:
                for steps in iter_paths(x, s, 5):
                    path = make_path(x, s, steps)
                    p = ev_path(x, path)
                    assert p.source_conclist == x.ev[s]
                    assert p.target_conclist == x.ev[path.end]

    def test_normalization(self):
        # merging same-direction runs keeps endpoints and pomset and
        # leaves an alternating sequence
        for build in CORPUS_HDAS.values():
            x = build()
            for s in x.cells:
                for steps in iter_paths(x, s, 8):
                    path = make_path(x, s, steps)
                    norm = normalize_path(x, path)
                    assert norm.start == path.start
                    assert norm.end == path.end
                    for one, two in zip(norm.steps, norm.steps[1:]):
                        assert one[0] != two[0]
                    expected = fold_pomset(x, s, steps)
                    assert ev_path(x, norm).canonical_form == expected.canonical_form
                    assert ev_path(x, path).canonical_form == expected.canonical_form
                    back = make_path(x, norm.start, norm.steps)
                    assert back == norm


class TestMembership:
    def test_accepts_figure_pomset(self):
        x = fig2_hda()
        assert accepts(x, fig3_pomset())
        assert not accepts(x, identity_pomset(Conclist(())))

    def test_agrees_with_path_oracle(self):
        x = fig2_hda()
        forms = oracle_language(x, 10)
        for p in enumerate_pomsets("abc", 4, 2):
            assert accepts(x, p) == (p.canonical_form in forms), str(p)

    def test_enumerate_matches_oracle(self):
        x = fig2_hda()
        forms = oracle_language(x, 10)
        lang = {p.canonical_form for p in enumerate_language(x, 5)}
        assert lang == {f for f in forms if len(f[0]) <= 5}
        sizes = {n: len(enumerate_language(x, n)) for n in (3, 4)}
        assert sizes == {3: 0, 4: 11}

    def test_enumerate_monotone(self):
        x = fig5b_hda()
        prev = set()
        for bound in (2, 3, 4, 5):
            cur = {p.canonical_form for p in enumerate_language(x, bound)}
            assert prev <= cur
            prev = cur

    def test_point_language(self):
        x = point_hda()
        empty = identity_pomset(Conclist(()))
        assert accepts(x, empty)
        assert {p.canonical_form for p in enumerate_language(x, 3)} == {
            empty.canonical_form}

    def test_fig5b_small_members(self):
        x = fig5b_hda()
        lang = {str(p) for p in enumerate_language(x, 3)}
        assert lang == {
            "() | st[+a] tm[-a]",
            "() | st[+a +b] tm[-a -b]",
            "() | st[+a] tm[-a] st[+b] tm[-b]",
            "() | st[+b] tm[-b] st[+a] tm[-a]",
            "() | st[+a +b] tm[-a -b] st[+b] tm[-b]",
            "() | st[+a] tm[-a] st[+b] tm[-b] st[+b] tm[-b]",
            "() | st[+b] tm[-b] st[+a] tm[-a] st[+b] tm[-b]",
        }

    def test_merged_language_unchanged(self):
        one = {p.canonical_form for p in enumerate_language(fig5b_hda(), 5)}
        two = {p.canonical_form
               for p in enumerate_language(fig5_merged_hda(), 5)}
        assert one == two

    def test_enumerate_bound_guard(self):
        with pytest.raises(BoundTooLarge):
            enumerate_language(fig2_hda(), 99)

    def test_reach_identity(self):
        x = fig2_hda()
        for c in x.cells:
            assert reach_set(x, c, identity_pomset(x.ev[c])) == {c}

    def test_reach_interface_mismatch(self):
        x = fig2_hda()
        p = terminator(("a",), (0,)).as_pomset()
        with pytest.raises(InterfaceMismatch):
            reach_set(x, "00", p)

    def test_reach_agrees_with_path_oracle(self):
        for build in (fig2_hda, fig5b_hda):
            x = build()
            for s in x.cells:
                groups = {}
                reps = {}
                for steps in iter_paths(x, s, 6):
                    p = fold_pomset(x, s, steps)
                    groups.setdefault(p.canonical_form, set()).add(steps[-1][2])
                    reps.setdefault(p.canonical_form, p)
                for form, targets in groups.items():
                    p = reps[form]
                    if len(st_decompose_sparse(p)[1]) > 6:
                        continue
                    assert reach_set(x, s, p) == targets


class TestCounters:
    def test_decider_matches_direct_powers(self):
        expected = {
            "fig2": True, "fig5b": False, "fig5-merged": True,
            "point": True, "a-loop": True, "aa-cycle": False,
        }
        for name, build in CORPUS_HDAS.items():
            x = build()
            got, witness = is_counter_free_hda(x)
            assert got == direct_counter_free(x), name
            assert got == expected[name], name
            assert (witness is None) == got, name

    def test_fig5b_witness(self):
        x = fig5b_hda()
        got, witness = is_counter_free_hda(x)
        assert not got
        assert witness["period"] == 2
        assert ("10", "11") in witness["relation"]
        assert ("11", "10") in witness["relation"]
        word = witness["word"]
        assert [str(l) for l in word] == ["st[+b]", "tm[-b]"]
        # re-derive the relation and its period from raw faces
        ups = up_moves(x)
        rel = set()
        for c in x.cells:
            if x.ev[c] != witness["conclist"]:
                continue
            cur = frozenset({c})
            for l in word:
                cur = letter_image(x, cur, l, ups)
            rel.update((c, z) for z in cur)
        assert frozenset(rel) == witness["relation"]
        powers = [frozenset(rel)]
        while True:
            last = powers[-1]
            nxt = frozenset((a, d) for a, b in rel for c, d in last if b == c)
            if nxt in powers:
                assert len(powers) - powers.index(nxt) == witness["period"]
                break
            powers.append(nxt)

    def test_loop_vs_cycle(self):
        assert is_counter_free_hda(a_loop_hda()) == (True, None)
        got, witness = is_counter_free_hda(aa_cycle_hda())
        assert not got
        assert witness["period"] == 2


class TestIsomorphism:
    def test_rebuilt_and_renamed(self):
        assert hda_isomorphic(fig2_hda(), fig2_hda())
        x = fig5b_hda()
        cells, conclists, lower, upper, ini, acc = raw_parts(x)
        ren = {c: c + "_r" for c in cells}
        y = validate_hda(
            [ren[c] for c in cells],
            {ren[c]: u for c, u in conclists.items()},
            {ren[c]: {i: ren[t] for i, t in m.items()}
             for c, m in lower.items()},
            {ren[c]: {i: ren[t] for i, t in m.items()}
             for c, m in upper.items()},
            [ren[c] for c in ini], [ren[c] for c in acc])
        assert hda_isomorphic(x, y)

    def test_distinct_shapes(self):
        assert not hda_isomorphic(fig2_hda(), fig5b_hda())
        assert not hda_isomorphic(fig5b_hda(), fig5_merged_hda())
        assert not hda_isomorphic(point_hda(), a_loop_hda())
