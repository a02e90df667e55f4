"""Pomset layer: validation, gluing, sparse steps, subsumption.

The oracles here are deliberately dumb: permutation search for
isomorphism and subsumption, subset search for antichains, down-set
chains for interval orders.  The fast implementations must agree with
them on exhaustively enumerated universes.
"""

import functools
import itertools

import pytest

from ipomset import (
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
from ipomset.errors import (
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
from ipomset.pomsets import event_limit


# ---------------------------------------------------------------- oracles


def bijections(p, q):
    """All label-preserving bijections from p's events to q's."""
    if sorted(p.labels) != sorted(q.labels):
        return
    bylab_p, bylab_q = {}, {}
    for x in p.events:
        bylab_p.setdefault(p.label_of[x], []).append(x)
    for x in q.events:
        bylab_q.setdefault(q.label_of[x], []).append(x)
    labs = sorted(bylab_p)
    pools = [itertools.permutations(bylab_q[l]) for l in labs]
    for choice in itertools.product(*pools):
        f = {}
        for l, perm in zip(labs, choice):
            f.update(zip(bylab_p[l], perm))
        yield f


def iso_oracle(p, q):
    for f in bijections(p, q):
        if (frozenset((f[a], f[b]) for a, b in p.precedence) == q.precedence
                and frozenset((f[a], f[b]) for a, b in p.event_order) == q.event_order
                and frozenset(f[x] for x in p.sources) == q.sources
                and frozenset(f[x] for x in p.targets) == q.targets):
            return True
    return False


def subsumed_oracle(p, q):
    """p refines q: q's precedence pulls back, p's event order pushes forward."""
    for f in bijections(p, q):
        if frozenset(f[x] for x in p.sources) != q.sources:
            continue
        if frozenset(f[x] for x in p.targets) != q.targets:
            continue
        if not all((f[a], f[b]) in q.event_order for a, b in p.event_order):
            continue
        if q.precedence <= frozenset((f[a], f[b]) for a, b in p.precedence):
            return True
    return False


def max_antichain(p):
    for k in range(len(p), 0, -1):
        for combo in itertools.combinations(p.events, k):
            if all((a, b) not in p.precedence and (b, a) not in p.precedence
                   for a, b in itertools.combinations(combo, 2)):
                return k
    return 0


def universe_ab32():
    return list(enumerate_pomsets("ab", 3, 2))


def grouped_by_labels(universe):
    groups = {}
    for p in universe:
        groups.setdefault(tuple(sorted(p.labels)), []).append(p)
    return groups


# ------------------------------------------------------------- validation


class TestValidation:
    def test_all_four_point_posets(self):
        """make_ipomset accepts exactly the interval orders.

        All 219 partial orders on four labeled points, checked against
        the down-set characterization: an order is interval iff the
        down-sets form a chain under inclusion.
        """
        events = ("w", "x", "y", "z")
        pairs = [(a, b) for a in events for b in events if a != b]

        def transitive(rel):
            return all((a, d) in rel
                       for a, b in rel for c, d in rel if b == c)

        def antisym(rel):
            return all((b, a) not in rel for a, b in rel)

        def interval_by_downsets(rel):
            downs = [frozenset(a for a, b in rel if b == e) for e in events]
            return all(d1 <= d2 or d2 <= d1 for d1 in downs for d2 in downs)

        posets = []
        for bits in itertools.product((0, 1), repeat=len(pairs)):
            rel = frozenset(pr for pr, b in zip(pairs, bits) if b)
            if transitive(rel) and antisym(rel):
                posets.append(rel)
        assert len(posets) == 219

        accepted = rejected = 0
        for rel in posets:
            evord = [(a, b) for a, b in itertools.combinations(events, 2)
                     if (a, b) not in rel and (b, a) not in rel]
            try:
                p = make_ipomset(events, ("a", "b", "a", "b"), rel, evord)
            except NotIntervalOrder:
                assert not interval_by_downsets(rel)
                rejected += 1
            else:
                assert interval_by_downsets(rel)
                assert p.precedence == rel
                accepted += 1
        assert accepted == 207
        assert rejected == 12

    def test_precedence_closure(self):
        p = make_ipomset("abc", "abc", [("a", "b"), ("b", "c")])
        assert ("a", "c") in p.precedence

    def test_precedence_cycle(self):
        with pytest.raises(PrecedenceCyclic) as e:
            make_ipomset("ab", "ab", [("a", "b"), ("b", "a")])
        assert "a" in e.value.cycle

    def test_two_plus_two_witness(self):
        with pytest.raises(NotIntervalOrder) as e:
            make_ipomset(
                "wxyz", "abab", [("w", "x"), ("y", "z")],
                [("w", "y"), ("w", "z"), ("y", "x"), ("x", "z")],
            )
        assert sorted(e.value.witness) == ["w", "x", "y", "z"]

    def test_event_order_missing(self):
        with pytest.raises(EventOrderIncomplete) as e:
            make_ipomset("ab", "ab")
        assert set(e.value.pair) == {"a", "b"}

    def test_event_order_reflexive(self):
        with pytest.raises(EventOrderCyclic):
            make_ipomset("ab", "ab", event_order=[("a", "a"), ("a", "b")])

    def test_event_order_two_cycle(self):
        with pytest.raises(EventOrderCyclic):
            make_ipomset("ab", "ab", event_order=[("a", "b"), ("b", "a")])

    def test_event_order_three_cycle(self):
        with pytest.raises(EventOrderCyclic) as e:
            make_ipomset(
                "abc", "abc",
                event_order=[("a", "b"), ("b", "c"), ("c", "a")],
            )
        assert len(e.value.cycle) >= 2

    def test_event_order_on_comparable_pair_dropped(self):
        p = make_ipomset("ab", "ab", [("a", "b")], [("a", "b")])
        assert p.event_order == frozenset()

    def test_source_must_be_minimal(self):
        with pytest.raises(InterfaceNotExtremal) as e:
            make_ipomset("ab", "ab", [("a", "b")], sources="b")
        assert e.value.side == "source"
        assert e.value.event == "b"

    def test_target_must_be_maximal(self):
        with pytest.raises(InterfaceNotExtremal) as e:
            make_ipomset("ab", "ab", [("a", "b")], targets="a")
        assert e.value.side == "target"

    def test_unknown_names_rejected(self):
        with pytest.raises(ValidationError):
            make_ipomset("ab", "ab", [("a", "q")], [("a", "b")])
        with pytest.raises(ValidationError):
            make_ipomset("ab", "ab", event_order=[("a", "b")], sources="q")
        with pytest.raises(ValidationError):
            make_ipomset("aa", "ab")
        with pytest.raises(ValidationError):
            make_ipomset("ab", "abc")

    def test_validate_is_identity_on_valid(self):
        p = make_ipomset("ab", "ab", [("a", "b")])
        assert validate_ipomset(p) == p


# ---------------------------------------------------------------- letters


class TestLetters:
    def test_empty_subset_normalizes_to_identity(self):
        assert starter("ab", []) == idletter("ab")
        assert terminator("ab", []) == idletter("ab")
        assert idletter("ab").kind == "id"

    def test_subset_out_of_range(self):
        with pytest.raises(ValidationError):
            starter("ab", [2])
        with pytest.raises(ValidationError):
            terminator("a", [-1])

    def test_identity_with_subset_rejected(self):
        with pytest.raises(ValidationError):
            STLetter("id", Conclist(("a",)), frozenset({0}))

    def test_interfaces(self):
        s = starter("ab", [0])
        assert s.source == Conclist(("b",))
        assert s.target == Conclist(("a", "b"))
        t = terminator("ab", [1])
        assert t.source == Conclist(("a", "b"))
        assert t.target == Conclist(("a",))

    def test_str(self):
        assert str(starter("ab", [0])) == "st[+a b]"
        assert str(terminator("ab", [1])) == "tm[a -b]"
        assert str(idletter("ab")) == "id[a b]"
        assert str(Conclist(("a", "b"))) == "(a b)"

    def test_as_pomset_is_valid(self):
        for letter in (starter("ab", [0]), terminator("abc", [0, 2]),
                       idletter("ab"), idletter("")):
            p = letter.as_pomset()
            assert validate_ipomset(p) == p

    def test_as_pomset_matches_identity(self):
        assert idletter("ab").as_pomset() == identity_pomset(Conclist(("a", "b")))


# ------------------------------------------------------------------ gluing


def chain_overlap_left():
    # b is already running, a runs entirely inside b's lifetime
    return make_ipomset(
        ("a", "b"), ("a", "b"),
        event_order=[("a", "b")], sources=("b",), targets=("a",),
    )


def chain_overlap_right():
    return make_ipomset(
        ("a", "d", "c"), ("a", "d", "c"),
        precedence=[("a", "c")],
        event_order=[("a", "d"), ("c", "d")],
        sources=("a",), targets=("d",),
    )


class TestGlue:
    def test_known_composition(self):
        g = glue(chain_overlap_left(), chain_overlap_right())
        assert g.events == ("a", "b", "d", "c")
        assert g.labels == ("a", "b", "d", "c")
        assert g.precedence == frozenset({("b", "d"), ("a", "c"), ("b", "c")})
        assert g.event_order == frozenset({("a", "b"), ("a", "d"), ("c", "d")})
        assert g.sources == frozenset({"b"})
        assert g.targets == frozenset({"d"})

    def test_interface_mismatch(self):
        p = make_ipomset("a", "a", targets="a")
        q = make_ipomset("b", "b", sources="b")
        with pytest.raises(InterfaceMismatch):
            glue(p, q)

    def test_name_clash_renamed(self):
        p = make_ipomset("wx", "ab", [("w", "x")], targets="x")
        q = make_ipomset("xw", "bc", [("x", "w")], sources="x")
        g = glue(p, q)
        assert g.events == ("w", "x", "w'")
        assert g.labels == ("a", "b", "c")
        assert g.precedence == frozenset({("w", "x"), ("x", "w'"), ("w", "w'")})

    def test_identity_is_neutral(self):
        p = chain_overlap_right()
        left = glue(identity_pomset(p.source_conclist), p)
        right = glue(p, identity_pomset(p.target_conclist))
        assert is_isomorphic(left, p)
        assert is_isomorphic(right, p)

    def test_associative_on_letters(self):
        a = starter("ab", [0]).as_pomset()
        b = terminator("ab", [1]).as_pomset()
        c = starter("ac", [1]).as_pomset()
        assert is_isomorphic(glue(glue(a, b), c), glue(a, glue(b, c)))

    def test_matches_letter_fold(self):
        """Gluing a run letter by letter equals the one-pass gluing."""
        for src, letters, pom in enumerate_runs("ab", 3, 2):
            fold = functools.reduce(
                glue, (l.as_pomset() for l in letters), identity_pomset(src))
            assert iso_oracle(fold, pom)
            assert is_isomorphic(fold, pom)


# ------------------------------------------------------------ sparse steps


class TestSparseSteps:
    def test_known_decomposition(self):
        g = glue(chain_overlap_left(), chain_overlap_right())
        src, steps = st_decompose_sparse(g)
        assert src == Conclist(("b",))
        assert [str(s) for s in steps] == [
            "st[+a b]", "tm[a -b]", "st[a +d]",
            "tm[-a d]", "st[+c d]", "tm[-c d]",
        ]
        assert is_isomorphic(glue_st(steps, src), g)

    def test_interleaving_decomposition(self):
        p = make_ipomset(
            ("x", "y", "z", "w"), ("a", "b", "c", "a"),
            precedence=[("x", "z"), ("x", "w"), ("y", "w")],
            event_order=[("x", "y"), ("z", "y"), ("z", "w")],
            sources=(), targets=("w",),
        )
        src, steps = st_decompose_sparse(p)
        assert src == Conclist(())
        assert [str(s) for s in steps] == [
            "st[+a +b]", "tm[-a b]", "st[+c b]",
            "tm[c -b]", "st[c +a]", "tm[-c a]",
        ]
        assert dimension(p) == 2
        assert is_isomorphic(glue_st(steps, src), p)
        assert str(p) == "() | st[+a +b] tm[-a b] st[+c b] tm[c -b] st[c +a] tm[-c a]"

    def test_roundtrip_exhaustive(self):
        """Every run's pomset decomposes back to the generating sequence,
        the sequence alternates without identities, and regluing is exact."""
        count = 0
        for src, letters, pom in enumerate_runs("ab", 4, 3):
            count += 1
            assert st_decompose_sparse(pom) == (src, letters)
            for prev, cur in zip(letters, letters[1:]):
                assert prev.kind != cur.kind
            assert all(l.kind != "id" for l in letters)
            assert glue_st(letters, src, check=False) == pom
        assert count == 22905

    def test_class_counts(self):
        assert sum(1 for _ in enumerate_pomsets("ab", 3, 2)) == 761
        assert sum(1 for _ in enumerate_pomsets("ab", 4, 2)) == 6521
        assert sum(1 for _ in enumerate_pomsets("a", 4, 3)) == 1525
        assert sum(1 for _ in enumerate_pomsets("a", 1, 1)) == 5
        assert sum(1 for _ in enumerate_pomsets("a", 8, 1, limit=8)) == 33

    def test_canonical_forms_distinct(self):
        seen = set()
        for p in enumerate_pomsets("ab", 4, 2):
            assert p.canonical_form not in seen
            seen.add(p.canonical_form)
        assert len(seen) == 6521

    def test_canonical_pomset_is_stable(self):
        p = glue(chain_overlap_left(), chain_overlap_right())
        c = canonical_pomset(p)
        assert is_isomorphic(c, p)
        assert canonical_pomset(c) == c

    def test_dimension_is_max_antichain(self):
        for p in enumerate_pomsets("ab", 4, 3):
            assert dimension(p) == max_antichain(p)

    def test_glue_st_interface_mismatch(self):
        with pytest.raises(InterfaceMismatch):
            glue_st([starter("ab", [0]), terminator("b", [0])])

    def test_glue_st_empty(self):
        assert glue_st([]) == identity_pomset(Conclist(()))
        cl = Conclist(("a", "b"))
        assert glue_st([], cl) == identity_pomset(cl)


# ------------------------------------------------------------- subsumption


class TestSubsumption:
    def test_matches_oracle(self):
        groups = grouped_by_labels(universe_ab32())
        checked = 0
        for g in groups.values():
            for p in g:
                for q in g:
                    assert is_subsumed(p, q) == subsumed_oracle(p, q)
                    assert is_isomorphic(p, q) == iso_oracle(p, q)
                    checked += 1
        assert checked > 100

    def test_reflexive(self):
        for p in universe_ab32():
            assert is_subsumed(p, p)

    def test_antisymmetric_up_to_iso(self):
        groups = grouped_by_labels(universe_ab32())
        for g in groups.values():
            for p in g:
                for q in g:
                    if is_subsumed(p, q) and is_subsumed(q, p):
                        assert is_isomorphic(p, q)

    def test_sequential_refines_concurrent(self):
        conc = make_ipomset("xy", "ab", event_order=[("x", "y")])
        seq = make_ipomset("xy", "ab", [("x", "y")])
        assert is_subsumed(seq, conc)
        assert not is_subsumed(conc, seq)

    def test_interfaces_block_ordering(self):
        # a target event may not acquire successors, so x < y is the
        # only proper refinement of x || y when y is in the target
        p = make_ipomset("xy", "ab", event_order=[("x", "y")], targets="y")
        forms = {q.canonical_form for q in downward_closure(p)}
        seq = make_ipomset("xy", "ab", [("x", "y")], targets="y")
        assert seq.canonical_form in forms
        assert len(forms) == 2

    def test_downward_closure_matches_oracle(self):
        universe = universe_ab32()
        for p in universe:
            got = {x.canonical_form for x in downward_closure(p)}
            want = {q.canonical_form for q in universe if subsumed_oracle(q, p)}
            assert got == want
            assert p.canonical_form in got


# ------------------------------------------------------------ other pieces


class TestRemoveEvents:
    def test_removes_target_event(self):
        p = chain_overlap_right()
        q = remove_events(p, [0])
        assert q.events == ("a", "c")
        assert q.targets == frozenset()
        assert validate_ipomset(q) == q

    def test_position_must_exist(self):
        with pytest.raises(NotInTargetInterface):
            remove_events(chain_overlap_right(), [1])

    def test_empty_removal(self):
        p = chain_overlap_right()
        assert remove_events(p, []) == p


class TestBounds:
    def test_default_cap(self):
        with pytest.raises(BoundTooLarge):
            list(enumerate_pomsets("a", 9, 1))

    def test_explicit_limit_wins(self):
        assert sum(1 for _ in enumerate_pomsets("a", 8, 1, limit=8)) == 33

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("IPOMSET_MAX_EVENTS", "9")
        assert event_limit() == 9
        assert event_limit(3) == 3
        monkeypatch.delenv("IPOMSET_MAX_EVENTS")
        assert event_limit() == 7
