"""First-order formulas over pomsets: parsing, satisfaction, enumeration.

The core connectives are negation, conjunction, and existential
quantification over events, with atoms for labels, interface
membership, precedence, event order, and equality.  Everything else in
the concrete syntax is expanded at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

from .errors import FormulaSyntaxError, UnknownName, ValidationError
from .pomsets import IiPomset, canonical_pomset, enumerate_pomsets

__all__ = [
    "And",
    "Eq",
    "Exists",
    "Formula",
    "InSource",
    "InTarget",
    "Label",
    "Less",
    "Not",
    "Order",
    "builtin",
    "fo_language",
    "formula_labels",
    "free_vars",
    "parse_formula",
    "satisfies",
]


class Formula:
    """Base of the abstract syntax."""


def _wrap(phi: Formula) -> str:
    s = str(phi)
    if isinstance(phi, (Label, InSource, InTarget, Less, Order, Eq)):
        return s
    return f"({s})"


@dataclass(frozen=True)
class Label(Formula):
    label: str
    var: str

    def __str__(self) -> str:
        return f"{self.label}({self.var})"


@dataclass(frozen=True)
class InSource(Formula):
    var: str

    def __str__(self) -> str:
        return f"S({self.var})"


@dataclass(frozen=True)
class InTarget(Formula):
    var: str

    def __str__(self) -> str:
        return f"T({self.var})"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def __str__(self) -> str:
        return f"!{_wrap(self.body)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def __str__(self) -> str:
        return f"exists {self.var}. {self.body}"


@dataclass(frozen=True)
class Less(Formula):
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.left} < {self.right}"


@dataclass(frozen=True)
class Order(Formula):
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.left} ~> {self.right}"


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Label):
        return frozenset({phi.var})
    if isinstance(phi, (InSource, InTarget)):
        return frozenset({phi.var})
    if isinstance(phi, (Less, Order, Eq)):
        return frozenset({phi.left, phi.right})
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, And):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Exists):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def _all_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Exists):
        return _all_vars(phi.body) | {phi.var}
    if isinstance(phi, Not):
        return _all_vars(phi.body)
    if isinstance(phi, And):
        return _all_vars(phi.left) | _all_vars(phi.right)
    return free_vars(phi)


def formula_labels(phi: Formula) -> frozenset[str]:
    """Alphabet letters mentioned by label atoms."""
    if isinstance(phi, Label):
        return frozenset({phi.label})
    if isinstance(phi, Not):
        return formula_labels(phi.body)
    if isinstance(phi, And):
        return formula_labels(phi.left) | formula_labels(phi.right)
    if isinstance(phi, Exists):
        return formula_labels(phi.body)
    return frozenset()


def _rename(phi: Formula, table: Mapping[str, str]) -> Formula:
    """Substitute free variable names; new names must be capture-safe."""
    if isinstance(phi, Label):
        return Label(phi.label, table.get(phi.var, phi.var))
    if isinstance(phi, InSource):
        return InSource(table.get(phi.var, phi.var))
    if isinstance(phi, InTarget):
        return InTarget(table.get(phi.var, phi.var))
    if isinstance(phi, Less):
        return Less(table.get(phi.left, phi.left), table.get(phi.right, phi.right))
    if isinstance(phi, Order):
        return Order(table.get(phi.left, phi.left), table.get(phi.right, phi.right))
    if isinstance(phi, Eq):
        return Eq(table.get(phi.left, phi.left), table.get(phi.right, phi.right))
    if isinstance(phi, Not):
        return Not(_rename(phi.body, table))
    if isinstance(phi, And):
        return And(_rename(phi.left, table), _rename(phi.right, table))
    inner = {k: v for k, v in table.items() if k != phi.var}
    return Exists(phi.var, _rename(phi.body, inner))


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_TOKEN = re.compile(r"->|\|\||~>|[()!&|<=.]|[A-Za-z_][A-Za-z0-9_']*")
_KEYWORDS = frozenset({"exists", "forall", "true", "false"})


class _Parser:
    """Recursive descent over the concrete syntax.

    Implication is lowest and right-associative, then disjunction,
    conjunction, and prefix forms; quantifier bodies extend as far
    right as possible.
    """

    def __init__(self, text: str):
        self.toks: list[tuple[str | None, int]] = []
        i = 0
        while i < len(text):
            if text[i].isspace():
                i += 1
                continue
            m = _TOKEN.match(text, i)
            if m is None:
                raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i)
            self.toks.append((m.group(), i))
            i = m.end()
        self.toks.append((None, len(text)))
        self.i = 0
        self.counter = 0
        self.scope: list[str] = []

    def peek(self) -> str | None:
        return self.toks[self.i][0]

    def take(self) -> tuple[str | None, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, want: str) -> None:
        got, pos = self.take()
        if got != want:
            shown = "end of input" if got is None else repr(got)
            raise FormulaSyntaxError(f"expected {want!r}, found {shown}", pos)

    def ident(self, role: str) -> tuple[str, int]:
        got, pos = self.take()
        if got is None or not _IDENT.fullmatch(got):
            shown = "end of input" if got is None else repr(got)
            raise FormulaSyntaxError(f"expected a {role}, found {shown}", pos)
        if got in _KEYWORDS:
            raise FormulaSyntaxError(f"keyword {got!r} cannot be a {role}", pos)
        return got, pos

    def bound(self, role: str) -> str:
        var, pos = self.ident(role)
        if var not in self.scope:
            raise FormulaSyntaxError(f"unbound variable {var!r}", pos)
        return var

    def fresh(self, *used: Formula) -> str:
        avoid = frozenset().union(*(_all_vars(f) for f in used)) if used else frozenset()
        while True:
            self.counter += 1
            name = f"_q{self.counter}"
            if name not in avoid:
                return name

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            right = self.formula()
            return Not(And(left, Not(right)))
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            g = self.conjunction()
            f = Not(And(Not(f), Not(g)))
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("exists", "forall"):
            return self.quantifier()
        return self.atom()

    def quantifier(self) -> Formula:
        kind, _ = self.take()
        unique = False
        if kind == "exists" and self.peek() == "!":
            self.take()
            unique = True
        var, _ = self.ident("variable")
        self.expect(".")
        self.scope.append(var)
        body = self.formula()
        self.scope.pop()
        if kind == "forall":
            return Not(Exists(var, Not(body)))
        if not unique:
            return Exists(var, body)
        other = self.fresh(body)
        twin = _rename(body, {var: other})
        no_second = Not(Exists(other, And(twin, Not(Eq(other, var)))))
        return Exists(var, And(body, no_second))

    def atom(self) -> Formula:
        tok, pos = self.take()
        if tok == "(":
            f = self.formula()
            self.expect(")")
            return f
        if tok == "true":
            v = self.fresh()
            return Not(Exists(v, Not(Eq(v, v))))
        if tok == "false":
            v = self.fresh()
            return Exists(v, Not(Eq(v, v)))
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", pos)
        if not _IDENT.fullmatch(tok) or tok in _KEYWORDS:
            raise FormulaSyntaxError(f"unexpected {tok!r}", pos)
        if self.peek() == "(":
            self.take()
            var, vpos = self.ident("variable")
            if var not in self.scope:
                raise FormulaSyntaxError(f"unbound variable {var!r}", vpos)
            self.expect(")")
            if tok == "S":
                return InSource(var)
            if tok == "T":
                return InTarget(var)
            return Label(tok, var)
        if tok not in self.scope:
            raise FormulaSyntaxError(f"unbound variable {tok!r}", pos)
        op, opos = self.take()
        if op not in ("<", "~>", "=", "||"):
            shown = "end of input" if op is None else repr(op)
            raise FormulaSyntaxError(f"expected a relation, found {shown}", opos)
        other = self.bound("variable")
        if op == "<":
            return Less(tok, other)
        if op == "~>":
            return Order(tok, other)
        if op == "=":
            return Eq(tok, other)
        return And(And(Not(Less(tok, other)), Not(Less(other, tok))),
                   Not(Eq(tok, other)))


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    tok, pos = p.toks[p.i]
    if tok is not None:
        raise FormulaSyntaxError(f"unexpected trailing {tok!r}", pos)
    return f


_Check = Callable[[IiPomset, list], bool]


def _compile(phi: Formula, slots: Mapping[str, int], depth: int) -> _Check:
    if isinstance(phi, Label):
        i, a = slots[phi.var], phi.label
        return lambda p, env: p.label_of[env[i]] == a
    if isinstance(phi, InSource):
        i = slots[phi.var]
        return lambda p, env: env[i] in p.sources
    if isinstance(phi, InTarget):
        i = slots[phi.var]
        return lambda p, env: env[i] in p.targets
    if isinstance(phi, Less):
        i, j = slots[phi.left], slots[phi.right]
        return lambda p, env: (env[i], env[j]) in p.precedence
    if isinstance(phi, Order):
        i, j = slots[phi.left], slots[phi.right]
        return lambda p, env: (env[i], env[j]) in p.event_order
    if isinstance(phi, Eq):
        i, j = slots[phi.left], slots[phi.right]
        return lambda p, env: env[i] == env[j]
    if isinstance(phi, Not):
        f = _compile(phi.body, slots, depth)
        return lambda p, env: not f(p, env)
    if isinstance(phi, And):
        f = _compile(phi.left, slots, depth)
        g = _compile(phi.right, slots, depth)
        return lambda p, env: f(p, env) and g(p, env)
    if isinstance(phi, Exists):
        d = depth
        f = _compile(phi.body, {**slots, phi.var: d}, depth + 1)

        def run(p: IiPomset, env: list) -> bool:
            for ev in p.events:
                env[d] = ev
                if f(p, env):
                    return True
            return False

        return run
    raise TypeError(f"not a formula: {phi!r}")


def _nesting(phi: Formula) -> int:
    if isinstance(phi, Exists):
        return 1 + _nesting(phi.body)
    if isinstance(phi, Not):
        return _nesting(phi.body)
    if isinstance(phi, And):
        return max(_nesting(phi.left), _nesting(phi.right))
    return 0


@lru_cache(maxsize=None)
def _compiled(phi: Formula) -> tuple[_Check, int]:
    fv = free_vars(phi)
    if fv:
        raise ValidationError(
            f"formula has free variables: {', '.join(sorted(fv))}")
    return _compile(phi, {}, 0), _nesting(phi)


def satisfies(p: IiPomset, phi: Formula) -> bool:
    """Whether the closed formula holds in the pomset.

    Quantifiers range over the events, so on the empty pomset every
    existential is false and every universal true.
    """
    fn, depth = _compiled(phi)
    return fn(p, [None] * depth)


def fo_language(
    phi: Formula,
    max_events: int,
    max_dim: int,
    alphabet: tuple[str, ...] | None = None,
    *,
    limit: int | None = None,
) -> frozenset[IiPomset]:
    """Canonical models within the bounds.

    The universe ranges over the letters mentioned by the formula
    unless an explicit alphabet is given; limit lifts the enumeration
    safety cap as in enumerate_pomsets.
    """
    if alphabet is None:
        alphabet = tuple(sorted(formula_labels(phi)))
    fn, depth = _compiled(phi)
    env = [None] * depth
    out = set()
    for p in enumerate_pomsets(alphabet, max_events, max_dim, limit=limit):
        if fn(p, env):
            out.add(canonical_pomset(p))
    return frozenset(out)


_PROP31 = "forall x. a(x) & exists! y. x || y"

_APART = "(forall z. z = x | z = y | z = y' | z < x | x < z)"

_P2N = f"""forall x. a(x) & !S(x) & !T(x) & (
      (exists y. exists y'. !(y = y') & y ~> x & y' ~> x & {_APART})
    | (exists y. exists y'. !(y = y') & x ~> y & x ~> y' & {_APART})
    | (exists y. x ~> y & (forall z. z = x | z = y | x < z))
    | (exists y. y ~> x & (forall z. z = x | z = y | z < x)))"""

_COMPLEMENT_P2N = f"(forall x. !S(x) & !T(x)) & !({_P2N})"

_BUILTINS = {
    "prop31": _PROP31,
    "p2n_family": _P2N,
    "complement_p2n": _COMPLEMENT_P2N,
}


def builtin(name: str) -> Formula:
    """A named formula from the bundled collection.

    prop31 defines even ladders of parallel letter pairs; p2n_family
    defines the alternating zigzags of even width; complement_p2n is
    everything else with empty interfaces.
    """
    text = _BUILTINS.get(name)
    if text is None:
        known = ", ".join(sorted(_BUILTINS))
        raise UnknownName(f"no builtin formula {name!r} (have: {known})")
    return parse_formula(text)
