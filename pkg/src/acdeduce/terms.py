"""Term algebra: names, variables, applications, AC-canonical forms and contexts.

Terms are immutable and hash-consed by value (hash and order key are cached
on construction).  AC symbols are stored flattened and sorted, so two terms
are equal modulo AC exactly when their canonical forms are ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple

Position = Tuple[int, ...]
ROOT: Position = ()


class TermError(ValueError):
    pass


class InvalidPosition(TermError):
    pass


class ArityMismatch(TermError):
    pass


class Term:
    __slots__ = ()

    def __lt__(self, other: "Term") -> bool:
        return self.key < other.key  # type: ignore[attr-defined]


class Name(Term):
    __slots__ = ("id", "_hash", "key", "size")

    def __init__(self, id: str):
        self.id = id
        self._hash = hash(("name", id))
        self.key = (0, id)
        self.size = 1

    def __eq__(self, other):
        return self is other or (type(other) is Name and other.id == self.id)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Name({self.id!r})"


class Var(Term):
    __slots__ = ("id", "_hash", "key", "size")

    def __init__(self, id: str):
        self.id = id
        self._hash = hash(("var", id))
        self.key = (1, id)
        self.size = 1

    def __eq__(self, other):
        return self is other or (type(other) is Var and other.id == self.id)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.id!r})"


class Hole(Term):
    """The context hole marker; never part of a canonical ground term."""

    __slots__ = ()
    _hash = hash("hole")
    key = (3,)
    size = 1

    def __eq__(self, other):
        return type(other) is Hole

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "HOLE"


HOLE = Hole()


class App(Term):
    """Application ``head(args...)``.

    ``size`` follows the binary reading of flattened AC nodes, so it is filled
    in by :class:`Signature` when the node is built through it; raw ``App``
    construction counts one node per application.
    """

    __slots__ = ("head", "args", "_hash", "key", "size", "ground")

    def __init__(self, head: str, args: Sequence[Term] = (), size: Optional[int] = None):
        self.head = head
        self.args = tuple(args)
        self._hash = hash(("app", head, self.args))
        self.key = (2, head, tuple(a.key for a in self.args))
        if size is None:
            size = 1 + sum(a.size for a in self.args)
        self.size = size
        self.ground = all(
            (type(a) is Name) or (type(a) is App and a.ground) for a in self.args
        )

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is App
            and self._hash == other._hash
            and self.head == other.head
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.head!r}, {list(self.args)!r})"


def is_ground(t: Term) -> bool:
    if type(t) is Name:
        return True
    if type(t) is App:
        return t.ground
    return False


class SymbolKind(Enum):
    FREE = "eq"
    AC = "ac"
    INVERSE = "inverse"
    CONSTRUCTOR = "ctor"


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: SymbolKind
    inverse: Optional[str] = None
    neutral: Optional[str] = None
    inverse_of: Optional[str] = None

    @property
    def in_sigma_e(self) -> bool:
        return self.kind is not SymbolKind.CONSTRUCTOR


@dataclass(frozen=True)
class Signature:
    """Function symbols plus the public-name declarations of a knowledge file.

    Names that are not declared public are private.
    """

    symbols: Mapping[str, Symbol]
    public_names: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for sym in self.symbols.values():
            if sym.kind is SymbolKind.AC:
                if sym.arity != 2:
                    raise TermError(f"AC symbol {sym.name} must be binary")
                if sym.inverse is not None:
                    inv = self.symbols.get(sym.inverse)
                    if inv is None or inv.arity != 1 or inv.kind is not SymbolKind.INVERSE:
                        raise TermError(f"bad inverse declaration for {sym.name}")
                if sym.neutral is not None:
                    neu = self.symbols.get(sym.neutral)
                    if neu is None or neu.arity != 0 or not neu.in_sigma_e:
                        raise TermError(f"bad neutral declaration for {sym.name}")

    @property
    def ar_sigma(self) -> int:
        return max((s.arity for s in self.symbols.values()), default=0)

    def with_public(self, names: Iterable[str]) -> "Signature":
        return Signature(self.symbols, self.public_names | frozenset(names))

    def symbol(self, name: str) -> Symbol:
        try:
            return self.symbols[name]
        except KeyError:
            raise TermError(f"unknown symbol {name!r}") from None

    def is_ac(self, head: str) -> bool:
        s = self.symbols.get(head)
        return s is not None and s.kind is SymbolKind.AC

    def in_sigma_e(self, head: str) -> bool:
        s = self.symbols.get(head)
        return s is not None and s.in_sigma_e

    def ac_symbols(self) -> list:
        return [s for s in self.symbols.values() if s.kind is SymbolKind.AC]

    def constructors(self) -> list:
        return [s for s in self.symbols.values() if s.kind is SymbolKind.CONSTRUCTOR]

    def eq_symbols(self) -> list:
        return [s for s in self.symbols.values() if s.in_sigma_e]

    def is_public(self, t: Term) -> bool:
        return type(t) is Name and t.id in self.public_names

    # -- construction -------------------------------------------------

    def app(self, head: str, *args: Term) -> Term:
        """Build ``head(args)`` in canonical form (flattened and sorted for AC)."""
        if self.is_ac(head):
            flat = []
            for a in args:
                if type(a) is App and a.head == head:
                    flat.extend(a.args)
                else:
                    flat.append(a)
            if len(flat) == 1:
                return flat[0]
            if not flat:
                return self.neutral(head)
            flat.sort(key=_key)
            size = (len(flat) - 1) + sum(a.size for a in flat)
            return App(head, flat, size)
        return App(head, args)

    def sum(self, head: str, terms: Iterable[Term]) -> Term:
        return self.app(head, *terms)

    def neutral(self, head: str) -> Term:
        sym = self.symbol(head)
        if sym.neutral is None:
            raise TermError(f"AC symbol {head} has no neutral element")
        return App(sym.neutral, ())

    def inverse(self, head: str, t: Term) -> Term:
        sym = self.symbol(head)
        if sym.inverse is None:
            raise TermError(f"AC symbol {head} has no inverse")
        return App(sym.inverse, (t,))

    def canonicalize(self, t: Term) -> Term:
        if type(t) is App:
            return self.app(t.head, *(self.canonicalize(a) for a in t.args))
        return t


def _key(t: Term):
    return t.key


# -- size and positions --------------------------------------------------


def term_size(t: Term) -> int:
    """Size on the binary reading: a k-argument AC node counts k-1 operators."""
    return t.size


def to_binary(t: Term, sig: Signature) -> Term:
    """Right-nested binary reading of flattened AC nodes (not canonical)."""
    if type(t) is not App:
        return t
    args = [to_binary(a, sig) for a in t.args]
    if sig.is_ac(t.head) and len(args) > 2:
        acc = App(t.head, (args[-2], args[-1]))
        for a in reversed(args[:-2]):
            acc = App(t.head, (a, acc))
        return acc
    return App(t.head, args)


def positions(t: Term) -> list:
    """All positions of ``t`` in pre-order (left-to-right), 1-based child indices."""
    out = [ROOT]
    if type(t) is App:
        for i, a in enumerate(t.args, 1):
            out.extend((i,) + p for p in positions(a))
    return out


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if type(t) is not App or not 1 <= i <= len(t.args):
            raise InvalidPosition(f"position {p} not in term")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, u: Term, sig: Optional[Signature] = None) -> Term:
    """``t[u]_p``; canonicalized through ``sig`` when one is given."""
    if not p:
        return u
    if type(t) is not App or not 1 <= p[0] <= len(t.args):
        raise InvalidPosition(f"position {p} not in term")
    i = p[0] - 1
    new = t.args[i]
    args = list(t.args)
    args[i] = replace_at(new, p[1:], u, sig)
    if sig is not None:
        return sig.app(t.head, *args)
    return App(t.head, args)


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    if type(t) is App:
        for a in t.args:
            yield from iter_subterms(a)


def subterms(t: Term) -> set:
    """st(t) on the canonical representation (partial AC sums excluded)."""
    return set(iter_subterms(t))


def subterms_of(ts: Iterable[Term]) -> set:
    out = set()
    for t in ts:
        out.update(iter_subterms(t))
    return out


def variables(t: Term) -> set:
    return {s for s in iter_subterms(t) if type(s) is Var}


def ac_equal(s: Term, t: Term, sig: Signature) -> bool:
    return sig.canonicalize(s) == sig.canonicalize(t)


# -- E-aliens and E-factors -----------------------------------------------


def is_e_alien(t: Term, sig: Signature) -> bool:
    if type(t) is Name:
        return t.id not in sig.public_names
    if type(t) is App:
        return not sig.in_sigma_e(t.head)
    return False


def e_factors(t: Term, sig: Signature) -> set:
    out = set()
    for s in iter_subterms(t):
        if type(s) is App and sig.in_sigma_e(s.head):
            out.update(a for a in s.args if is_e_alien(a, sig))
    return out


# -- contexts -----------------------------------------------------------------


@dataclass(frozen=True)
class Context:
    """An E-context: a term whose leaves may be :data:`HOLE`."""

    term: Term

    @property
    def holes(self) -> list:
        return [p for p in positions(self.term) if subterm_at(self.term, p) == HOLE]

    @property
    def arity(self) -> int:
        return sum(1 for s in iter_subterms(self.term) if type(s) is Hole)

    def is_e_context(self, sig: Signature) -> bool:
        for s in iter_subterms(self.term):
            if type(s) is App and not sig.in_sigma_e(s.head):
                return False
            if type(s) is Name and s.id not in sig.public_names:
                return False
            if type(s) is Var:
                return False
        return True


def apply_context(c: Context, ts: Sequence[Term], sig: Signature) -> Term:
    """Fill holes left to right and canonicalize."""
    ts = list(ts)
    if len(ts) != c.arity:
        raise ArityMismatch(f"context has {c.arity} holes, got {len(ts)} terms")
    it = iter(ts)

    def fill(t: Term) -> Term:
        if type(t) is Hole:
            return next(it)
        if type(t) is App:
            return sig.app(t.head, *(fill(a) for a in t.args))
        return t

    return fill(c.term)
