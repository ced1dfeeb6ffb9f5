"""Derivations in the natural deduction system for equational intruder deduction.

Rules: ``id`` (the term is known), ``f_I`` (apply a Sigma_E symbol, including
nullary symbols and declared public names) and ``eq`` (replace the conclusion
by an E-equal term, checked by comparing normal forms).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from .rewrite import Theory, normalize
from .terms import App, Hole, Name, Term


@dataclass(frozen=True)
class Derivation:
    rule: str  # "id" | "f_I" | "eq"
    term: Term
    premises: Tuple["Derivation", ...] = ()

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def count(self) -> int:
        return 1 + sum(p.count() for p in self.premises)


def check_derivation(d: Derivation, gamma: Iterable[Term], th: Theory) -> bool:
    known = {normalize(g, th) for g in gamma}
    return _check(d, known, th, {})


def _check(d: Derivation, known, th: Theory, memo: Dict[int, bool]) -> bool:
    key = id(d)
    if key in memo:
        return memo[key]
    sig = th.signature
    ok = False
    if d.rule == "id":
        ok = not d.premises and (d.term in known or normalize(d.term, th) in known)
    elif d.rule == "f_I":
        t = d.term
        if type(t) is Name:
            ok = not d.premises and t.id in sig.public_names
        elif type(t) is App and sig.in_sigma_e(t.head):
            if sig.is_ac(t.head):
                # a flattened sum is the binary application to two partial sums
                ok = len(d.premises) == 2 and sig.app(
                    t.head, d.premises[0].term, d.premises[1].term) == t
            else:
                ok = len(d.premises) == len(t.args) and all(
                    p.term == a for p, a in zip(d.premises, t.args))
            ok = ok and all(_check(p, known, th, memo) for p in d.premises)
    elif d.rule == "eq":
        ok = (
            len(d.premises) == 1
            and normalize(d.term, th) == normalize(d.premises[0].term, th)
            and _check(d.premises[0], known, th, memo)
        )
    memo[key] = ok
    return ok


def derive_composite(t: Term, known: Dict[Term, Derivation], th: Theory) -> Derivation:
    """Build a derivation of ``t`` from derivations of its known pieces.

    ``t`` must be an E-term over the keys of ``known`` (public names and
    nullary symbols are introduced directly).
    """
    if t in known:
        return known[t]
    sig = th.signature
    if type(t) is Name:
        if t.id not in sig.public_names:
            raise ValueError(f"private name {t.id} is not known")
        return Derivation("f_I", t)
    if type(t) is not App or not sig.in_sigma_e(t.head):
        raise ValueError("term is not an E-composition of known terms")
    if sig.is_ac(t.head):
        args = list(t.args)
        acc = derive_composite(args[0], known, th)
        for a in args[1:]:
            right = derive_composite(a, known, th)
            acc = Derivation("f_I", sig.app(t.head, acc.term, right.term), (acc, right))
        return acc
    return Derivation("f_I", t, tuple(derive_composite(a, known, th) for a in t.args))


def derive_filled(ctx: Term, fillers: List[Derivation], th: Theory) -> Derivation:
    """Derivation of a context filled (left to right) with derived terms."""
    sig = th.signature
    it = iter(fillers)

    def go(c: Term) -> Derivation:
        if type(c) is Hole:
            return next(it)
        if type(c) is Name:
            return Derivation("f_I", c)
        subs = [go(a) for a in c.args]
        if sig.is_ac(c.head) and len(subs) > 2:
            acc = subs[0]
            for s in subs[1:]:
                acc = Derivation("f_I", sig.app(c.head, acc.term, s.term), (acc, s))
            return acc
        return Derivation("f_I", sig.app(c.head, *(s.term for s in subs)), tuple(subs))

    return go(ctx)


def sum_derivation(summands: List[Derivation], ac: str, th: Theory) -> Derivation:
    sig = th.signature
    acc = summands[0]
    for s in summands[1:]:
        acc = Derivation("f_I", sig.app(ac, acc.term, s.term), (acc, s))
    return acc
