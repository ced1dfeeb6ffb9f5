"""Saturated sets ``sat(G)`` for locally stable theories (with inverses).

Two closure strategies share one fixpoint engine:

``group``
    the abelian-group closure: known terms, e, composition of known
    subterms, inverses ``i(M)``, and ``(Mi + Mj)`` whenever the sum cancels
    through ``x + i(x) -> e``.
``generic``
    the same, except that the cancellation step is replaced by head-rewriting
    every small E-context (``|C| <= c_E``) filled with bounded sums of known
    terms.

A rewrite result is added when a pairwise cancellation makes it smaller than
the larger of its two parents, or when it cannot already be rebuilt from the current set by
:func:`~acdeduce.acmatch.context_match`.  Without that guard the group closure
of e.g. ``{a+a+b, a+b+b}`` never stops; without the size exception small
results such as ``b`` from ``{a, a+b}`` would only be reachable through large
contexts.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .acmatch import context_match, decompose_sum
from .natded import Derivation, check_derivation, derive_filled, sum_derivation
from .rewrite import RewriteRule, Theory, head_rewrite_steps, is_normal, normalize
from .terms import HOLE, App, Hole, Name, Signature, Term, Var, iter_subterms, subterms_of

DEFAULT_BUDGET = 10_000


class SaturationBudgetExceeded(RuntimeError):
    def __init__(self, message: str, partial: "SaturatedSet"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class TraceEntry:
    """Why a term entered the set.

    ``rule`` is one of ``gamma``, ``neutral``, ``compose``, ``inverse``,
    ``cancel`` or ``head``.  For ``head`` entries ``context`` is the small
    context and ``fillers`` holds, per hole, the summands of its sum filler.
    """

    rule: str
    parents: Tuple[Term, ...] = ()
    context: Optional[Term] = None
    fillers: Tuple[Tuple[Term, ...], ...] = ()
    ac: Optional[str] = None


@dataclass
class SaturatedSet:
    terms: frozenset
    gamma: Tuple[Term, ...]
    theory_name: str
    trace: Dict[Term, TraceEntry]
    strategy: str = "group"

    def __contains__(self, t: Term) -> bool:
        return t in self.terms

    def __iter__(self):
        return iter(self.trace)

    def __len__(self):
        return len(self.terms)

    def derivation(self, t: Term, th: Theory) -> Derivation:
        memo: Dict[Term, Derivation] = {}
        return self._derive(t, th, memo)

    def _derive(self, t: Term, th: Theory, memo: Dict[Term, Derivation]) -> Derivation:
        if t in memo:
            return memo[t]
        sig = th.signature
        e = self.trace[t]
        known = {p: self._derive(p, th, memo) for p in e.parents}
        if e.rule == "gamma":
            d = Derivation("id", t)
        elif e.rule == "neutral":
            d = Derivation("f_I", t)
        elif e.rule == "compose":
            if type(t) is App and sig.is_ac(t.head):
                d = sum_derivation([known[p] for p in e.parents], t.head, th)
            else:
                d = Derivation("f_I", t, tuple(known[a] for a in t.args))
        elif e.rule == "inverse":
            (m,) = e.parents
            inv = sig.symbol(e.ac).inverse
            d = _eq(t, Derivation("f_I", App(inv, (m,)), (known[m],)))
        elif e.rule == "cancel":
            u, v = e.parents
            d = _eq(t, Derivation("f_I", sig.app(e.ac, u, v), (known[u], known[v])))
        elif e.rule == "head":
            subs = [sum_derivation([known[x] for x in f], e.ac, th) for f in e.fillers]
            d = _eq(t, derive_filled(e.context, subs, th))
        else:  # pragma: no cover - trace entries are produced here only
            raise ValueError(f"unknown trace rule {e.rule}")
        memo[t] = d
        return d


def _eq(t: Term, d: Derivation) -> Derivation:
    return d if d.term == t else Derivation("eq", t, (d,))


# -- small contexts -------------------------------------------------------------


def small_contexts(sig: Signature, max_size: int, max_holes: int = 2) -> List[Term]:
    """E-contexts with at least one hole and binary-reading size <= ``max_size``.

    Contexts are returned canonicalized (holes are interchangeable).
    """
    leaves: List[Term] = [HOLE] + [App(s.name, ()) for s in sig.eq_symbols() if s.arity == 0]
    by_size: Dict[int, set] = {1: set(leaves)}
    syms = [s for s in sig.eq_symbols() if s.arity > 0]
    for n in range(2, max_size + 1):
        level = set()
        for s in syms:
            for sizes in _compositions(n - 1, s.arity):
                for args in product(*(by_size.get(k, ()) for k in sizes)):
                    level.add(_canon_ctx(sig, s.name, args))
        by_size[n] = level
    out = []
    for n in sorted(by_size):
        for c in sorted(by_size[n], key=lambda t: t.key):
            holes = sum(1 for s in iter_subterms(c) if type(s) is Hole)
            if 1 <= holes <= max_holes and c.size <= max_size:
                out.append(c)
    return list(dict.fromkeys(out))


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _canon_ctx(sig: Signature, head: str, args) -> Term:
    if sig.is_ac(head):
        flat = []
        for a in args:
            if type(a) is App and a.head == head:
                flat.extend(a.args)
            else:
                flat.append(a)
        flat.sort(key=lambda t: t.key)
        return App(head, flat, (len(flat) - 1) + sum(a.size for a in flat))
    return App(head, args)


def fill_context(ctx: Term, fillers: Sequence[Term], sig: Signature) -> Term:
    it = iter(fillers)

    def go(c: Term) -> Term:
        if type(c) is Hole:
            return next(it)
        if type(c) is App:
            return sig.app(c.head, *(go(a) for a in c.args))
        return c

    return go(ctx)


# -- the fixpoint engine --------------------------------------------------------


class _Saturator:
    def __init__(self, gamma: Sequence[Term], th: Theory, budget: int, strategy: str,
                 max_summands: int, max_holes: int):
        self.th = th
        self.sig = th.signature
        self.budget = budget
        self.strategy = strategy
        self.max_summands = max_summands
        self.max_holes = max_holes
        self.gamma = tuple(dict.fromkeys(normalize(g, th) for g in gamma))
        self.trace: Dict[Term, TraceEntry] = {}
        self._expressible: set = set()
        self._seen: set = set()
        self._signs: Dict[Tuple[Term, str], Dict[Term, int]] = {}
        self._decs: Dict = {}
        self.agenda: List[Term] = []
        self.cancel_rules = {
            s.name: Theory(th.name, th.signature, tuple(
                r for r in th.rules if _is_cancellation(r, s.name, s.inverse)))
            for s in self.sig.ac_symbols() if s.inverse
        }

    def snapshot(self) -> SaturatedSet:
        return SaturatedSet(frozenset(self.trace), self.gamma, self.th.name, dict(self.trace),
                            self.strategy)

    def add(self, t: Term, entry: TraceEntry) -> bool:
        if t in self.trace:
            return False
        if len(self.trace) >= self.budget:
            raise SaturationBudgetExceeded(
                f"saturation exceeded {self.budget} terms; theory may not be locally stable here",
                self.snapshot())
        self.trace[t] = entry
        self.agenda.append(t)
        return True

    def expressible(self, t: Term) -> bool:
        # only positive answers are cached: the set grows, so they stay true
        if t in self.trace or t in self._expressible:
            return True
        if context_match(t, self.trace.keys(), self.th, decompositions=self._decs) is not None:
            self._expressible.add(t)
            return True
        return False

    def run(self) -> SaturatedSet:
        for g in self.gamma:
            self.add(g, TraceEntry("gamma"))
        for s in self.sig.ac_symbols():
            if s.neutral is not None and s.inverse is not None:
                self.add(App(s.neutral, ()), TraceEntry("neutral"))
        done: List[Term] = []
        while True:
            while self.agenda:
                t = self.agenda.pop(0)
                done.append(t)
                self.close_inverse(t)
                if self.strategy == "group":
                    for u in list(done):
                        self.cancel_pair(t, u)
            if self.close_composition():
                continue
            if self.strategy == "generic" and self.close_head_rewrites():
                continue
            break
        return self.snapshot()

    def close_inverse(self, t: Term):
        for s in self.sig.ac_symbols():
            if s.inverse is not None:
                self.add(normalize(App(s.inverse, (t,)), self.th),
                         TraceEntry("inverse", (t,), ac=s.name))

    def signs(self, t: Term, ac: str) -> Dict[Term, int]:
        key = (t, ac)
        d = self._signs.get(key)
        if d is None:
            d = self._decs.get(key)
            if d is None:
                d = self._decs[key] = decompose_sum(t, ac, self.sig)
            d = self._signs[key] = d.as_dict()
        return d

    def cancel_pair(self, u: Term, v: Term):
        sig = self.sig
        for ac, cancel_th in self.cancel_rules.items():
            if not cancel_th.rules:
                continue
            # on normal forms a cancelling redex is a base with opposite signs
            du, dv = self.signs(u, ac), self.signs(v, ac)
            if len(du) > len(dv):
                du, dv = dv, du
            if not any(n * dv.get(b, 0) < 0 for b, n in du.items()):
                continue
            s = sig.app(ac, u, v)
            n = normalize(s, self.th)
            # shrinking results are kept so that small contexts stay enough
            if n.size < max(u.size, v.size) or not self.expressible(n):
                self.add(n, TraceEntry("cancel", (u, v), ac=ac))

    def close_composition(self) -> bool:
        sig = self.sig
        added = False
        for n in sorted(subterms_of(self.trace) - self.trace.keys(), key=lambda t: t.key):
            if type(n) is not App or not sig.in_sigma_e(n.head) or not n.args:
                continue
            if sig.is_ac(n.head):
                parts = _cover(Counter(n.args), n.head, list(self.trace), sig)
                if parts is not None and len(parts) >= 2:
                    added |= self.add(n, TraceEntry("compose", tuple(parts)))
            elif all(a in self.trace for a in n.args):
                added |= self.add(n, TraceEntry("compose", tuple(dict.fromkeys(n.args))))
        return added

    def sum_fillers(self, ac: str) -> List[Tuple[Term, ...]]:
        terms = sorted(self.trace, key=lambda t: t.key)
        out = []
        for k in range(1, self.max_summands + 1):
            out.extend(combinations_with_replacement(terms, k))
        return out

    def close_head_rewrites(self) -> bool:
        sig = self.sig
        if not self.th.rules:
            return False
        heads = {r.lhs.head for r in self.th.rules if type(r.lhs) is App}
        contexts = [c for c in small_contexts(sig, self.th.c_e, self.max_holes)
                    if type(c) is App and (c.head in heads or sig.is_ac(c.head))]
        added = False
        seen = self._seen
        for s in sig.ac_symbols():
            fillers = self.sum_fillers(s.name)
            for ctx in contexts:
                h = sum(1 for x in iter_subterms(ctx) if type(x) is Hole)
                for combo in product(fillers, repeat=h):
                    filled = fill_context(ctx, [sig.sum(s.name, f) for f in combo], sig)
                    if filled in seen:
                        continue
                    seen.add(filled)
                    # the shape of a group cancellation: _ + _ over two set terms
                    pairwise = (all(len(f) == 1 for f in combo) and sig.is_ac(ctx.head)
                                and all(type(a) is Hole for a in ctx.args))
                    biggest = max(f[0].size for f in combo) if pairwise else 0
                    for u in head_rewrite_steps(filled, self.th):
                        n = normalize(u, self.th)
                        if n.size < biggest or not self.expressible(n):
                            added |= self.add(n, TraceEntry(
                                "head", tuple(dict.fromkeys(x for f in combo for x in f)),
                                ctx, tuple(combo), s.name))
        return added


def _is_cancellation(rule: RewriteRule, ac: str, inv: str) -> bool:
    """Whether ``rule`` is ``x + inv(x) -> e`` for the AC symbol ``ac``."""
    l = rule.lhs
    if type(l) is not App or l.head != ac or len(l.args) != 2:
        return False
    a, b = l.args
    for x, y in ((a, b), (b, a)):
        if type(x) is Var and type(y) is App and y.head == inv and y.args == (x,):
            return True
    return False


def _summands(t: Term, ac: str) -> List[Term]:
    return list(t.args) if type(t) is App and t.head == ac else [t]


def _cover(need: Counter, ac: str, pool: List[Term], sig: Signature) -> Optional[List[Term]]:
    """Split the multiset ``need`` into summand-multisets of terms from ``pool``."""
    if not +need:
        return []
    first = min((t for t, n in need.items() if n > 0), key=lambda t: t.key)
    for t in pool:
        parts = Counter(_summands(t, ac))
        if parts[first] == 0 or any(need[k] < v for k, v in parts.items()):
            continue
        rest = _cover(need - parts, ac, pool, sig)
        if rest is not None:
            return [t] + rest
    return None


def saturate(gamma: Iterable[Term], th: Theory, budget: int = DEFAULT_BUDGET,
             strategy: Optional[str] = None, max_summands: int = 2, max_holes: int = 2
             ) -> SaturatedSet:
    """Least fixpoint of the closure rules starting from ``gamma`` (normalized).

    ``strategy`` defaults to the theory's declared one.  Raises
    :class:`SaturationBudgetExceeded` (carrying the partial set) when more
    than ``budget`` terms would be added.
    """
    strategy = strategy or th.saturation
    if strategy not in ("group", "generic"):
        raise ValueError(f"unknown saturation strategy {strategy!r}")
    return _Saturator(list(gamma), th, budget, strategy, max_summands, max_holes).run()


# -- verification -----------------------------------------------------------------


@dataclass
class Violation:
    condition: int
    term: Term
    detail: str


@dataclass
class Report:
    c_e: int
    c_e_squared: int
    checked: Dict[int, int] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)
    max_context_size: int = 0
    assumptions: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


ASSUMPTIONS = [
    "condition 3 checked on sampled contexts |C| <= c_E with at most 2 holes",
    "sum fillers sampled with 1-2 summands drawn from the set",
    "re-expression accepted when the rebuilt context normalizes to the rewritten term",
    "|C'| counted with every hole-only sum block collapsed to one sum filler",
]


def collapsed_size(ctx: Term, sig: Signature) -> int:
    if type(ctx) is Hole:
        return 1
    if type(ctx) is not App:
        return 1
    if sig.is_ac(ctx.head) and all(type(a) is Hole for a in ctx.args):
        return 1
    return 1 + sum(collapsed_size(a, sig) for a in ctx.args) + (
        len(ctx.args) - 2 if sig.is_ac(ctx.head) and len(ctx.args) > 2 else 0)


def verify_conditions(sat: SaturatedSet, th: Theory, samples: int = 200, seed: int = 0) -> Report:
    sig = th.signature
    c_e = th.c_e
    rep = Report(c_e, c_e * c_e, assumptions=list(ASSUMPTIONS))
    terms = sat.terms

    def check(cond, ok, t, detail):
        rep.checked[cond] = rep.checked.get(cond, 0) + 1
        if not ok:
            rep.violations.append(Violation(cond, t, detail))

    for g in sat.gamma:
        check(1, g in terms, g, "known term missing")
    for s in sig.ac_symbols():
        if s.neutral is not None and s.inverse is not None:
            e = App(s.neutral, ())
            check(1, e in terms, e, "neutral element missing")

    for n in sorted(subterms_of(terms) - terms, key=lambda t: t.key):
        if type(n) is not App or not sig.in_sigma_e(n.head) or not n.args:
            continue
        if sig.is_ac(n.head):
            parts = _cover(Counter(n.args), n.head, sorted(terms, key=lambda t: t.key), sig)
            bad = parts is not None and len(parts) >= 2
        else:
            bad = all(a in terms for a in n.args)
        check(2, not bad, n, "composable subterm not in the set")

    for t in terms:
        check(4, is_normal(t, th), t, "term not in normal form")
        for s in sig.ac_symbols():
            if s.inverse is not None:
                inv = normalize(App(s.inverse, (t,)), th)
                check(5, inv in terms, t, f"inverse {s.inverse}(.) normal form missing")
        try:
            d = sat.derivation(t, th)
            ok = d.term == t and check_derivation(d, sat.gamma, th)
        except (KeyError, ValueError, StopIteration):
            ok = False
        check(6, ok, t, "stored derivation does not replay")

    if th.rules and samples > 0:
        rng = random.Random(seed)
        contexts = [c for c in small_contexts(sig, c_e, 2) if type(c) is App]
        pool = sorted(terms, key=lambda t: t.key)
        acs = sig.ac_symbols()
        for _ in range(samples):
            ctx = rng.choice(contexts)
            ac = rng.choice(acs).name
            h = sum(1 for x in iter_subterms(ctx) if type(x) is Hole)
            fillers = []
            for _ in range(h):
                k = rng.randint(1, 2)
                fillers.append(sig.sum(ac, [rng.choice(pool) for _ in range(k)]))
            filled = fill_context(ctx, fillers, sig)
            for m in sorted(head_rewrite_steps(filled, th), key=lambda t: t.key):
                n = normalize(m, th)
                w = context_match(n, terms, th)
                if w is None:
                    check(3, False, n, "head-rewrite result cannot be rebuilt from the set")
                    continue
                size = collapsed_size(w.context.term, sig)
                rep.max_context_size = max(rep.max_context_size, size)
                check(3, size <= c_e * c_e, n, f"rebuilding context has size {size}")
    return rep
