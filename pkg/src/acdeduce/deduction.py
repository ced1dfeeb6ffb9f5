"""Deciding intruder deduction ``G |- M`` and the elementary problem (EDP).

``G |- M`` holds iff ``M`` (normalized) is an E-context over ``sat(G)``; the
decision is a context match against the saturated set.  :func:`oracle_derive`
is an independent, exponential check by bounded derivation search.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Optional, Tuple

from .acmatch import MatchStats, MatchWitness, context_match
from .natded import Derivation, derive_filled
from .rewrite import Theory, normalize
from .saturation import DEFAULT_BUDGET, SaturatedSet, saturate
from .terms import App, Context, Name, Signature, Term, is_ground


@dataclass
class Decision:
    deducible: bool
    witness: Optional[MatchWitness]
    sat_size: int
    stats: MatchStats = field(default_factory=MatchStats)
    goal: Optional[Term] = None
    saturated: Optional[SaturatedSet] = None
    normalized_inputs: int = 0
    millis: float = 0.0

    def derivation(self, th: Theory) -> Derivation:
        """A System-N derivation of the goal built from the witness."""
        if not self.deducible:
            raise ValueError("goal is not deducible")
        memo: Dict[Term, Derivation] = {}
        subs = [self.saturated._derive(f, th, memo) for f in self.witness.fillers]
        d = derive_filled(self.witness.context.term, subs, th)
        return d if d.term == self.goal else Derivation("eq", self.goal, (d,))


class SaturationCache:
    """Per-theory ``sat(G)`` cache keyed by the normalized ``G``.

    Reads are lock-free; insertion happens under a lock, first writer wins.
    """

    def __init__(self):
        self._data: Dict[Tuple[int, frozenset, int], SaturatedSet] = {}
        self._lock = threading.Lock()

    def get(self, gamma: Iterable[Term], th: Theory, budget: int = DEFAULT_BUDGET) -> SaturatedSet:
        key = (id(th), frozenset(gamma), budget)
        hit = self._data.get(key)
        if hit is not None:
            return hit
        sat = saturate(key[1], th, budget)
        with self._lock:
            return self._data.setdefault(key, sat)

    def __len__(self):
        return len(self._data)


def _front_door(gamma: Iterable[Term], m: Term, th: Theory):
    gamma = list(gamma)
    for t in gamma + [m]:
        if not is_ground(t):
            raise ValueError("deduction inputs must be ground")
    g = [normalize(t, th) for t in gamma]
    mn = normalize(m, th)
    changed = sum(a != b for a, b in zip(gamma, g)) + (m != mn)
    return g, mn, changed


def decide_idp(gamma: Iterable[Term], m: Term, th: Theory, budget: int = DEFAULT_BUDGET,
               cache: Optional[SaturationCache] = None) -> Decision:
    """Is ``m`` deducible from ``gamma``?  Raises ``SaturationBudgetExceeded``."""
    start = time.perf_counter()
    g, mn, changed = _front_door(gamma, m, th)
    sat = cache.get(g, th, budget) if cache is not None else saturate(g, th, budget)
    stats = MatchStats()
    w = context_match(mn, sat.terms, th, stats)
    return Decision(w is not None, w, len(sat), stats, mn, sat, changed,
                    (time.perf_counter() - start) * 1000)


# -- EDP: constructor-headed subterms become opaque atoms ---------------------


class _Abstraction:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.fwd: Dict[Term, Name] = {}
        self.back: Dict[Name, Term] = {}

    def atom(self, t: Term) -> Term:
        a = self.fwd.get(t)
        if a is None:
            a = Name(f"#{len(self.fwd)}")
            self.fwd[t] = a
            self.back[a] = t
        return a

    def down(self, t: Term) -> Term:
        if type(t) is not App:
            return t
        if not self.sig.in_sigma_e(t.head):
            return self.atom(t)
        return self.sig.app(t.head, *(self.down(a) for a in t.args))

    def up(self, t: Term) -> Term:
        if type(t) is Name:
            return self.back.get(t, t)
        if type(t) is not App:
            return t
        return App(t.head, tuple(self.up(a) for a in t.args)) if t.args else t


def decide_edp(gamma: Iterable[Term], m: Term, th: Theory, budget: int = DEFAULT_BUDGET,
               cache: Optional[SaturationCache] = None) -> Decision:
    """Is ``m`` an E-context over ``gamma`` modulo E?

    Maximal subterms headed outside Sigma_E are frozen into fresh private
    atoms first, so the E-layer treats them as constants; the witness fillers
    are translated back.
    """
    start = time.perf_counter()
    g, mn, changed = _front_door(gamma, m, th)
    ab = _Abstraction(th.signature)
    ga = [ab.down(t) for t in g]
    ma = ab.down(mn)
    sat = cache.get(ga, th, budget) if cache is not None else saturate(ga, th, budget)
    stats = MatchStats()
    w = context_match(ma, sat.terms, th, stats)
    if w is not None:
        sig = th.signature
        fillers = tuple(sig.canonicalize(ab.up(f)) for f in w.fillers)
        w = MatchWitness(Context(sig.canonicalize(ab.up(w.context.term))), fillers)
    return Decision(w is not None, w, len(sat), stats, mn, sat, changed,
                    (time.perf_counter() - start) * 1000)


# -- the System-N oracle ---------------------------------------------------------


def _level_one(gamma: Iterable[Term], th: Theory) -> set:
    sig = th.signature
    d = {normalize(t, th) for t in gamma}
    d |= {Name(n) for n in sig.public_names}
    d |= {normalize(App(s.name, ()), th) for s in sig.eq_symbols() if s.arity == 0}
    return d


def _apply_all(level: set, th: Theory) -> set:
    """Every ``f(args)`` normal form with ``f`` in Sigma_E and args in ``level``."""
    sig = th.signature
    items = sorted(level, key=lambda t: t.key)
    out = set(level)
    for s in sig.eq_symbols():
        if s.arity == 0:
            continue
        if s.arity == 1:
            for x in items:
                out.add(normalize(App(s.name, (x,)), th))
        elif s.arity == 2 and sig.is_ac(s.name):
            for i, x in enumerate(items):
                for y in items[i:]:
                    out.add(normalize(sig.app(s.name, x, y), th))
        else:
            for args in product(items, repeat=s.arity):
                out.add(normalize(sig.app(s.name, *args), th))
    return out


def oracle_levels(gamma: Iterable[Term], th: Theory, depth: int) -> List[set]:
    """``levels[k]`` holds the normal forms with a derivation of height <= k+1.

    The ``eq`` rule is folded into every step by storing normal forms only.
    """
    levels = [_level_one(gamma, th)]
    for _ in range(depth - 1):
        levels.append(_apply_all(levels[-1], th))
    return levels


def in_next_level(m: Term, level: set, th: Theory) -> bool:
    """Whether ``m`` (normal) is in ``_apply_all(level)`` without building it.

    For an AC symbol with an inverse, ``m = x + y`` with ``x`` in the level iff
    ``m + i(x)`` normalizes into the level; other symbols are enumerated.
    """
    if m in level:
        return True
    sig = th.signature
    items = sorted(level, key=lambda t: t.key)
    for s in sig.eq_symbols():
        if s.arity == 0:
            continue
        if sig.is_ac(s.name) and s.inverse is not None:
            for x in items:
                if normalize(sig.app(s.name, m, App(s.inverse, (x,))), th) in level:
                    return True
        elif s.arity == 1:
            if any(normalize(App(s.name, (x,)), th) == m for x in items):
                return True
        else:
            for args in product(items, repeat=s.arity):
                if normalize(sig.app(s.name, *args), th) == m:
                    return True
    return False


def oracle_derive(gamma: Iterable[Term], m: Term, th: Theory, depth: int,
                  levels: Optional[List[set]] = None) -> bool:
    """Bounded search for a System-N derivation of height <= ``depth``.

    Pass precomputed ``levels`` (from :func:`oracle_levels` with ``depth-1``)
    to reuse them across goals.
    """
    if depth < 1:
        return False
    mn = normalize(m, th)
    if levels is None:
        levels = oracle_levels(gamma, th, depth - 1) if depth > 1 else []
    if depth == 1:
        return mn in _level_one(gamma, th)
    return in_next_level(mn, levels[depth - 2], th)
