"""Slow, independent reference checks used by ``fuzz`` and the test-suite.

Nothing here calls the matching or saturation code: linear systems are
searched by brute force, and E-context reachability is computed over the
free (abelian) model of a single AC symbol, where a term denotes a vector of
atom multiplicities.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from .rewrite import Theory, normalize
from .slde import DiophantineSystem
from .terms import App, Name, Term

Vector = FrozenSet[Tuple[Term, int]]


def brute_force_slde(sys: DiophantineSystem, bound: int, naturals: bool = False
                     ) -> Optional[Tuple[int, ...]]:
    """First solution with every entry in ``[-bound, bound]`` (or ``[0, bound]``)."""
    lo = 0 if naturals else -bound
    for beta in product(range(lo, bound + 1), repeat=sys.nvars):
        if sys.satisfied_by(beta):
            return beta
    return None


class GroupModel:
    """Vector semantics of a theory whose Sigma_E is one AC symbol, optionally
    with inverse and neutral, plus public names."""

    def __init__(self, th: Theory):
        sig = th.signature
        acs = sig.ac_symbols()
        if len(acs) != 1:
            raise ValueError("the vector model needs exactly one AC symbol")
        self.th = th
        self.ac = acs[0]
        others = {s.name for s in sig.eq_symbols()} - {self.ac.name, self.ac.inverse, self.ac.neutral}
        if others:
            raise ValueError(f"unsupported Sigma_E symbols {sorted(others)}")
        self.group = self.ac.inverse is not None

    def vector(self, t: Term) -> Vector:
        acc: Dict[Term, int] = {}
        self._eval(t, 1, acc)
        return frozenset((k, v) for k, v in acc.items() if v)

    def _eval(self, t: Term, sign: int, acc: Dict[Term, int]):
        if type(t) is App and t.head == self.ac.name:
            for a in t.args:
                self._eval(a, sign, acc)
        elif type(t) is App and t.head == self.ac.inverse:
            self._eval(t.args[0], -sign, acc)
        elif type(t) is App and t.head == self.ac.neutral and not t.args:
            pass
        else:
            # an atom: the normal form of an opaque term
            a = normalize(t, self.th) if type(t) is App else t
            acc[a] = acc.get(a, 0) + sign


def _add(u: Vector, w: Vector) -> Vector:
    acc = dict(u)
    for k, v in w:
        acc[k] = acc.get(k, 0) + v
    return frozenset((k, v) for k, v in acc.items() if v)


def _neg(u: Vector) -> Vector:
    return frozenset((k, -v) for k, v in u)


def _norm(u: Vector) -> int:
    return sum(abs(v) for _, v in u)


def context_reachable(m: Term, sat: Iterable[Term], th: Theory, max_size: int) -> bool:
    """Is ``m`` the value of some E-context of size <= ``max_size`` over ``sat``?

    Size counts symbols and holes (binary reading of sums).  Contexts of size
    ``n`` have at most ``(n + 1) // 2`` leaves, which bounds the norm of their
    value and prunes the search.
    """
    model = GroupModel(th)
    sig = th.signature
    leaves = {model.vector(s) for s in sat}
    leaves |= {model.vector(Name(n)) for n in sig.public_names}
    if model.ac.neutral is not None and model.group:
        leaves.add(frozenset())
    leaf_norm = max((_norm(v) for v in leaves), default=0)
    target = model.vector(m)

    levels = {1: frozenset(leaves)}

    def level(n: int) -> FrozenSet[Vector]:
        """All values of contexts of size exactly ``n`` (built bottom-up)."""
        if n in levels:
            return levels[n]
        out = set()
        if model.group:
            out |= {_neg(v) for v in level(n - 1)}
        for a in range(1, n - 1):
            b = n - 1 - a
            if a > b:
                break
            for u in level(a):
                for w in level(b):
                    out.add(_add(u, w))
        levels[n] = frozenset(out)
        return levels[n]

    @lru_cache(maxsize=None)
    def member(v: Vector, n: int) -> bool:
        if n < 1 or _norm(v) > leaf_norm * ((n + 1) // 2):
            return False
        if n == 1:
            return v in leaves
        if model.group and member(_neg(v), n - 1):
            return True
        for a in range(1, n - 1):
            b = n - 1 - a
            if a > b:
                break
            for u in level(a):
                if member(_add(v, _neg(u)), b):
                    return True
        return False

    return any(member(target, n) for n in range(1, max_size + 1))


def enumerate_small_terms(th: Theory, names: Sequence[str], max_size: int) -> list:
    """Normal forms of all Sigma_E terms of size <= ``max_size`` over ``names``."""
    sig = th.signature
    by_size: Dict[int, set] = {1: {Name(n) for n in names}}
    by_size[1] |= {App(s.name, ()) for s in sig.eq_symbols() if s.arity == 0}
    syms = [s for s in sig.eq_symbols() if s.arity > 0]
    for n in range(2, max_size + 1):
        level = set()
        for s in syms:
            if s.arity == 1:
                level |= {App(s.name, (x,)) for x in by_size[n - 1]}
            elif s.arity == 2:
                for a in range(1, n - 1):
                    for x in by_size[a]:
                        for y in by_size[n - 1 - a]:
                            level.add(sig.app(s.name, x, y))
        by_size[n] = level
    out = set()
    for terms in by_size.values():
        out |= {u for u in (normalize(t, th) for t in terms) if u.size <= max_size}
    return sorted(out, key=lambda t: (t.size, t.key))
