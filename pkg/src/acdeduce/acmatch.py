"""Restricted higher-order AC matching: is ``m =_AC C[T1..Tk]`` for an E-context
``C`` and ``Ti`` in a saturated set?

Sums are read as signed multisets of base terms (an inverse-headed summand
counts negatively), each sum node of ``m`` becomes a linear Diophantine system
over the candidate terms, and solved sums are then cut out of ``m`` largest
first.  Whatever is left must be free of E-aliens.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .rewrite import Theory, normalize
from .slde import DiophantineSystem, solve_n_bounded, solve_z
from .terms import (
    HOLE,
    App,
    Context,
    Position,
    Signature,
    Term,
    apply_context,
    is_e_alien,
    positions,
    subterm_at,
)

# a partial witness: raw context term (holes allowed) and its fillers in order
_Wit = Tuple[Term, Tuple[Term, ...]]


@dataclass(frozen=True)
class SumDecomposition:
    """``m = a1 m1 + ... + ar mr`` with signed multiplicities, zero entries dropped."""

    items: Tuple[Tuple[Term, int], ...]

    @classmethod
    def from_counts(cls, counts: Dict[Term, int]) -> "SumDecomposition":
        return cls(tuple(sorted(((t, n) for t, n in counts.items() if n), key=lambda p: p[0].key)))

    def as_dict(self) -> Dict[Term, int]:
        return dict(self.items)

    @property
    def bases(self) -> Tuple[Term, ...]:
        return tuple(t for t, _ in self.items)

    @property
    def support(self) -> frozenset:
        return frozenset(self.bases)

    def __bool__(self):
        return bool(self.items)


def _peel(t: Term, sig: Signature, ac: str) -> Tuple[Term, int]:
    inv = sig.symbol(ac).inverse
    if inv is not None and type(t) is App and t.head == inv:
        inner = t.args[0]
        if not (type(inner) is App and inner.head in (inv, ac)):
            return inner, -1
    return t, 1


def decompose_sum(t: Term, ac: str, sig: Signature) -> SumDecomposition:
    neutral = sig.symbol(ac).neutral
    args = t.args if type(t) is App and t.head == ac else (t,)
    counts: Counter = Counter()
    for a in args:
        if type(a) is App and a.head == neutral and not a.args:
            continue
        base, sign = _peel(a, sig, ac)
        counts[base] += sign
    return SumDecomposition.from_counts(counts)


def compose_sum(dec: SumDecomposition, ac: str, sig: Signature) -> Term:
    """Inverse of :func:`decompose_sum`; the empty sum is the neutral element
    (or the zero-argument ``ac`` application when the symbol has none)."""
    parts: List[Term] = []
    for base, n in dec.items:
        parts += [base if n > 0 else sig.inverse(ac, base)] * abs(n)
    if not parts:
        if sig.symbol(ac).neutral is None:
            return App(ac, ())
        return sig.neutral(ac)
    return sig.sum(ac, parts)


def do_acm_match(t_i: Term, m: Term, ac: str, sig: Signature) -> Optional[Term]:
    """Solve ``t_i + x =_AC m`` for ``x`` (single extension variable).

    The signed multiset of ``t_i`` must sit inside that of ``m`` with matching
    signs; the remainder is returned as a term.
    """
    tm = decompose_sum(m, ac, sig).as_dict()
    rest = dict(tm)
    for base, n in decompose_sum(t_i, ac, sig).items:
        have = tm.get(base, 0)
        if have * n <= 0 or abs(n) > abs(have):
            return None
        rest[base] = have - n
    return compose_sum(SumDecomposition.from_counts(rest), ac, sig)


def build_slde(target: SumDecomposition, candidates: Sequence[SumDecomposition],
               integer: bool = True) -> Tuple[DiophantineSystem, List[int]]:
    """One row per base term, one column per surviving candidate.

    Over the integers every non-empty candidate is kept and extra base terms
    get a target of 0 (they may cancel out).  Without inverses
    (``integer=False``) a candidate must be a sub-multiset of the target.
    Returns the system and the indices of the kept candidates.
    """
    tdict = target.as_dict()
    support = target.support
    kept = []
    for i, c in enumerate(candidates):
        if not c:
            continue
        if not integer and (not c.support <= support
                            or any(n < 0 or n > tdict[b] for b, n in c.items)):
            continue
        kept.append(i)
    bases = list(target.bases)
    if integer:
        extra = {b for i in kept for b in candidates[i].bases} - support
        bases += sorted(extra, key=lambda t: t.key)
    dicts = [candidates[i].as_dict() for i in kept]
    rows = tuple(tuple(d.get(base, 0) for d in dicts) for base in bases)
    sys = DiophantineSystem(rows, tuple(tdict.get(b, 0) for b in bases), len(kept))
    return sys, kept


@dataclass(frozen=True)
class MatchWitness:
    context: Context
    fillers: Tuple[Term, ...]

    def instantiate(self, sig: Signature) -> Term:
        return apply_context(self.context, self.fillers, sig)


@dataclass
class MatchStats:
    positions_scanned: int = 0
    slde_count: int = 0
    solved_sums: int = 0


def validate_witness(w: MatchWitness, m: Term, sat: Iterable[Term], th: Theory) -> bool:
    """Fillers come from ``sat``, the context is an E-context, and the filled
    context normalizes to ``m``'s normal form."""
    satset = set(sat)
    sig = th.signature
    if not all(f in satset for f in w.fillers):
        return False
    if not w.context.is_e_context(sig):
        return False
    try:
        filled = w.instantiate(sig)
    except ValueError:
        return False
    return normalize(filled, th) == normalize(m, th)


class _Matcher:
    def __init__(self, sat: Iterable[Term], th: Theory, stats: MatchStats,
                 decompositions: Optional[Dict] = None):
        self.th = th
        self.decs = {} if decompositions is None else decompositions
        self.sig = th.signature
        self.sat = frozenset(sat)
        self.stats = stats
        self.base: Dict[Term, _Wit] = {t: (HOLE, (t,)) for t in self.sat}

    # steps 2-4: cut out known terms largest first, then check the residue
    def mark(self, t: Term, table: Dict[Term, _Wit]) -> Optional[_Wit]:
        sig = self.sig
        occ: Dict[Term, List[Position]] = {}
        for p in positions(t):
            s = subterm_at(t, p)
            if s in table:
                occ.setdefault(s, []).append(p)
        self.stats.positions_scanned += len(occ)
        ranked = sorted(occ, key=lambda s: (-s.size, s.key))
        deleted: Dict[Position, Term] = {}
        for s in ranked:
            for q in occ[s]:
                if any(q[: len(d)] == d for d in deleted):
                    continue
                for k in range(len(q)):
                    anc = subterm_at(t, q[:k])
                    if sig.is_ac(anc.head):
                        return None
                deleted[q] = s
        if self._has_alien(t, (), deleted):
            return None
        return self._rebuild(t, (), deleted, table)

    def _has_alien(self, t: Term, p: Position, deleted) -> bool:
        if p in deleted:
            return False
        if is_e_alien(t, self.sig):
            return True
        if type(t) is App:
            return any(self._has_alien(a, p + (i,), deleted) for i, a in enumerate(t.args, 1))
        return False

    def _rebuild(self, t: Term, p: Position, deleted, table) -> _Wit:
        if p in deleted:
            return table[deleted[p]]
        if type(t) is not App:
            return t, ()
        ctx_args, fillers = [], []
        for i, a in enumerate(t.args, 1):
            c, f = self._rebuild(a, p + (i,), deleted, table)
            ctx_args.append(c)
            fillers.extend(f)
        return App(t.head, ctx_args), tuple(fillers)

    def _negate(self, term: Term, w: _Wit, ac: str) -> _Wit:
        inv_sym = self.sig.symbol(ac).inverse
        if term in self.sat:
            inv = normalize(App(inv_sym, (term,)), self.th)
            if inv in self.sat:
                return HOLE, (inv,)
        return App(inv_sym, (w[0],)), w[1]

    def decompose(self, t: Term, ac: str) -> SumDecomposition:
        d = self.decs.get((t, ac))
        if d is None:
            d = self.decs[(t, ac)] = decompose_sum(t, ac, self.sig)
        return d

    def solve_sum(self, node: Term, cands: Sequence[Tuple[Term, _Wit]],
                  ac: Optional[str] = None) -> Optional[_Wit]:
        sig = self.sig
        ac = ac or node.head
        sym = sig.symbol(ac)
        integer = sym.inverse is not None
        target = decompose_sum(node, ac, sig)
        decs = [self.decompose(t, ac) for t, _ in cands]
        system, kept = build_slde(target, decs, integer)
        self.stats.slde_count += 1
        if integer:
            beta = solve_z(system)
        else:
            beta = solve_n_bounded(system, max(system.targets, default=0))
        if beta is None:
            return None
        parts: List[_Wit] = []
        for b, i in zip(beta, kept):
            term, w = cands[i]
            if b > 0:
                parts += [w] * b
            elif b < 0:
                parts += [self._negate(term, w, ac)] * (-b)
        if not parts:
            return App(sym.neutral, ()), ()
        if len(parts) == 1:
            return parts[0]
        fillers: List[Term] = []
        for _, f in parts:
            fillers.extend(f)
        return App(ac, [c for c, _ in parts]), tuple(fillers)

    def run(self, m: Term) -> Optional[MatchWitness]:
        sig = self.sig
        solved: Dict[Term, _Wit] = {}
        groups = [s.name for s in sig.ac_symbols() if s.inverse is not None]
        order = sorted(positions(m), key=lambda p: (-len(p), p))
        for p in order:
            node = subterm_at(m, p)
            if node in self.base or node in solved:
                continue
            table = {**self.base, **solved}
            if not (type(node) is App and sig.is_ac(node.head)):
                # with inverses a single term may still be a cancelling sum
                if groups and (is_e_alien(node, sig) or (type(node) is App and node.args)):
                    for ac in groups:
                        w = self.solve_sum(node, list(table.items()), ac)
                        if w is not None:
                            self.stats.solved_sums += 1
                            solved[node] = w
                            break
                continue
            args_solved: Dict[Term, _Wit] = {}
            for n in dict.fromkeys(node.args):
                if n in table:
                    continue
                w = self.mark(n, table)
                if w is not None:
                    args_solved[n] = w
            cands = list(table.items()) + list(args_solved.items())
            w = self.solve_sum(node, cands)
            if w is not None:
                self.stats.solved_sums += 1
                solved.update(args_solved)
                solved[node] = w
        final = self.mark(m, {**self.base, **solved})
        if final is None:
            return None
        return MatchWitness(Context(final[0]), final[1])


def context_match(m: Term, sat: Iterable[Term], th: Theory,
                  stats: Optional[MatchStats] = None,
                  decompositions: Optional[Dict] = None) -> Optional[MatchWitness]:
    """Witness ``C, [T1..Tk]`` with ``C[T1..Tk]`` normalizing to ``m``, or ``None``.

    ``m`` must be ground and in normal form; ``sat`` should be a saturated set.
    ``decompositions`` is an optional cache of sum decompositions shared
    across calls with the same theory.
    """
    return _Matcher(sat, th, stats if stats is not None else MatchStats(),
                    decompositions).run(m)
