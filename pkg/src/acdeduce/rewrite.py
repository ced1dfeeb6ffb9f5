"""Rewriting modulo AC: matching, normalization, head rewriting and ``c_E``."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .parse import ParseError, parse_term
from .terms import (
    App,
    Name,
    Signature,
    Symbol,
    SymbolKind,
    Term,
    TermError,
    Var,
    iter_subterms,
    variables,
)

Substitution = Dict[str, Term]

DEFAULT_STEP_BUDGET = 100_000


class StepBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if type(self.lhs) is Var:
            raise TermError("rule left-hand side must not be a variable")
        if not variables(self.rhs) <= variables(self.lhs):
            raise TermError("rule right-hand side has variables not in the left-hand side")


@dataclass
class Theory:
    """Signature plus an AC-convergent rule set (convergence is trusted)."""

    name: str
    signature: Signature
    rules: Tuple[RewriteRule, ...] = ()
    saturation: str = "generic"
    step_budget: int = DEFAULT_STEP_BUDGET
    _nf: Dict[Term, Term] = field(default_factory=dict, repr=False, compare=False)

    @property
    def c_e(self) -> int:
        return compute_c_e(self)

    def with_signature(self, sig: Signature) -> "Theory":
        # normal forms do not depend on name visibility, so the cache is shared
        return Theory(self.name, sig, self.rules, self.saturation, self.step_budget, self._nf)

    def has_constructors(self) -> bool:
        return bool(self.signature.constructors())


def compute_c_e(th: Theory) -> int:
    sizes = [th.signature.ar_sigma + 1]
    for r in th.rules:
        sizes += [r.lhs.size, r.rhs.size]
    return max(sizes)


# -- substitution and matching ----------------------------------------------


def substitute(t: Term, sigma: Substitution, sig: Signature) -> Term:
    if type(t) is Var:
        return sigma[t.id]
    if type(t) is App:
        return sig.app(t.head, *(substitute(a, sigma, sig) for a in t.args))
    return t


def _summands(t: Term, head: str) -> List[Term]:
    if type(t) is App and t.head == head:
        return list(t.args)
    return [t]


def _sorted_keys(c: Counter) -> List[Term]:
    return sorted((k for k, v in c.items() if v > 0), key=lambda t: t.key)


def _sub_multisets(c: Counter, nonempty: bool) -> Iterator[Counter]:
    keys = _sorted_keys(c)
    for combo in product(*(range(c[k] + 1) for k in keys)):
        if nonempty and not any(combo):
            continue
        yield Counter({k: n for k, n in zip(keys, combo) if n})


def match(pattern: Term, subject: Term, sig: Signature, sigma: Optional[Substitution] = None
          ) -> Iterator[Substitution]:
    """Yield substitutions ``s`` with ``pattern s =_AC subject`` (subject canonical)."""
    sigma = {} if sigma is None else sigma
    tp = type(pattern)
    if tp is Var:
        bound = sigma.get(pattern.id)
        if bound is None:
            yield {**sigma, pattern.id: subject}
        elif bound == subject:
            yield sigma
        return
    if tp is not App:
        if pattern == subject:
            yield sigma
        return
    if type(subject) is not App or subject.head != pattern.head:
        return
    if sig.is_ac(pattern.head):
        for s, rest in match_ac_args(pattern.args, subject.args, pattern.head, sig, sigma, False):
            yield s
        return
    if len(pattern.args) != len(subject.args):
        return
    yield from _match_seq(pattern.args, subject.args, sig, sigma)


def _match_seq(pargs, sargs, sig, sigma) -> Iterator[Substitution]:
    if not pargs:
        yield sigma
        return
    for s in match(pargs[0], sargs[0], sig, sigma):
        yield from _match_seq(pargs[1:], sargs[1:], sig, s)


def match_ac_args(pargs: Sequence[Term], sargs: Sequence[Term], head: str, sig: Signature,
                  sigma: Substitution, with_rest: bool, absorb: Optional[str] = None
                  ) -> Iterator[Tuple[Substitution, Counter]]:
    """Distribute the subject summands among the pattern summands.

    Non-variable pattern summands take exactly one subject summand, variables
    take a non-empty sub-multiset.  With ``with_rest`` any leftover summands are
    returned as the residue (the extension variable of head rewriting).
    ``absorb`` names a variable whose value is merged with the residue by the
    caller anyway; it then takes all leftover summands in one go.
    """
    nonvars = [p for p in pargs if type(p) is not Var]
    var_counts = Counter(p.id for p in pargs if type(p) is Var)
    remaining = Counter(sargs)
    yield from _match_nonvars(nonvars, remaining, var_counts, head, sig, sigma, with_rest, absorb)


def _match_nonvars(nonvars, remaining, var_counts, head, sig, sigma, with_rest, absorb=None):
    if not nonvars:
        yield from _match_vars(var_counts, remaining, head, sig, sigma, with_rest, absorb)
        return
    p, rest = nonvars[0], nonvars[1:]
    for s in _sorted_keys(remaining):
        for sigma2 in match(p, s, sig, sigma):
            remaining[s] -= 1
            yield from _match_nonvars(rest, remaining, var_counts, head, sig, sigma2, with_rest,
                                      absorb)
            remaining[s] += 1


def _match_vars(var_counts, remaining, head, sig, sigma, with_rest, absorb=None):
    remaining = +remaining
    unbound = []
    for v, k in sorted(var_counts.items()):
        if v in sigma:
            need = Counter({t: n * k for t, n in Counter(_summands(sigma[v], head)).items()})
            if any(remaining[t] < n for t, n in need.items()):
                return
            remaining = remaining - need
        else:
            unbound.append((v, k))
    if with_rest and (absorb, 1) in unbound:
        unbound.remove((absorb, 1))
        unbound.append((absorb, 1))
    else:
        absorb = None
    yield from _distribute(unbound, remaining, head, sig, sigma, with_rest, absorb)


def _distribute(unbound, remaining, head, sig, sigma, with_rest, absorb=None):
    if not unbound:
        if with_rest or not +remaining:
            yield sigma, +remaining
        return
    (v, k), rest = unbound[0], unbound[1:]
    if v == absorb and not rest:
        if +remaining:
            yield {**sigma, v: sig.sum(head, (+remaining).elements())}, Counter()
        return
    for group in _sub_multisets(remaining, nonempty=True):
        if any(remaining[t] < n * k for t, n in group.items()):
            continue
        value = sig.sum(head, group.elements())
        left = remaining - Counter({t: n * k for t, n in group.items()})
        yield from _distribute(rest, left, head, sig, {**sigma, v: value}, with_rest, absorb)


def match_modulo_ac(pattern: Term, subject: Term, sig: Signature) -> List[Substitution]:
    seen, out = set(), []
    for s in match(pattern, subject, sig):
        k = tuple(sorted(s.items()))
        if k not in seen:
            seen.add(k)
            out.append(s)
    return out


# -- rewriting --------------------------------------------------------------


def _root_reducts(t: Term, th: Theory) -> Iterator[Term]:
    """All reducts of ``t`` by a rule applied at the root (with AC extension)."""
    sig = th.signature
    if type(t) is not App:
        return
    ac = sig.is_ac(t.head)
    for rule in th.rules:
        l = rule.lhs
        if type(l) is not App or l.head != t.head:
            continue
        if ac:
            for s, rest in match_ac_args(l.args, t.args, t.head, sig, {}, True,
                                         _absorbing_var(rule, t.head)):
                r = substitute(rule.rhs, s, sig)
                yield sig.app(t.head, r, *rest.elements()) if rest else r
        else:
            for s in match(l, t, sig):
                yield substitute(rule.rhs, s, sig)


def rewrite_step(t: Term, th: Theory) -> Optional[Term]:
    """One innermost-leftmost step, or ``None`` if ``t`` is irreducible."""
    if type(t) is not App:
        return None
    for i, a in enumerate(t.args):
        r = rewrite_step(a, th)
        if r is not None:
            args = list(t.args)
            args[i] = r
            return th.signature.app(t.head, *args)
    return next(_root_reducts(t, th), None)


def one_step_reducts(t: Term, th: Theory) -> set:
    """Every ``u`` with ``t ->_{R/AC} u`` in one step, at any position."""
    out = set()
    if type(t) is not App:
        return out
    sig = th.signature
    out.update(_root_reducts(t, th))
    for i, a in enumerate(t.args):
        for r in one_step_reducts(a, th):
            args = list(t.args)
            args[i] = r
            out.add(sig.app(t.head, *args))
    # a rule may also match a strict sub-sum of a flattened AC node; the
    # extension match in _root_reducts already covers those redexes
    return out


def normalize(t: Term, th: Theory) -> Term:
    """Innermost normal form; raises :class:`StepBudgetExceeded` past the budget."""
    counter = [0]
    return _nf(t, th, counter)


def _nf(t: Term, th: Theory, counter) -> Term:
    if type(t) is not App:
        return t
    cache = th._nf
    hit = cache.get(t)
    if hit is not None:
        return hit
    sig = th.signature
    visited = [t]
    u = sig.app(t.head, *(_nf(a, th, counter) for a in t.args))
    # root steps are iterated, not recursed, so long cancelling sums stay shallow
    while True:
        hit = cache.get(u)
        if hit is not None:
            result = hit
            break
        r = next(_root_reducts(u, th), None)
        if r is None:
            result = u
            break
        counter[0] += 1
        if counter[0] > th.step_budget:
            raise StepBudgetExceeded(f"normalization exceeded {th.step_budget} steps")
        visited.append(u)
        if type(r) is not App:
            result = r
            break
        u = sig.app(r.head, *(_nf(a, th, counter) for a in r.args))
    for v in visited:
        cache[v] = result
    cache[u] = result
    return result


def is_normal(t: Term, th: Theory) -> bool:
    return rewrite_step(t, th) is None


def _absorbing_var(rule: RewriteRule, head: str) -> Optional[str]:
    """A variable of ``rule`` whose split against the residue cannot matter.

    It must occur once in the lhs, as a direct summand, and in the rhs only as a
    direct summand (or be the whole rhs).
    """
    lhs_vars = Counter(x.id for x in iter_subterms(rule.lhs) if type(x) is Var)
    r = rule.rhs
    rhs_vars = Counter(x.id for x in iter_subterms(r) if type(x) is Var)
    top_r = r.args if type(r) is App and r.head == head else (r,)
    for p in rule.lhs.args:
        if type(p) is not Var or lhs_vars[p.id] != 1:
            continue
        if rhs_vars[p.id] == 1 and p in top_r:
            return p.id
    return None


def head_rewrite_steps(t: Term, th: Theory) -> set:
    """All ``u`` with ``t ->h u``: whole-term redexes and sum-residue redexes."""
    sig = th.signature
    out = set()
    if type(t) is not App:
        return out
    for rule in th.rules:
        for s in match(rule.lhs, t, sig):
            out.add(substitute(rule.rhs, s, sig))
    if not sig.is_ac(t.head):
        return out
    head = t.head
    for rule in th.rules:
        l = rule.lhs
        if type(l) is App and l.head == head:
            absorb = _absorbing_var(rule, head)
            for s, rest in match_ac_args(l.args, t.args, head, sig, {}, True, absorb):
                if rest:
                    out.add(sig.app(head, substitute(rule.rhs, s, sig), *rest.elements()))
        else:
            counts = Counter(t.args)
            for a in _sorted_keys(counts):
                rest = counts.copy()
                rest[a] -= 1
                for s in match(l, a, sig):
                    out.add(sig.app(head, substitute(rule.rhs, s, sig), *rest.elements()))
    return out


# -- theory files -------------------------------------------------------------


def parse_theory(text: str) -> Theory:
    """Parse the line-oriented theory format.

    ``theory <name>``, ``ac <sym> [inverse <sym>] [neutral <sym>]``,
    ``eq <sym>/<arity>``, ``ctor <sym>/<arity>``, ``rule <lhs> -> <rhs>`` and
    ``saturation generic|group``.
    """
    name = "unnamed"
    symbols: Dict[str, Symbol] = {}
    rule_lines = []
    saturation = "generic"

    def declare(sym: Symbol, n: int):
        if sym.name in symbols:
            raise ParseError(f"symbol {sym.name!r} declared twice", n, 1)
        symbols[sym.name] = sym

    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "theory":
            name = rest
        elif word == "ac":
            parts = rest.split()
            if not parts:
                raise ParseError("expected 'ac <sym> [inverse <sym>] [neutral <sym>]'", n, 1)
            opts = dict(zip(parts[1::2], parts[2::2]))
            if len(parts) % 2 != 1 or set(opts) - {"inverse", "neutral"}:
                raise ParseError("expected 'ac <sym> [inverse <sym>] [neutral <sym>]'", n, 1)
            sym = parts[0]
            declare(Symbol(sym, 2, SymbolKind.AC, opts.get("inverse"), opts.get("neutral")), n)
            if "inverse" in opts:
                declare(Symbol(opts["inverse"], 1, SymbolKind.INVERSE, inverse_of=sym), n)
            if "neutral" in opts:
                declare(Symbol(opts["neutral"], 0, SymbolKind.FREE), n)
        elif word in ("eq", "ctor"):
            sym, slash, arity = rest.partition("/")
            if not slash or not arity.strip().isdigit():
                raise ParseError(f"expected '{word} <sym>/<arity>'", n, 1)
            kind = SymbolKind.FREE if word == "eq" else SymbolKind.CONSTRUCTOR
            declare(Symbol(sym.strip(), int(arity), kind), n)
        elif word == "rule":
            rule_lines.append((n, rest))
        elif word == "saturation":
            if rest not in ("generic", "group"):
                raise ParseError("saturation must be 'generic' or 'group'", n, 1)
            saturation = rest
        else:
            raise ParseError(f"unknown directive {word!r}", n, 1)
    try:
        sig = Signature(symbols)
    except TermError as e:
        raise ParseError(str(e)) from None
    rules = []
    for n, text_rule in rule_lines:
        lhs, arrow, rhs = text_rule.partition("->")
        if not arrow:
            raise ParseError("expected 'rule <lhs> -> <rhs>'", n, 1)
        try:
            rules.append(RewriteRule(parse_term(lhs, sig, n), parse_term(rhs, sig, n)))
        except ParseError:
            raise
        except TermError as e:
            raise ParseError(str(e), n, 1) from None
    return Theory(name, sig, tuple(rules), saturation)
