"""Exhaustive cut-free proof enumeration up to a height bound.

Independent of the left-closure search in ``acdeduce.sequent``: every rule
is tried at every node, in any order.
"""

from acdeduce.deduction import SaturationCache, decide_edp
from acdeduce.terms import App, e_factors

RIGHT = ("pair", "enc", "sign", "blind")


def _ctor(t, head):
    return type(t) is App and t.head == head and len(t.args) == 2


def _left_moves(hyps, goal, th):
    for h in hyps:
        if _ctor(h, "pair"):
            yield None, h.args
        elif _ctor(h, "enc"):
            yield h.args[1], h.args
        elif _ctor(h, "blind"):
            yield h.args[1], h.args
        elif _ctor(h, "sign"):
            m, k = h.args
            if App("pub", (k,)) in hyps:
                yield None, (m,)
            if _ctor(m, "blind"):
                yield m.args[1], (App("sign", (m.args[0], k)), m.args[1])
    factors = set()
    for t in hyps | {goal}:
        factors |= e_factors(t, th.signature)
    for a in factors - hyps:
        yield a, (a,)


def provable(hyps, goal, th, depth, memo=None, cache=None):
    memo = {} if memo is None else memo
    cache = cache or SaturationCache()
    key = (hyps, goal, depth)
    if key in memo:
        return memo[key]
    memo[key] = False
    ok = False
    if depth >= 1:
        ok = decide_edp(hyps, goal, th, cache=cache).deducible
        if not ok and type(goal) is App and goal.head in RIGHT and len(goal.args) == 2:
            ok = all(provable(hyps, a, th, depth - 1, memo, cache) for a in goal.args)
        if not ok:
            for side, added in _left_moves(hyps, goal, th):
                new = hyps | frozenset(added)
                if new == hyps:
                    continue
                if side is not None and not provable(hyps, side, th, depth - 1, memo, cache):
                    continue
                if provable(new, goal, th, depth - 1, memo, cache):
                    ok = True
                    break
    memo[key] = ok
    return ok
