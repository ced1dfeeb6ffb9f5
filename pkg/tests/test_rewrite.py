import random

import pytest

from acdeduce.parse import parse_term
from acdeduce.rewrite import (
    StepBudgetExceeded,
    Theory,
    compute_c_e,
    head_rewrite_steps,
    is_normal,
    match_modulo_ac,
    normalize,
    one_step_reducts,
    parse_theory,
    rewrite_step,
)
from acdeduce.terms import App, Name, Var


def V(x):
    return Var(x)


def test_rule_examples(AG, P):
    assert rewrite_step(P("i(i(a))"), AG) == P("a")
    assert rewrite_step(P("a"), AG) is None
    assert rewrite_step(P("a + 0"), AG) == P("a")
    assert normalize(P("(a + b) + i(b)"), AG) == P("a")
    assert normalize(P("i(0)"), AG) == P("0")
    assert normalize(P("i(a + b + c)"), AG) == P("i(a) + i(b) + i(c)")


def test_pure_ac_has_no_rules(AC):
    t = parse_term("a + b", AC.signature)
    assert normalize(t, AC) == t


def test_matching(AG, P):
    sig = AG.signature
    pat = sig.app("+", V("x"), App("i", (V("x"),)))
    assert match_modulo_ac(pat, P("a + i(a)"), sig) == [{"x": P("a")}]
    subs = match_modulo_ac(sig.app("+", V("x"), V("y")), P("a + b + c"), sig)
    assert len(subs) == 6
    assert {"x": P("a"), "y": P("b + c")} in subs
    assert match_modulo_ac(App("i", (V("x"),)), P("a + b"), sig) == []


def test_head_rewriting(AG, BLIND, P):
    assert head_rewrite_steps(P("a + i(a)"), AG) == {P("0")}
    assert head_rewrite_steps(P("a + b + i(b)"), AG) == {P("a + 0")}
    sig = BLIND.signature
    # the redex is below a constructor head
    assert head_rewrite_steps(parse_term("pair(a + i(a), b)", sig), BLIND) == set()


def test_c_e(AG, AC):
    assert AG.c_e == compute_c_e(AG) == 5
    assert AC.c_e == 3
    th = parse_theory("theory t\neq f/1\neq g/2\nrule f(?x) -> ?x\n")
    assert th.c_e == 3


def test_theory_file_errors():
    from acdeduce.parse import ParseError

    with pytest.raises(ParseError):
        parse_theory("rule ?x -> a\n")
    with pytest.raises(ParseError):
        parse_theory("eq f/1\nrule f(?x) -> ?y\n")
    with pytest.raises(ParseError):
        parse_theory("ac +\nac +\n")


def test_step_budget():
    th = parse_theory("theory loop\neq f/1\neq g/1\nrule f(?x) -> g(?x)\nrule g(?x) -> f(?x)\n")
    th.step_budget = 50
    with pytest.raises(StepBudgetExceeded):
        normalize(parse_term("f(a)", th.signature), th)


# -- properties -------------------------------------------------------------------


def random_term(rng, sig, size):
    if size <= 2:
        return rng.choice([Name("a"), Name("b"), Name("c"), App("0", ())])
    if rng.random() < 0.3:
        return App("i", (random_term(rng, sig, size - 1),))
    k = rng.randint(1, size - 2)
    return sig.app("+", random_term(rng, sig, k), random_term(rng, sig, size - 1 - k))


def test_normal_forms_are_irreducible_and_idempotent(AG):
    rng = random.Random(3)
    for _ in range(300):
        t = random_term(rng, AG.signature, rng.randint(1, 12))
        n = normalize(t, AG)
        assert is_normal(n, AG)
        assert normalize(n, AG) == n


def test_confluence_sampling(AG):
    rng = random.Random(5)
    for _ in range(150):
        t = random_term(rng, AG.signature, rng.randint(3, 9))
        reducts = sorted(one_step_reducts(t, AG), key=lambda u: u.key)
        nfs = {normalize(u, AG) for u in reducts}
        assert len(nfs) <= 1
        if nfs:
            assert nfs == {normalize(t, AG)}


def _root_split_oracle(t, th):
    """Root steps modulo AC: a rule matches the sum of a sub-multiset S of the
    top-level summands and the rest R is kept beside the result."""
    from itertools import product

    from acdeduce.rewrite import substitute

    sig = th.signature
    args = list(t.args) if type(t) is App and t.head == "+" else [t]
    out = set()
    for mask in product([0, 1], repeat=len(args)):
        s_part = [a for a, b in zip(args, mask) if b]
        rest = [a for a, b in zip(args, mask) if not b]
        if not s_part:
            continue
        sub = sig.sum("+", s_part) if len(s_part) > 1 else s_part[0]
        for rule in th.rules:
            for sigma in match_modulo_ac(rule.lhs, sub, sig):
                r = substitute(rule.rhs, sigma, sig)
                out.add(sig.sum("+", [r] + rest) if rest else r)
    return out


def test_head_rewrites_against_split_oracle(AG, P):
    for text in ["a + b + i(b)", "a + i(a) + 0", "i(a) + a + b + i(b)", "a + i(a)",
                 "i(a + b)", "i(i(a)) + b"]:
        t = P(text)
        assert head_rewrite_steps(t, AG) == _root_split_oracle(t, AG), text


def test_match_soundness_and_completeness(AG, P):
    from itertools import product

    from acdeduce.rewrite import substitute

    sig = AG.signature
    pat = sig.app("+", V("x"), V("y"))
    for text in ["a + b", "a + b + c", "a + a + b", "a + b + c + d"]:
        subj = P(text)
        got = match_modulo_ac(pat, subj, sig)
        for s in got:
            assert substitute(pat, s, sig) == subj
        # brute force: every split of the argument multiset into two non-empty parts
        args = list(subj.args)
        expected = set()
        for mask in product([0, 1], repeat=len(args)):
            left = [a for a, m in zip(args, mask) if m]
            right = [a for a, m in zip(args, mask) if not m]
            if left and right:
                expected.add((sig.sum("+", left), sig.sum("+", right)))
        assert {(s["x"], s["y"]) for s in got} == expected
