import random
import threading

import pytest
from parse_helpers import parse_all

from acdeduce.acmatch import validate_witness
from acdeduce.deduction import (
    SaturationCache,
    decide_edp,
    decide_idp,
    oracle_derive,
    oracle_levels,
)
from acdeduce.natded import check_derivation
from acdeduce.oracles import enumerate_small_terms
from acdeduce.parse import format_term
from acdeduce.saturation import SaturationBudgetExceeded
from acdeduce.terms import HOLE, Name, Var, iter_subterms


def test_idp_examples(AG, AC):
    g = parse_all(AG, "a + b", "i(b)")
    d = decide_idp(g, parse_all(AG, "a")[0], AG)
    assert d.deducible and d.sat_size >= 3
    d = decide_idp(g, g[0], AG)
    assert d.deducible and d.witness.context.term == HOLE
    assert not decide_idp(parse_all(AC, "a + b"), parse_all(AC, "a")[0], AC).deducible


def test_edp_examples(AG, BLIND):
    d = decide_edp(parse_all(AG, "a", "k"), parse_all(AG, "a + k")[0], AG)
    assert d.deducible and format_term(d.witness.context.term, AG.signature) == "_ + _"
    assert not decide_edp(parse_all(BLIND, "a"), parse_all(BLIND, "sign(a, k)")[0], BLIND).deducible
    assert decide_edp(parse_all(AG, "a"), parse_all(AG, "a")[0], AG).deducible


def test_edp_treats_constructor_terms_as_atoms(BLIND):
    g = parse_all(BLIND, "sign(m, k) + b", "i(b)")
    goal = parse_all(BLIND, "sign(m, k)")[0]
    d = decide_edp(g, goal, BLIND)
    assert d.deducible
    assert validate_witness(d.witness, goal, set(d.witness.fillers), BLIND)
    names = {x.id for f in d.witness.fillers for x in iter_subterms(f) if type(x) is Name}
    assert not any(n.startswith("#") for n in names)


def test_public_names_are_free(AG):
    th = AG.with_signature(AG.signature.with_public(["k"]))
    assert decide_idp(parse_all(th, "a"), parse_all(th, "a + k")[0], th).deducible
    assert not decide_idp(parse_all(AG, "a"), parse_all(AG, "a + k")[0], AG).deducible


def test_non_ground_input_rejected(AG):
    with pytest.raises(ValueError):
        decide_idp([Var("x")], parse_all(AG, "a")[0], AG)


def test_budget_propagates(AG):
    with pytest.raises(SaturationBudgetExceeded):
        decide_idp(parse_all(AG, "a + b", "i(b)"), parse_all(AG, "a")[0], AG, budget=2)


def test_oracle_examples(AG):
    assert oracle_derive(parse_all(AG, "a"), parse_all(AG, "a")[0], AG, 1)
    assert oracle_derive(parse_all(AG, "a", "b"), parse_all(AG, "a + b")[0], AG, 2)
    assert not oracle_derive(parse_all(AG, "a", "b"), parse_all(AG, "a + b")[0], AG, 1)
    assert oracle_derive(parse_all(AG, "a + b"), parse_all(AG, "b + a")[0], AG, 2)
    assert oracle_derive(parse_all(AG, "a + b", "i(b)"), parse_all(AG, "a")[0], AG, 2)


def test_witness_and_derivation_validity(AG):
    rng = random.Random(2)
    pool = enumerate_small_terms(AG, ["a", "b", "c"], 3)
    for _ in range(40):
        g = rng.sample(pool, rng.randint(1, 3))
        m = rng.choice(pool)
        d = decide_idp(g, m, AG)
        if d.deducible:
            assert validate_witness(d.witness, m, d.saturated.terms, AG)
            der = d.derivation(AG)
            assert der.term == d.goal and check_derivation(der, g, AG)
        else:
            with pytest.raises(ValueError):
                d.derivation(AG)


def test_agreement_with_oracle_on_small_cases(AG):
    pool = enumerate_small_terms(AG, ["a", "b"], 3)
    goals = enumerate_small_terms(AG, ["a", "b"], 5)
    rng = random.Random(8)
    for _ in range(12):
        g = rng.sample(pool, rng.randint(1, 2))
        levels = oracle_levels(g, AG, 3)
        for m in goals:
            assert decide_idp(g, m, AG).deducible == oracle_derive(g, m, AG, 4, levels=levels), (g, m)


def test_monotonicity_and_normalization_invariance(AG):
    rng = random.Random(9)
    pool = enumerate_small_terms(AG, ["a", "b", "c"], 3)
    raw = parse_all(AG, "i(i(a)) + 0", "b + i(0)", "a + b + i(b)")
    for _ in range(40):
        g = rng.sample(pool, 2)
        extra = rng.sample(pool, 1)
        m = rng.choice(pool)
        if decide_idp(g, m, AG).deducible:
            assert decide_idp(g + extra, m, AG).deducible
    from acdeduce.rewrite import normalize

    for m in pool[:10]:
        a = decide_idp(raw, m, AG)
        b = decide_idp([normalize(t, AG) for t in raw], normalize(m, AG), AG)
        assert a.deducible == b.deducible
        assert a.normalized_inputs > 0 and b.normalized_inputs == 0


def test_cache_is_shared_and_thread_safe(AG):
    cache = SaturationCache()
    g = parse_all(AG, "a + b", "i(b)")
    goals = enumerate_small_terms(AG, ["a", "b"], 3)
    results = []

    def work():
        results.append([decide_idp(g, m, AG, cache=cache).deducible for m in goals])

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(cache) == 1
    assert all(r == results[0] for r in results)
