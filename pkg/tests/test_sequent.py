import itertools
import json
import random

import pytest
from parse_helpers import parse_all
from sequent_oracle import provable

from acdeduce.acmatch import MatchWitness
from acdeduce.deduction import decide_edp
from acdeduce.oracles import enumerate_small_terms
from acdeduce.parse import parse_term
from acdeduce.sequent import (
    CandidateSpaceOverflow,
    ProofNode,
    Sequent,
    check_proof,
    proof_from_json,
    proof_to_json,
    prove,
)
from acdeduce.terms import App, Name


def S(th, hyps, goal):
    sig = th.signature
    return Sequent.of([parse_term(h, sig) for h in hyps], parse_term(goal, sig), th)


CANONICAL = [
    (["pair(a, b)"], "a", "p_L"),
    (["a", "b"], "pair(a, b)", "p_R"),
    (["enc(m, k)", "k"], "m", "e_L"),
    (["blind(m, r)", "r"], "m", "blind_L1"),
    (["sign(blind(m, r), k)", "r"], "sign(m, k)", "blind_L2"),
]


@pytest.mark.parametrize("hyps,goal,rule", CANONICAL)
def test_canonical_sequents(BLIND, hyps, goal, rule):
    p = prove(S(BLIND, hyps, goal), BLIND)
    assert p is not None and rule in p.rules_used()
    assert check_proof(p, BLIND)
    assert p.rules_used()[-1] == "id"


def test_keyless_decrypt_fails(BLIND):
    assert prove(S(BLIND, ["enc(m, k)"], "m"), BLIND) is None


def test_blind_chain(BLIND):
    p = prove(S(BLIND, ["sign(blind(m, r), k)", "r", "pub(k)"], "m"), BLIND)
    assert p is not None and check_proof(p, BLIND)
    # the blind_L2 then sign_L route, assembled by hand
    T = lambda t: parse_term(t, BLIND.signature)
    h0 = frozenset(map(T, ["sign(blind(m, r), k)", "r", "pub(k)"]))
    h1 = h0 | {T("sign(m, k)")}
    h2 = h1 | {T("m")}
    side = prove(Sequent(h0, T("r")), BLIND)
    leaf = prove(Sequent(h2, T("m")), BLIND)
    inner = ProofNode("sign_L", Sequent(h1, T("m")), (leaf,), T("sign(m, k)"), key=T("k"))
    outer = ProofNode("blind_L2", Sequent(h0, T("m")), (side, inner), T("sign(blind(m, r), k)"))
    assert leaf.rule == "id" and check_proof(outer, BLIND)
    assert prove(S(BLIND, ["sign(blind(m, r), k)", "r"], "m"), BLIND) is None


def test_signature_needs_public_key(BLIND):
    assert prove(S(BLIND, ["sign(m, k)"], "m"), BLIND) is None
    assert prove(S(BLIND, ["sign(m, k)", "pub(k)"], "m"), BLIND) is not None
    assert prove(S(BLIND, ["sign(m, k)", "pub(l)"], "m"), BLIND) is None


def test_acut_on_e_factor(BLIND):
    # the key is buried in a sum: cutting on it first lets e_L fire
    p = prove(S(BLIND, ["enc(m, k)", "k + a", "i(a)"], "m"), BLIND)
    assert p is not None and check_proof(p, BLIND)
    assert "acut" in p.rules_used() or "e_L" in p.rules_used()


def test_sign_l_with_wrong_key_is_rejected(BLIND):
    p = prove(S(BLIND, ["sign(m, k)", "pub(k)"], "m"), BLIND)
    node = next(n for n in _nodes(p) if n.rule == "sign_L")
    bad = _replace(p, node, ProofNode(node.rule, node.conclusion, node.premises, node.principal,
                                      key=Name("l")))
    assert not check_proof(bad, BLIND)


def test_tampered_id_filler_is_rejected(BLIND):
    p = prove(S(BLIND, ["pair(a, b)"], "a"), BLIND)
    leaf = next(n for n in _nodes(p) if n.rule == "id")
    w = MatchWitness(leaf.witness.context, (Name("c"),) * len(leaf.witness.fillers))
    bad = _replace(p, leaf, ProofNode("id", leaf.conclusion, witness=w))
    assert not check_proof(bad, BLIND)


def test_schema_mismatch_is_rejected(BLIND):
    p = prove(S(BLIND, ["a", "b"], "pair(a, b)"), BLIND)
    bad = ProofNode("p_R", p.conclusion, p.premises[::-1])
    assert not check_proof(bad, BLIND)
    assert not check_proof(ProofNode("cut", p.conclusion, p.premises), BLIND)


def test_json_round_trip(BLIND):
    for hyps, goal, _ in CANONICAL:
        p = prove(S(BLIND, hyps, goal), BLIND)
        data = json.loads(json.dumps(proof_to_json(p, BLIND)))
        q = proof_from_json(data, BLIND)
        assert check_proof(q, BLIND)
        assert proof_to_json(q, BLIND) == data


def test_candidate_space_overflow(BLIND):
    s = S(BLIND, ["pair(pair(a, b), pair(c, d))"], "e")
    with pytest.raises(CandidateSpaceOverflow) as e:
        prove(s, BLIND, max_hypotheses=3)
    assert e.value.limit == 3


def test_pairing_round_trip(BLIND):
    rng = random.Random(3)
    pool = enumerate_small_terms(BLIND, ["a", "b"], 3)
    for _ in range(20):
        m, n = rng.choice(pool), rng.choice(pool)
        pmn = App("pair", (m, n))
        assert prove(Sequent.of([pmn], m, BLIND), BLIND) is not None
        assert prove(Sequent.of([pmn], n, BLIND), BLIND) is not None
        assert prove(Sequent.of([m, n], pmn, BLIND), BLIND) is not None


def test_conservativity(BLIND):
    rng = random.Random(6)
    pool = enumerate_small_terms(BLIND, ["a", "b", "c"], 3)
    for _ in range(60):
        hyps = rng.sample(pool, rng.randint(1, 3))
        goal = rng.choice(pool)
        s = Sequent.of(hyps, goal, BLIND)
        assert (prove(s, BLIND) is not None) == decide_edp(hyps, goal, BLIND).deducible


def _small_ctor_terms(th):
    atoms = [Name("a"), Name("b")]
    one = [App(c, (x, y)) for c in ("pair", "enc", "sign", "blind") for x in atoms for y in atoms]
    one += [App("pub", (x,)) for x in atoms]
    two = [App(c, (x, y)) for c in ("pair", "sign", "enc", "blind") for x in one[:8] for y in atoms]
    return atoms, one, two


def test_agrees_with_bounded_enumerator(BLIND):
    atoms, one, two = _small_ctor_terms(BLIND)
    rng = random.Random(12)
    cases = []
    for _ in range(80):
        # at most two constructor applications across the whole sequent
        kind = rng.randint(0, 3)
        if kind == 0:
            hyps, goal = [rng.choice(two)], rng.choice(atoms)
        elif kind == 1:
            hyps, goal = [rng.choice(one), rng.choice(atoms)], rng.choice(one)
        elif kind == 2:
            hyps, goal = [rng.choice(one), rng.choice(one)], rng.choice(atoms)
        else:
            hyps, goal = [rng.choice(atoms)], rng.choice(two + one)
        cases.append((hyps, goal))
    for hyps, goal in cases:
        s = Sequent.of(hyps, goal, BLIND)
        got = prove(s, BLIND)
        assert (got is not None) == provable(s.hypotheses, s.goal, BLIND, 6), (hyps, goal)


def _nodes(p):
    yield p
    for q in p.premises:
        yield from _nodes(q)


def _replace(p, old, new):
    if p is old:
        return new
    return ProofNode(p.rule, p.conclusion, tuple(_replace(q, old, new) for q in p.premises),
                     p.principal, p.witness, p.key)
