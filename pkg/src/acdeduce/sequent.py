"""Cut-free proof search for the intruder sequent calculus with constructors.

Constructors (``pub``, ``sign``, ``blind``, ``enc``, ``pair``) are handled by
left and right rules; the equational layer is reached through ``id``, which
holds when the goal is an E-context over the hypotheses (decided by EDP).

Left rules only ever add hypotheses, so search first computes the closure of
the hypotheses under every left rule whose side premise is provable, then
tries to synthesize the goal from that closure with right rules and ``id``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .acmatch import MatchWitness
from .deduction import SaturationCache, _Abstraction, decide_edp
from .parse import format_term, parse_context, parse_term
from .rewrite import Theory, normalize
from .terms import App, Context, Term, apply_context, e_factors

LEFT_RULES = ("p_L", "e_L", "sign_L", "blind_L1", "blind_L2", "acut")
RIGHT_RULES = {"pair": "p_R", "enc": "e_R", "sign": "sign_R", "blind": "blind_R"}
RULES = ("id",) + LEFT_RULES + tuple(RIGHT_RULES.values())
DEFAULT_MAX_HYPOTHESES = 5_000
PRUNE_LIMIT = 40


class CandidateSpaceOverflow(RuntimeError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"hypothesis closure reached {size} terms (limit {limit})")
        self.size = size
        self.limit = limit


@dataclass(frozen=True)
class Sequent:
    hypotheses: frozenset
    goal: Term

    @classmethod
    def of(cls, hyps: Iterable[Term], goal: Term, th: Theory) -> "Sequent":
        return cls(frozenset(normalize(h, th) for h in hyps), normalize(goal, th))

    def with_hyps(self, *extra: Term) -> "Sequent":
        return Sequent(self.hypotheses | frozenset(extra), self.goal)

    def with_goal(self, goal: Term) -> "Sequent":
        return Sequent(self.hypotheses, goal)


@dataclass(frozen=True)
class ProofNode:
    rule: str
    conclusion: Sequent
    premises: Tuple["ProofNode", ...] = ()
    principal: Optional[Term] = None
    # id: the E-context witness; sign_L: the public key term L
    witness: Optional[MatchWitness] = None
    key: Optional[Term] = None

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def rules_used(self) -> List[str]:
        out = [self.rule]
        for p in self.premises:
            out += p.rules_used()
        return out


def _ctor(t: Term, head: str, arity: int) -> bool:
    return type(t) is App and t.head == head and len(t.args) == arity


@dataclass
class _Step:
    rule: str
    principal: Term
    added: Tuple[Term, ...]
    side_goal: Optional[Term] = None
    key: Optional[Term] = None


@dataclass
class _Search:
    th: Theory
    max_hypotheses: int = DEFAULT_MAX_HYPOTHESES
    cache: SaturationCache = field(default_factory=SaturationCache)
    memo: Dict[Tuple[frozenset, Term], Optional[ProofNode]] = field(default_factory=dict)

    def synth(self, hyps: frozenset, goal: Term) -> Optional[ProofNode]:
        """Right rules and ``id`` only (hypotheses are already left-closed)."""
        k = (hyps, goal)
        if k in self.memo:
            return self.memo[k]
        s = Sequent(hyps, goal)
        proof = None
        rule = RIGHT_RULES.get(goal.head) if type(goal) is App else None
        if rule is not None and len(goal.args) == 2:
            left = self.synth(hyps, goal.args[0])
            right = self.synth(hyps, goal.args[1]) if left is not None else None
            if right is not None:
                proof = ProofNode(rule, s, (left, right))
        if proof is None:
            d = decide_edp(hyps, goal, self.th, cache=self.cache)
            if d.deducible:
                proof = ProofNode("id", s, witness=d.witness)
        self.memo[k] = proof
        return proof

    def candidate_steps(self, hyps: frozenset, goal: Term) -> List[_Step]:
        steps = []
        for h in sorted(hyps, key=lambda t: t.key):
            if _ctor(h, "pair", 2):
                steps.append(_Step("p_L", h, h.args))
            elif _ctor(h, "enc", 2):
                steps.append(_Step("e_L", h, h.args, side_goal=h.args[1]))
            elif _ctor(h, "blind", 2):
                steps.append(_Step("blind_L1", h, h.args, side_goal=h.args[1]))
            elif _ctor(h, "sign", 2):
                m, k = h.args
                pub = App("pub", (k,))
                if pub in hyps:
                    steps.append(_Step("sign_L", h, (m,), key=k))
                if _ctor(m, "blind", 2):
                    inner, r = m.args
                    steps.append(_Step("blind_L2", h, (App("sign", (inner, k)), r), side_goal=r))
        for a in sorted(_factors(hyps, goal, self.th) - hyps, key=lambda t: t.key):
            steps.append(_Step("acut", a, (a,), side_goal=a))
        return steps

    def prove(self, s: Sequent) -> Optional[ProofNode]:
        hyps = s.hypotheses
        steps: List[_Step] = []
        changed = True
        while changed:
            changed = False
            for st in self.candidate_steps(hyps, s.goal):
                if all(a in hyps for a in st.added):
                    continue
                if st.side_goal is not None and self.synth(hyps, st.side_goal) is None:
                    continue
                steps.append(st)
                hyps = hyps | frozenset(st.added)
                changed = True
                if len(hyps) > self.max_hypotheses:
                    raise CandidateSpaceOverflow(len(hyps), self.max_hypotheses)
        if self.synth(hyps, s.goal) is None:
            return None
        # drop left steps the proof does not need, last first
        if len(steps) <= PRUNE_LIMIT:
            for i in reversed(range(len(steps))):
                trial = steps[:i] + steps[i + 1:]
                if self.replay(s, trial) is not None:
                    steps = trial
        return self.replay(s, steps)

    def replay(self, s: Sequent, steps: List[_Step]) -> Optional[ProofNode]:
        hyps, goal = s.hypotheses, s.goal
        chain = []
        for st in steps:
            if st.rule == "acut":
                if st.principal not in _factors(hyps, goal, self.th):
                    return None
            elif st.principal not in hyps:
                return None
            if st.rule == "sign_L" and App("pub", (st.key,)) not in hyps:
                return None
            side = None
            if st.side_goal is not None:
                side = self.synth(hyps, st.side_goal)
                if side is None:
                    return None
            chain.append((hyps, st, side))
            hyps = hyps | frozenset(st.added)
        proof = self.synth(hyps, goal)
        if proof is None:
            return None
        for h, st, side in reversed(chain):
            prems = (proof,) if side is None else (side, proof)
            proof = ProofNode(st.rule, Sequent(h, goal), prems, st.principal, key=st.key)
        return proof


def _factors(hyps: frozenset, goal: Term, th: Theory) -> set:
    out = set()
    for t in hyps | {goal}:
        out |= e_factors(t, th.signature)
    return out


def prove(s: Sequent, th: Theory, max_hypotheses: int = DEFAULT_MAX_HYPOTHESES,
          cache: Optional[SaturationCache] = None) -> Optional[ProofNode]:
    """A proof of ``s`` or ``None``.  Raises :class:`CandidateSpaceOverflow`."""
    search = _Search(th, max_hypotheses, cache or SaturationCache())
    return search.prove(s)


# -- checking -------------------------------------------------------------------


def _check_id(p: ProofNode, th: Theory, cache: SaturationCache) -> bool:
    w = p.witness
    if w is None:
        return False
    sig = th.signature
    s = p.conclusion
    if not w.context.is_e_context(sig):
        return False
    ab = _Abstraction(sig)
    sat = cache.get([ab.down(h) for h in s.hypotheses], th)
    if not all(ab.down(f) in sat.terms for f in w.fillers):
        return False
    try:
        filled = apply_context(w.context, w.fillers, sig)
    except ValueError:
        return False
    return normalize(filled, th) == normalize(s.goal, th)


def check_proof(p: ProofNode, th: Theory, cache: Optional[SaturationCache] = None) -> bool:
    """Every node instantiates its rule schema and every ``id`` leaf revalidates."""
    cache = cache or SaturationCache()
    return _check(p, th, cache)


def _check(p: ProofNode, th: Theory, cache: SaturationCache) -> bool:
    s = p.conclusion
    hyps, goal = s.hypotheses, s.goal
    prem = p.premises
    r = p.rule
    if r == "id":
        return not prem and _check_id(p, th, cache)
    if r in RIGHT_RULES.values():
        head = {v: k for k, v in RIGHT_RULES.items()}[r]
        ok = (_ctor(goal, head, 2) and len(prem) == 2
              and all(q.conclusion == Sequent(hyps, a) for q, a in zip(prem, goal.args)))
        return ok and all(_check(q, th, cache) for q in prem)
    pr = p.principal
    if r not in LEFT_RULES or pr is None:
        return False
    if r == "acut":
        if pr not in _factors(hyps, goal, th):
            return False
        side, added = pr, (pr,)
    else:
        if pr not in hyps:
            return False
        if r == "p_L" and _ctor(pr, "pair", 2):
            side, added = None, pr.args
        elif r == "e_L" and _ctor(pr, "enc", 2):
            side, added = pr.args[1], pr.args
        elif r == "blind_L1" and _ctor(pr, "blind", 2):
            side, added = pr.args[1], pr.args
        elif r == "sign_L" and _ctor(pr, "sign", 2):
            # the side condition K =_AC L on the public key
            if p.key is None or p.key != pr.args[1] or App("pub", (p.key,)) not in hyps:
                return False
            side, added = None, (pr.args[0],)
        elif r == "blind_L2" and _ctor(pr, "sign", 2) and _ctor(pr.args[0], "blind", 2):
            (m, rr), k = pr.args[0].args, pr.args[1]
            side, added = rr, (App("sign", (m, k)), rr)
        else:
            return False
    expected = [] if side is None else [Sequent(hyps, side)]
    expected.append(Sequent(hyps | frozenset(added), goal))
    if len(prem) != len(expected):
        return False
    if any(q.conclusion != e for q, e in zip(prem, expected)):
        return False
    return all(_check(q, th, cache) for q in prem)


# -- JSON -----------------------------------------------------------------------


def proof_to_json(p: ProofNode, th: Theory) -> dict:
    sig = th.signature
    f = lambda t: format_term(t, sig)
    out = {
        "rule": p.rule,
        "hypotheses": sorted(f(h) for h in p.conclusion.hypotheses),
        "goal": f(p.conclusion.goal),
        "premises": [proof_to_json(q, th) for q in p.premises],
    }
    if p.principal is not None:
        out["principal"] = f(p.principal)
    if p.key is not None:
        out["key"] = f(p.key)
    if p.witness is not None:
        out["witness"] = {"context": f(p.witness.context.term),
                          "fillers": [f(x) for x in p.witness.fillers]}
    return out


def proof_from_json(data: dict, th: Theory) -> ProofNode:
    sig = th.signature
    t = lambda s: parse_term(s, sig)
    s = Sequent(frozenset(t(h) for h in data["hypotheses"]), t(data["goal"]))
    w = None
    if "witness" in data:
        ctx = Context(sig.canonicalize(parse_context(data["witness"]["context"], sig)))
        w = MatchWitness(ctx, tuple(t(x) for x in data["witness"]["fillers"]))
    return ProofNode(
        data["rule"], s, tuple(proof_from_json(q, th) for q in data.get("premises", ())),
        t(data["principal"]) if "principal" in data else None, w,
        t(data["key"]) if "key" in data else None)
