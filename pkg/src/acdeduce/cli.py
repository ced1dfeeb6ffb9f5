"""Command-line front end.

Exit codes: 0 decided / completed (and deducible, for decision commands),
1 not deducible or unprovable, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .acmatch import context_match
from .deduction import decide_edp, decide_idp, oracle_derive
from .oracles import brute_force_slde, context_reachable, enumerate_small_terms
from .parse import format_term, parse_knowledge, parse_term
from .presets import PRESETS, load_preset
from .rewrite import StepBudgetExceeded, Theory, normalize, parse_theory
from .saturation import DEFAULT_BUDGET, SaturationBudgetExceeded, saturate, verify_conditions
from .sequent import CandidateSpaceOverflow, Sequent, check_proof, proof_to_json, prove
from .slde import DiophantineSystem, solve_n_bounded, solve_z
from .terms import Name

log = logging.getLogger("acdeduce")

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    theory: Optional[str] = None
    preset: Optional[str] = None
    know: Optional[str] = None
    goal: Optional[str] = None
    json: bool = False
    budget: int = DEFAULT_BUDGET
    oracle_depth: int = 4
    seed: int = 0
    extra: dict = field(default_factory=dict)


def load_theory(cfg: RunConfig) -> Theory:
    if cfg.theory:
        path = Path(cfg.theory)
        if not path.exists():
            raise InputError(f"theory file not found: {path}")
        return parse_theory(path.read_text())
    return load_preset(cfg.preset or "ag")


def load_inputs(cfg: RunConfig, need_goal: bool = True):
    th = load_theory(cfg)
    gamma: List = []
    if cfg.know:
        path = Path(cfg.know)
        if not path.exists():
            raise InputError(f"knowledge file not found: {path}")
        sig, kn = parse_knowledge(path.read_text(), th.signature)
        th = th.with_signature(sig)
        gamma = list(kn.terms)
    goal = None
    if need_goal:
        if cfg.goal is None:
            raise InputError("--goal is required")
        goal = parse_term(cfg.goal, th.signature)
    return th, gamma, goal


def _emit(cfg: RunConfig, data: dict, text: str, out):
    if cfg.json:
        print(json.dumps(data, sort_keys=True), file=out)
    else:
        print(text, file=out)


def _decision_json(d, th: Theory) -> dict:
    sig = th.signature
    return {
        "deducible": d.deducible,
        "witness_context": format_term(d.witness.context.term, sig) if d.witness else None,
        "witness_fillers": [format_term(f, sig) for f in d.witness.fillers] if d.witness else [],
        "sat_size": d.sat_size,
        "millis": round(d.millis, 3),
    }


# -- subcommands ------------------------------------------------------------------


def cmd_normalize(cfg: RunConfig, out) -> int:
    th, _, goal = load_inputs(cfg)
    n = normalize(goal, th)
    _emit(cfg, {"normal_form": format_term(n, th.signature)}, format_term(n, th.signature), out)
    return EXIT_OK


def cmd_saturate(cfg: RunConfig, out) -> int:
    th, gamma, _ = load_inputs(cfg, need_goal=False)
    sig = th.signature
    sat = saturate(gamma, th, cfg.budget)
    trace = [
        {"term": format_term(t, sig), "rule": e.rule,
         "parents": [format_term(p, sig) for p in e.parents]}
        for t, e in sat.trace.items()
    ]
    lines = [f"sat size {len(sat)} (from {len(sat.gamma)} known terms, strategy {sat.strategy})"]
    for tr in trace:
        src = f" <- {', '.join(tr['parents'])}" if tr["parents"] else ""
        lines.append(f"  {tr['term']}  [{tr['rule']}]{src}")
    _emit(cfg, {"sat_size": len(sat), "terms": [tr["term"] for tr in trace], "trace": trace},
          "\n".join(lines), out)
    return EXIT_OK


def cmd_match(cfg: RunConfig, out) -> int:
    th, gamma, goal = load_inputs(cfg)
    sig = th.signature
    sat = saturate(gamma, th, cfg.budget)
    w = context_match(normalize(goal, th), sat.terms, th)
    if w is None:
        _emit(cfg, {"match": False}, "no match", out)
        return EXIT_NO
    ctx = format_term(w.context.term, sig)
    fillers = [format_term(f, sig) for f in w.fillers]
    _emit(cfg, {"match": True, "context": ctx, "fillers": fillers},
          f"{ctx}\n" + "\n".join(f"  _{i} = {f}" for i, f in enumerate(fillers, 1)), out)
    return EXIT_OK


def _cmd_decide(cfg: RunConfig, out, fn) -> int:
    th, gamma, goal = load_inputs(cfg)
    d = fn(gamma, goal, th, cfg.budget)
    data = _decision_json(d, th)
    text = "deducible" if d.deducible else "not deducible"
    if d.witness:
        text += f"\ncontext: {data['witness_context']}\nfillers: {', '.join(data['witness_fillers'])}"
    _emit(cfg, data, text, out)
    return EXIT_OK if d.deducible else EXIT_NO


def cmd_deduce(cfg, out):
    return _cmd_decide(cfg, out, decide_idp)


def cmd_edp(cfg, out):
    return _cmd_decide(cfg, out, decide_edp)


def cmd_prove(cfg: RunConfig, out) -> int:
    th, gamma, goal = load_inputs(cfg)
    p = prove(Sequent.of(gamma, goal, th), th)
    if p is None:
        _emit(cfg, {"provable": False}, "no proof", out)
        return EXIT_NO
    data = proof_to_json(p, th)
    dest = cfg.extra.get("proof_out")
    if dest:
        Path(dest).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    _emit(cfg, {"provable": True, "checked": check_proof(p, th), "proof": data},
          _render_proof(data), out)
    return EXIT_OK


def _render_proof(data: dict, depth: int = 0) -> str:
    line = "  " * depth + f"{data['rule']}: {', '.join(data['hypotheses'])} |- {data['goal']}"
    return "\n".join([line] + [_render_proof(q, depth + 1) for q in data["premises"]])


def cmd_verify(cfg: RunConfig, out) -> int:
    th, gamma, _ = load_inputs(cfg, need_goal=False)
    sat = saturate(gamma, th, cfg.budget)
    rep = verify_conditions(sat, th, cfg.extra.get("samples", 200), cfg.seed)
    sig = th.signature
    data = {
        "ok": rep.ok, "sat_size": len(sat), "c_e": rep.c_e, "c_e_squared": rep.c_e_squared,
        "checked": {str(k): v for k, v in sorted(rep.checked.items())},
        "max_context_size": rep.max_context_size, "assumptions": rep.assumptions,
        "violations": [{"condition": v.condition, "term": format_term(v.term, sig),
                        "detail": v.detail} for v in rep.violations],
    }
    lines = [f"conditions {'hold' if rep.ok else 'VIOLATED'} on a set of {len(sat)} terms"]
    lines += [f"  condition {k}: {v} checks" for k, v in sorted(rep.checked.items())]
    lines += [f"  violation [{v['condition']}] {v['term']}: {v['detail']}" for v in data["violations"]]
    lines += [f"  assumption: {a}" for a in rep.assumptions]
    _emit(cfg, data, "\n".join(lines), out)
    return EXIT_OK if rep.ok else EXIT_NO


def read_matrix(text: str) -> DiophantineSystem:
    """Rows ``c1 c2 ... cq | t``; blank lines and ``#`` comments are skipped."""
    rows, targets = [], []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "|" not in line:
            raise InputError(f"line {n}: expected 'coefficients | target'")
        lhs, rhs = line.split("|", 1)
        try:
            rows.append([int(x) for x in lhs.split()])
            targets.append(int(rhs))
        except ValueError:
            raise InputError(f"line {n}: coefficients and target must be integers") from None
    if len({len(r) for r in rows}) > 1:
        raise InputError("all rows need the same number of coefficients")
    return DiophantineSystem.of(rows, targets)


def cmd_slde(cfg: RunConfig, out) -> int:
    path = Path(cfg.extra["matrix"])
    if not path.exists():
        raise InputError(f"matrix file not found: {path}")
    system = read_matrix(path.read_text())
    if cfg.extra.get("naturals"):
        beta = solve_n_bounded(system, cfg.extra.get("bound", 10))
    else:
        beta = solve_z(system)
    _emit(cfg, {"solution": list(beta) if beta is not None else None},
          "unsatisfiable" if beta is None else " ".join(map(str, beta)), out)
    return EXIT_OK if beta is not None else EXIT_NO


# -- fuzzing ------------------------------------------------------------------------


def _random_gamma(rng: random.Random, pool, k_max: int = 3):
    return rng.sample(pool, rng.randint(0, k_max))


def fuzz(cfg: RunConfig, out=None) -> dict:
    """Cross-check the fast procedures against the slow oracles.

    Each disagreement is written as a replayable JSON file under
    ``cfg.extra['out_dir']`` (when set).
    """
    rng = random.Random(cfg.seed)
    th = load_preset(cfg.preset or "ag")
    sig = th.signature
    cases = cfg.extra.get("cases", 100)
    out_dir = cfg.extra.get("out_dir")
    names = ["a", "b", "c"]
    pool = enumerate_small_terms(th, names, 5)
    report = {"seed": cfg.seed, "preset": th.name, "cases": 0, "agree": 0,
              "budget_exceeded": 0, "counterexamples": []}
    for i in range(cases):
        kind = ("idp", "slde", "match")[i % 3]
        case = {"kind": kind, "index": i}
        try:
            if kind == "idp":
                gamma = _random_gamma(rng, pool)
                goal = rng.choice(pool + [Name(n) for n in names])
                case.update(gamma=[format_term(g, sig) for g in gamma], goal=format_term(goal, sig))
                d = decide_idp(gamma, goal, th, cfg.budget)
                o = oracle_derive(gamma, goal, th, cfg.oracle_depth)
                ok = d.deducible == o
                case.update(fast=d.deducible, oracle=o)
            elif kind == "slde":
                q, r = rng.randint(1, 3), rng.randint(1, 3)
                rows = [[rng.randint(-3, 3) for _ in range(q)] for _ in range(r)]
                targets = [rng.randint(-3, 3) for _ in range(r)]
                system = DiophantineSystem.of(rows, targets, q)
                beta = solve_z(system)
                brute = brute_force_slde(system, 12)
                ok = (beta is not None and system.satisfied_by(beta)) if brute is not None else beta is None
                case.update(rows=rows, targets=targets, fast=beta, oracle=brute)
            else:
                gamma = _random_gamma(rng, pool, 2)
                goal = rng.choice(pool)
                sat = saturate(gamma, th, cfg.budget)
                fast = context_match(goal, sat.terms, th) is not None
                o = context_reachable(goal, sat.terms, th, goal.size + th.c_e)
                ok = fast == o
                case.update(gamma=[format_term(g, sig) for g in gamma], goal=format_term(goal, sig),
                            fast=fast, oracle=o)
        except (SaturationBudgetExceeded, StepBudgetExceeded):
            report["budget_exceeded"] += 1
            report["cases"] += 1
            continue
        report["cases"] += 1
        if ok:
            report["agree"] += 1
        else:
            report["counterexamples"].append(case)
            if out_dir:
                Path(out_dir).mkdir(parents=True, exist_ok=True)
                Path(out_dir, f"counterexample-{cfg.seed}-{i}.json").write_text(
                    json.dumps({"preset": cfg.preset or "ag", **case}, indent=2, default=str))
    return report


def replay(path: str, cfg: RunConfig) -> bool:
    """Re-run one counterexample file; True when the two sides now agree."""
    case = json.loads(Path(path).read_text())
    th = load_preset(case.get("preset", "ag"))
    sig = th.signature
    if case["kind"] == "slde":
        system = DiophantineSystem.of(case["rows"], case["targets"], len(case["rows"][0]))
        return (solve_z(system) is None) == (brute_force_slde(system, 12) is None)
    gamma = [parse_term(g, sig) for g in case["gamma"]]
    goal = parse_term(case["goal"], sig)
    if case["kind"] == "idp":
        return decide_idp(gamma, goal, th).deducible == oracle_derive(
            gamma, goal, th, cfg.oracle_depth)
    sat = saturate(gamma, th)
    return (context_match(goal, sat.terms, th) is not None) == context_reachable(
        goal, sat.terms, th, goal.size + th.c_e)


def cmd_fuzz(cfg: RunConfig, out) -> int:
    if cfg.extra.get("replay"):
        ok = replay(cfg.extra["replay"], cfg)
        _emit(cfg, {"agree": ok}, "agree" if ok else "disagree", out)
        return EXIT_OK if ok else EXIT_NO
    rep = fuzz(cfg, out)
    text = (f"{rep['agree']}/{rep['cases']} agree, {rep['budget_exceeded']} budget-exceeded, "
            f"{len(rep['counterexamples'])} counterexamples (seed {rep['seed']})")
    _emit(cfg, rep, text, out)
    return EXIT_OK if not rep["counterexamples"] else EXIT_NO


COMMANDS = {
    "normalize": cmd_normalize,
    "saturate": cmd_saturate,
    "match": cmd_match,
    "deduce": cmd_deduce,
    "edp": cmd_edp,
    "prove": cmd_prove,
    "verify": cmd_verify,
    "slde": cmd_slde,
    "fuzz": cmd_fuzz,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acdeduce", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, goal=True, know=True):
        p.add_argument("--theory", help="theory file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="bundled theory (default ag)")
        if know:
            p.add_argument("--know", help="knowledge file (name/know lines)")
        if goal:
            p.add_argument("--goal", help="goal term")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="saturation budget (max terms)")
        return p

    common(sub.add_parser("normalize", help="print the normal form of --goal"), know=False)
    common(sub.add_parser("saturate", help="print sat(G) and its trace"), goal=False)
    common(sub.add_parser("match", help="E-context witness over sat(G)"))
    common(sub.add_parser("deduce", help="decide G |- M"))
    common(sub.add_parser("edp", help="decide the elementary deduction problem"))
    p = common(sub.add_parser("prove", help="sequent proof search with constructors"))
    p.add_argument("--proof-out", help="write the proof as JSON")
    p = common(sub.add_parser("verify", help="check the closure conditions of sat(G)"), goal=False)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("slde", help="solve a linear Diophantine system")
    p.add_argument("matrix", help="file with rows 'c1 ... cq | t'")
    p.add_argument("--naturals", action="store_true", help="solve over N (bounded search)")
    p.add_argument("--bound", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p = sub.add_parser("fuzz", help="cross-check against slow oracles")
    p.add_argument("--preset", choices=sorted(PRESETS), default="ag")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--oracle-depth", type=int, default=4)
    p.add_argument("--out-dir", help="directory for counterexample files")
    p.add_argument("--replay", help="re-run one counterexample file")
    p.add_argument("--json", action="store_true")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    base = {"command", "theory", "preset", "know", "goal", "json", "budget", "oracle_depth", "seed"}
    values = vars(ns)
    cfg = RunConfig(**{k: values[k] for k in base if k in values and values[k] is not None})
    cfg.extra = {k: v for k, v in values.items() if k not in base and k != "verbose"}
    return cfg


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        return COMMANDS[cfg.command](cfg, out)
    except (InputError, ValueError) as e:
        # parse and unknown-symbol errors are ValueErrors carrying line/column
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (SaturationBudgetExceeded, StepBudgetExceeded, CandidateSpaceOverflow) as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET


def main(argv: Optional[List[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    code = run(config_from_args(ns))
    log.debug("finished in %.1f ms", (time.perf_counter() - start) * 1000)
    return code


if __name__ == "__main__":
    sys.exit(main())
