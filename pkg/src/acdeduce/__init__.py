"""Intruder deduction modulo AC-convergent, locally stable equational theories."""

from .acmatch import MatchWitness, context_match
from .deduction import Decision, decide_edp, decide_idp, oracle_derive
from .parse import format_term, parse_context, parse_knowledge, parse_term
from .presets import ag, ag_blind, load_preset, pure_ac
from .rewrite import Theory, normalize, parse_theory
from .saturation import SaturatedSet, saturate, verify_conditions
from .sequent import ProofNode, Sequent, check_proof, prove
from .slde import DiophantineSystem, solve_n_bounded, solve_z
from .terms import App, Context, Name, Signature, Term, apply_context

__version__ = "0.1.0"

__all__ = [
    "App", "Context", "Decision", "DiophantineSystem", "MatchWitness", "Name", "ProofNode",
    "SaturatedSet", "Sequent", "Signature", "Term", "Theory", "ag", "ag_blind",
    "apply_context", "check_proof", "context_match", "decide_edp", "decide_idp",
    "format_term", "load_preset", "normalize", "oracle_derive", "parse_context",
    "parse_knowledge", "parse_term", "parse_theory", "prove", "pure_ac", "saturate",
    "solve_n_bounded", "solve_z", "verify_conditions",
]
