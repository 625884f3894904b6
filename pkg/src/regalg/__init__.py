"""Finite partial terms, regular coterms and their least-fixed-point semantics."""
from .algebra import (
    AlgebraSpec, CapAndFlag, Converged, ExactHook, StabilizeWithin, Unresolved,
    approx_eval, check_em_identity, check_inequalities, check_morphism, kleene_eval,
    validate_algebra,
)
from .coterms import (
    RegSys, SysClass, approximates, bisim_equal, bisim_witness, classify, of_term,
    parse_system, subst_sys, unfold,
)
from .kernels import BACKEND
from .terms import (
    BOT, App, OpSymbol, Signature, Var, build, consistent, eval_term, leq_syn, merge,
    parse_signature, parse_term, subst,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraSpec", "CapAndFlag", "Converged", "ExactHook", "StabilizeWithin", "Unresolved",
    "approx_eval", "check_em_identity", "check_inequalities", "check_morphism", "kleene_eval",
    "validate_algebra", "RegSys", "SysClass", "approximates", "bisim_equal", "bisim_witness",
    "classify", "of_term", "parse_system", "subst_sys", "unfold", "BACKEND", "BOT", "App",
    "OpSymbol", "Signature", "Var", "build", "consistent", "eval_term", "leq_syn", "merge",
    "parse_signature", "parse_term", "subst",
]
