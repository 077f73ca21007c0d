"""Predicative lexicographic path orders: orientation, bounds, rewriting, compilation."""

from .compiler import compile_program, crosscheck, eval_oracle, parse_schema
from .interpretation import EvalBudget, InterpParams, Overflow, derive_params, f_m, f_mn, interpret
from .orders import Certificate, OrderParams, aux_gt, aux_gt_bounded, lpo_gt, plpo_gt, plpo_gt_bounded
from .orientation import (
    OrientationResult,
    SearchSpace,
    SearchTimeout,
    check_lpo,
    check_trs,
    search_lpo,
    search_orientation,
)
from .replay import CertificateError, is_valid, replay
from .rewriting import derivation_length, normalize, successors, termination_probe
from .terms import App, FunctionSymbol, Rule, Signature, Term, Trs, TrsError, Var, parse_term, parse_trs, print_term

__all__ = [
    "App", "Certificate", "CertificateError", "EvalBudget", "FunctionSymbol", "InterpParams",
    "OrderParams", "OrientationResult", "Overflow", "Rule", "SearchSpace", "SearchTimeout",
    "Signature", "Term", "Trs", "TrsError", "Var", "aux_gt", "aux_gt_bounded", "check_lpo",
    "check_trs", "compile_program", "crosscheck", "derivation_length", "derive_params",
    "eval_oracle", "f_m", "f_mn", "interpret", "is_valid", "lpo_gt", "normalize",
    "parse_schema", "parse_term", "parse_trs", "plpo_gt", "plpo_gt_bounded", "print_term",
    "replay", "search_lpo", "search_orientation", "successors", "termination_probe",
]
