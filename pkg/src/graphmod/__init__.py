"""Termgraph rewriting and the modal logic of graph modifiers."""
from .canonical import canonical_order, canonicalize
from .encodings import (
    encode_elementary,
    encode_root_redirect,
    hom_encoding,
    hom_formula,
    invariant_formula,
    normal_form_formula,
    shape_formula,
    translate_rule,
)
from .fparse import parse_action, parse_formula
from .hybrid import hybrid_eval, hybrid_translate, parse_hybrid
from .reduction import eliminate_updates, simplify
from .rewriting import (
    RewriteRule,
    all_normal_forms,
    find_homomorphisms,
    load_rules,
    load_system,
    normalize,
    rewrite_step,
    substitute_actions,
)
from .semantics import Budget, Verdict, model_check, successors
from .syntax import show
from .tableau import Sat, Unsat, decide_valid_L, tableau_sat
from .termgraph import Termgraph, apply_action, apply_actions, validate_strict
from .tgparse import parse_rules, parse_termgraph, print_term, print_termgraph

__all__ = [
    "Budget", "RewriteRule", "Sat", "Termgraph", "Unsat", "Verdict",
    "all_normal_forms", "apply_action", "apply_actions", "canonical_order", "canonicalize",
    "decide_valid_L", "eliminate_updates", "encode_elementary", "encode_root_redirect",
    "find_homomorphisms", "hom_encoding", "hom_formula", "hybrid_eval", "hybrid_translate",
    "invariant_formula", "load_rules", "load_system", "model_check", "normal_form_formula",
    "normalize", "parse_action", "parse_formula", "parse_hybrid", "parse_rules",
    "parse_termgraph", "print_term", "print_termgraph", "rewrite_step", "shape_formula",
    "show", "simplify", "substitute_actions", "successors", "tableau_sat", "translate_rule",
    "validate_strict",
]
