"""Generalized first-order decision diagrams: evaluation, combination and bounded decision procedures."""

from .core import (AggOp, AggregationList, AtomOrder, Const, Diagram, DiagramBuilder, Eq, GFODD, GfoddError,
                   Interpretation, Leaf, Node, Pred, Signature, Var, check_ordering, constant_gfodd, fodd,
                   is_sorted, standardize_apart, validate_gfodd)
from .evaluate import EvalConfig, eval_map, eval_valuation, extract_small_witness, map_by_sweep, model_evaluation
from .combine import BinaryOp, InterleavePolicy, apply, complement, interleave, is_safe
from .decide import (Answer, DecisionOutcome, SearchBudget, edge_removal_check, enumerate_interpretations,
                     fodd_sat, gfodd_equiv, gfodd_sat, gfodd_value, verify_edge_removal_shape)

__all__ = [
    "AggOp", "AggregationList", "AtomOrder", "Const", "Diagram", "DiagramBuilder", "Eq", "GFODD", "GfoddError",
    "Interpretation", "Leaf", "Node", "Pred", "Signature", "Var", "check_ordering", "constant_gfodd", "fodd",
    "is_sorted", "standardize_apart", "validate_gfodd",
    "EvalConfig", "eval_map", "eval_valuation", "extract_small_witness", "map_by_sweep", "model_evaluation",
    "BinaryOp", "InterleavePolicy", "apply", "complement", "interleave", "is_safe",
    "Answer", "DecisionOutcome", "SearchBudget", "edge_removal_check", "enumerate_interpretations", "fodd_sat",
    "gfodd_equiv", "gfodd_sat", "gfodd_value", "verify_edge_removal_shape",
]
