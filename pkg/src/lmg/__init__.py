"""Literal movement grammars: parsing, classification, recognition, transformations."""
from .analysis import analyze, engine_eligibility
from .core import Derivation, Grammar, validate_grammar
from .general import Limits, Outcome, parse_general, recognize_general
from .poly import NotEligible, parse_poly, recognize_poly
from .syntax import load_grammar, parse_grammar, print_grammar, tokenize
from .transform import backbone_grammar, backbone_tree, intersect

__version__ = "0.1.0"

__all__ = [
    "Derivation", "Grammar", "Limits", "NotEligible", "Outcome", "analyze", "backbone_grammar",
    "backbone_tree", "engine_eligibility", "intersect", "load_grammar", "parse_general",
    "parse_grammar", "parse_poly", "print_grammar", "recognize_general", "recognize_poly",
    "tokenize", "validate_grammar",
]
