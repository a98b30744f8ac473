"""Multi-tape two-level morphology with a unification word grammar."""

from .engine import AnalysisResult, PartitionStep, analyze, cascade, generate, two_level_analysis
from .featstruct import Conjunction, Disjunction, FeatureCategory, Variable, unify_category, unify_value
from .grammario import CascadeGrammar, GrammarError, GrammarSnapshot, load, load_file, parse_grammar, print_grammar
from .rulebase import BOUNDARY, Direction, TwoLevelRule

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "BOUNDARY",
    "CascadeGrammar",
    "Conjunction",
    "Direction",
    "Disjunction",
    "FeatureCategory",
    "GrammarError",
    "GrammarSnapshot",
    "PartitionStep",
    "TwoLevelRule",
    "Variable",
    "analyze",
    "cascade",
    "generate",
    "load",
    "load_file",
    "parse_grammar",
    "print_grammar",
    "two_level_analysis",
    "unify_category",
    "unify_value",
]
