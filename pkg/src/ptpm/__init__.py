"""Parametric timed pattern matching over timed words.

Given a log of timestamped actions and a pattern automaton whose timing
constraints may mention unknown parameters, compute every (start, end,
parameter valuation) triple for which the log segment matches, as a finite
union of exact convex polyhedra.
"""

from .engine import (
    EngineOptions,
    MatchSet,
    OptResult,
    efsynth,
    initial_state,
    ptpm,
    ptpm_fixed,
    ptpm_opt,
    successor,
)
from .estimator import ParameterOptimizer, PatternMatcher, check_pattern, check_timed_word
from .model import Edge, GuardAtom, Pta, Segment, TimedWord
from .oracle import brute_force_match_set, membership
from .polyhedron import ConvexPoly, DisjPoly, VarSpace
from .transform import make_symbolic, normalize_pattern, sync_product, tw2pta

__all__ = [
    "ConvexPoly",
    "DisjPoly",
    "Edge",
    "EngineOptions",
    "GuardAtom",
    "MatchSet",
    "OptResult",
    "ParameterOptimizer",
    "PatternMatcher",
    "Pta",
    "Segment",
    "TimedWord",
    "VarSpace",
    "brute_force_match_set",
    "check_pattern",
    "check_timed_word",
    "efsynth",
    "initial_state",
    "make_symbolic",
    "membership",
    "normalize_pattern",
    "ptpm",
    "ptpm_fixed",
    "ptpm_opt",
    "successor",
    "sync_product",
    "tw2pta",
]
