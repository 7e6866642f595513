"""scikit-learn style wrappers around the matcher and the optimizer."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import patterns
from .engine import MAX, MIN, EngineOptions, ptpm, ptpm_fixed, ptpm_opt
from .io import ParseError, parse_pattern, parse_word, pattern_from_dict
from .model import Pta, TimedWord, as_rational
from .polyhedron import contains_point


def check_timed_word(word: Any) -> TimedWord:
    """A TimedWord from a TimedWord, ``(action, time)`` pairs or .tw text."""
    if isinstance(word, TimedWord):
        return word
    if isinstance(word, str):
        return parse_word(word)
    try:
        pairs = [(a, as_rational(t)) for a, t in word]
    except (TypeError, ValueError) as exc:
        raise ValueError(f"expected a timed word or (action, time) pairs: {exc}") from None
    return TimedWord(pairs)


def check_pattern(pattern: Any) -> Pta:
    """A Pta from a Pta, a built-in name, a JSON document or its text."""
    if isinstance(pattern, Pta):
        return pattern
    if isinstance(pattern, str):
        if pattern in patterns.BUILTIN:
            return patterns.BUILTIN[pattern]()
        return parse_pattern(pattern)
    if isinstance(pattern, Mapping):
        return pattern_from_dict(dict(pattern))
    raise ValueError(f"cannot interpret {type(pattern).__name__} as a pattern")


def _check_fitted(est, attr: str) -> None:
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


def _points(X, names: tuple[str, ...]) -> list[list[Fraction]]:
    if isinstance(X, Mapping):
        X = [X]
    rows = []
    for row in X:
        if isinstance(row, Mapping):
            missing = [v for v in names if v not in row]
            if missing:
                raise ValueError(f"point misses variables {missing}")
            rows.append([as_rational(row[v]) for v in names])
        else:
            values = [as_rational(x.item() if hasattr(x, "item") else x) for x in row]
            if len(values) != len(names):
                raise ValueError(f"expected {len(names)} coordinates {list(names)}, got {len(values)}")
            rows.append(values)
    return rows


class PatternMatcher(BaseEstimator):
    """Match a pattern against a timed word.

    ``fit(word)`` computes the match set; ``predict(X)`` tells for each point
    (over ``variables_``: the pattern parameters, then ``t`` and ``t_prime``)
    whether it is a match.  With ``valuation`` the parameters are fixed and
    the points are over ``(t, t_prime)`` only.
    """

    def __init__(self, pattern="running", valuation=None, subsumption=False, max_states=None):
        self.pattern = pattern
        self.valuation = valuation
        self.subsumption = subsumption
        self.max_states = max_states

    def fit(self, X, y=None):
        word = check_timed_word(X)
        pta = check_pattern(self.pattern)
        options = EngineOptions(subsumption=self.subsumption, max_states=self.max_states)
        if self.valuation is None:
            m = ptpm(pta, word, options)
        else:
            m = ptpm_fixed(pta, word, self.valuation, options)
        self.match_set_ = m
        self.variables_ = m.space.names
        self.n_states_ = m.states
        self.n_matches_ = m.matches
        return self

    def predict(self, X) -> np.ndarray:
        _check_fitted(self, "match_set_")
        rows = _points(X, self.variables_)
        union = self.match_set_.disjuncts
        return np.array([any(contains_point(d, row) for d in union) for row in rows], dtype=bool)

    def transform(self, X) -> np.ndarray:
        """Per point, the indices of the disjuncts containing it, as 0/1 columns."""
        _check_fitted(self, "match_set_")
        rows = _points(X, self.variables_)
        union = self.match_set_.disjuncts.disjuncts
        out = np.zeros((len(rows), len(union)), dtype=np.int8)
        for i, row in enumerate(rows):
            for j, d in enumerate(union):
                out[i, j] = contains_point(d, row)
        return out


class ParameterOptimizer(BaseEstimator):
    """Smallest or largest value of one parameter over all matches."""

    def __init__(self, pattern="running", parameter="p1", direction=MIN):
        self.pattern = pattern
        self.parameter = parameter
        self.direction = direction

    def fit(self, X, y=None):
        if self.direction not in (MIN, MAX):
            raise ValueError(f"direction must be {MIN!r} or {MAX!r}")
        word = check_timed_word(X)
        pta = check_pattern(self.pattern)
        r = ptpm_opt(pta, word, self.parameter, self.direction)
        self.result_ = r
        self.feasible_ = r.feasible
        self.bound_ = r.bound
        self.strict_ = r.strict
        self.n_states_ = r.states
        return self

    def predict(self, X=None):
        """The optimum as a Fraction (None when unbounded or infeasible)."""
        _check_fitted(self, "result_")
        return self.bound_


__all__ = ["PatternMatcher", "ParameterOptimizer", "check_timed_word", "check_pattern", "ParseError"]
