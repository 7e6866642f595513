"""Brute-force semantics used to cross-check the symbolic engine.

Nothing here touches zones: runs are simulated on concrete clock values,
and the fixed-valuation match set is assembled path by path, each path
contributing one convex region over (t, t_prime).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Mapping, NamedTuple

from .model import (
    TERMINAL,
    DomainError,
    Pta,
    Segment,
    TimedWord,
    check_valuation,
    guard_sat,
    valuate_pta,
)
from .polyhedron import EQ, LE, LT, ConvexPoly, DisjPoly, VarSpace, make_atom
from .transform import END_PARAM, START_PARAM

MATCH_SPACE = VarSpace.of((), (START_PARAM, END_PARAM))


class ConcreteState(NamedTuple):
    loc: str
    clocks: tuple[tuple[str, Fraction], ...]

    @property
    def valuation(self) -> dict[str, Fraction]:
        return dict(self.clocks)


def _require_parameter_free(pta: Pta) -> None:
    if pta.parameters:
        raise DomainError(f"automaton still has parameters {list(pta.parameters)}")


def membership(segment: Segment, pta: Pta) -> bool:
    """Whether some run of the parameter-free ``pta`` reads ``segment`` into F."""
    _require_parameter_free(pta)
    zero = tuple((c, Fraction(0)) for c in pta.clocks)
    if not guard_sat(pta.invariant(pta.initial), dict(zero)):
        return False
    current = {ConcreteState(pta.initial, zero)}
    now = Fraction(0)
    for action, when in segment:
        delay = when - now
        now = when
        following = set()
        for state in current:
            loc = state.loc
            inv = pta.invariant(loc)
            moved = {c: v + delay for c, v in state.clocks}
            # invariants are convex, so holding at both ends covers the delay
            if not guard_sat(inv, moved):
                continue
            for edge in pta.edges_from(loc):
                if edge.action != action or not guard_sat(edge.guard, moved):
                    continue
                after = tuple(
                    (c, Fraction(0) if c in edge.resets else moved[c]) for c in pta.clocks
                )
                if guard_sat(pta.invariant(edge.target), dict(after)):
                    following.add(ConcreteState(edge.target, after))
        current = following
        if not current:
            return False
    return any(pta.is_accepting(s.loc) for s in current)


# ---------------------------------------------------------------------------
# Fixed-valuation match set by path enumeration.
#
# Along a path, each clock equals (T - r) where T is the absolute time and r
# its last reset: either the start time t (symbolic) or an event timestamp.
# Every guard and invariant check is therefore linear in (t, t_prime).


# A time expression is a Fraction (an event timestamp) or one of the two
# symbols below.
AT_START = "start"
AT_END = "end"


def _time_terms(expr) -> tuple[dict[str, Fraction], Fraction]:
    if expr == AT_START:
        return {START_PARAM: Fraction(1)}, Fraction(0)
    if expr == AT_END:
        return {END_PARAM: Fraction(1)}, Fraction(0)
    return {}, Fraction(expr)


def _clock_atom(origin, now, op: str, bound: Fraction):
    """Atom for ``(now - origin) op bound`` over (t, t_prime)."""
    coeffs, const = _time_terms(now)
    minus, shift = _time_terms(origin)
    for k, v in minus.items():
        coeffs[k] = coeffs.get(k, Fraction(0)) - v
    const -= shift + bound
    if op in (">", ">="):
        coeffs = {k: -v for k, v in coeffs.items()}
        const = -const
    rel = {"<": LT, ">": LT, "<=": LE, ">=": LE, "=": EQ}[op]
    return make_atom(MATCH_SPACE, coeffs, const, rel)


def _guard_atoms(guard, origins: Mapping[str, object], now) -> list:
    return [_clock_atom(origins[a.clock], now, a.op, a.rhs) for a in guard]


def _window_box(times: tuple[Fraction, ...], i: int, j: int) -> list:
    """``tau[i-1] < t <= tau[i]``, ``tau[j] <= t' < tau[j+1]`` (1-based), ``0 <= t < t'``."""
    n = len(times)
    atoms = [
        make_atom(MATCH_SPACE, {START_PARAM: -1}, 0, LE),
        make_atom(MATCH_SPACE, {START_PARAM: 1, END_PARAM: -1}, 0, LT),
    ]
    if i >= 2:
        atoms.append(make_atom(MATCH_SPACE, {START_PARAM: -1}, times[i - 2], LT))
    if i <= n:
        atoms.append(make_atom(MATCH_SPACE, {START_PARAM: 1}, -times[i - 1], LE))
    if j >= 1:
        atoms.append(make_atom(MATCH_SPACE, {END_PARAM: -1}, times[j - 1], LE))
    if j < n:
        atoms.append(make_atom(MATCH_SPACE, {END_PARAM: 1}, -times[j], LT))
    return atoms


def _paths(pta: Pta, events, times) -> Iterator[list]:
    """Constraint lists of every edge path reading ``events`` then ``$`` into F.

    Invariants are checked when a location is entered and when it is left,
    which suffices because they are convex.
    """

    def fire(edge, origins, now, atoms):
        after = {c: (now if c in edge.resets else r) for c, r in origins.items()}
        return after, atoms + _guard_atoms(pta.invariant(edge.target), after, now)

    def walk(loc, k, origins, atoms):
        if k == len(events):
            now, wanted = AT_END, TERMINAL
        else:
            now, wanted = times[k], events[k]
        leave = atoms + _guard_atoms(pta.invariant(loc), origins, now)
        for edge in pta.edges_from(loc):
            if edge.action != wanted:
                continue
            here = leave + _guard_atoms(edge.guard, origins, now)
            after, here = fire(edge, origins, now, here)
            if k == len(events):
                if pta.is_accepting(edge.target):
                    yield here
            else:
                yield from walk(edge.target, k + 1, after, here)

    origins = {c: AT_START for c in pta.clocks}
    yield from walk(pta.initial, 0, origins, _guard_atoms(pta.invariant(pta.initial), origins, AT_START))


def brute_force_match_set(w: TimedWord, pattern: Pta, valuation: Mapping) -> DisjPoly:
    """All (t, t_prime) whose segment the valuated pattern accepts, as a union."""
    check_valuation(pattern, valuation)
    pta = valuate_pta(pattern, valuation)
    times = w.timestamps
    actions = w.actions
    n = len(w)
    found = []
    for i in range(1, n + 2):
        for j in range(i - 1, n + 1):
            box = _window_box(times, i, j)
            window = actions[i - 1 : j]
            for atoms in _paths(pta, window, times[i - 1 : j]):
                poly = ConvexPoly(MATCH_SPACE, box + atoms)
                if not poly.is_empty():
                    found.append(poly)
    return DisjPoly(MATCH_SPACE, found)
