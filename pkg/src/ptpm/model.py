"""Timed words, segments, guards and parametric timed automata.

Times and constants are :class:`fractions.Fraction` throughout; floats are
accepted at the boundary only through their shortest decimal repr, so
``0.1`` means exactly 1/10.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

Rational = Union[int, Fraction]

TERMINAL = "$"
START = "start"
RESERVED_ACTIONS = frozenset({TERMINAL, START})
GUARD_OPS = ("<", "<=", "=", ">=", ">")


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


def as_rational(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise DomainError(f"not a rational literal: {value!r}") from None
    raise DomainError(f"cannot interpret {value!r} as a rational")


class Event(NamedTuple):
    action: str
    time: Fraction


def _events(pairs: Iterable) -> tuple[Event, ...]:
    return tuple(Event(str(a), as_rational(t)) for a, t in pairs)


@dataclass(frozen=True)
class TimedWord:
    """A log: actions with strictly increasing, strictly positive timestamps."""

    events: tuple[Event, ...] = ()

    def __post_init__(self):
        events = _events(self.events)
        object.__setattr__(self, "events", events)
        previous = Fraction(0)
        for k, (action, time) in enumerate(events, start=1):
            if action in RESERVED_ACTIONS:
                raise DomainError(f"event {k}: action {action!r} is reserved")
            if time <= previous:
                if k == 1:
                    raise DomainError(f"event 1: timestamp {time} is not positive")
                raise DomainError(f"event {k}: timestamp {time} does not exceed {previous}")
            previous = time

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, k):
        return self.events[k]

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(e.action for e in self.events)

    @property
    def timestamps(self) -> tuple[Fraction, ...]:
        return tuple(e.time for e in self.events)

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(self.actions)


@dataclass(frozen=True)
class Segment:
    """A timed word segment terminated by a single ``$`` event."""

    events: tuple[Event, ...]

    def __post_init__(self):
        events = _events(self.events)
        object.__setattr__(self, "events", events)
        if not events or events[-1].action != TERMINAL:
            raise DomainError("a segment ends with the terminal event $")
        if any(e.action == TERMINAL for e in events[:-1]):
            raise DomainError("a segment holds exactly one $ event")
        if any(e.action == START for e in events):
            raise DomainError("action 'start' is reserved")
        if events[0].time < 0:
            raise DomainError("segment timestamps are non-negative")
        if events[-1].time <= 0:
            raise DomainError("the $ event comes strictly after the segment start")
        for k in range(1, len(events)):
            prev, cur = events[k - 1].time, events[k].time
            if cur < prev or (cur == prev and events[k].action != TERMINAL):
                raise DomainError(f"segment event {k + 1}: timestamps must increase")

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


def word_shift(w: TimedWord, t: Rational) -> TimedWord:
    """Add ``t`` to every timestamp."""
    t = as_rational(t)
    if w.events and not -w.events[0].time < t:
        raise DomainError(f"shift {t} would make a timestamp non-positive")
    return TimedWord(tuple(Event(a, tau + t) for a, tau in w.events))


def word_slice(w: TimedWord, i: int, j: int) -> TimedWord:
    """Events ``i..j`` inclusive, 1-based."""
    if not 1 <= i <= j <= len(w):
        raise DomainError(f"slice ({i}, {j}) out of range for a word of length {len(w)}")
    return TimedWord(w.events[i - 1 : j])


def word_concat_absorb(w1: Iterable, w2: Iterable) -> tuple[Event, ...]:
    """Plain concatenation of both event sequences, without any shift.

    The result is a raw event tuple; wrap it in :class:`TimedWord` or
    :class:`Segment` to have it validated.
    """
    return _events(w1) + _events(w2)


def segment_bounds(w: TimedWord, t: Rational, t_end: Rational) -> tuple[int, int]:
    """1-based ``(i, j)`` with ``tau[i-1] < t <= tau[i]`` and ``tau[j] <= t' < tau[j+1]``."""
    times = w.timestamps
    i = bisect.bisect_left(times, as_rational(t)) + 1
    j = bisect.bisect_right(times, as_rational(t_end))
    return i, j


def word_segment(w: TimedWord, t: Rational, t_end: Rational) -> Segment:
    """The events of ``w`` timed in ``[t, t']``, rebased at ``t`` and closed by ``$``."""
    t, t_end = as_rational(t), as_rational(t_end)
    if t < 0:
        raise DomainError(f"segment start {t} is negative")
    if not t < t_end:
        raise DomainError(f"segment start {t} must precede its end {t_end}")
    i, j = segment_bounds(w, t, t_end)
    inner = tuple(Event(a, tau - t) for a, tau in w.events[i - 1 : j])
    return Segment(word_concat_absorb(inner, [(TERMINAL, t_end - t)]))


@dataclass(frozen=True)
class GuardAtom:
    """``clock op rhs`` where rhs is a non-negative constant or a parameter name."""

    clock: str
    op: str
    rhs: Union[Fraction, str]

    def __post_init__(self):
        if self.op not in GUARD_OPS:
            raise DomainError(f"guard operator must be one of {GUARD_OPS}, got {self.op!r}")
        if not isinstance(self.rhs, str):
            value = as_rational(self.rhs)
            if value < 0:
                raise DomainError(f"guard constant {value} is negative")
            object.__setattr__(self, "rhs", value)

    @property
    def is_parametric(self) -> bool:
        return isinstance(self.rhs, str)

    def __str__(self) -> str:
        rhs = self.rhs if isinstance(self.rhs, str) else _fmt(self.rhs)
        return f"{self.clock} {self.op} {rhs}"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


Guard = tuple[GuardAtom, ...]


def _compare(lhs: Fraction, op: str, rhs: Fraction) -> bool:
    if op == "<":
        return lhs < rhs
    if op == "<=":
        return lhs <= rhs
    if op == "=":
        return lhs == rhs
    if op == ">=":
        return lhs >= rhs
    return lhs > rhs


def guard_sat(
    guard: Iterable[GuardAtom],
    clocks: Mapping[str, Rational],
    params: Mapping[str, Rational] | None = None,
) -> bool:
    """Whether the clock and parameter valuations satisfy every atom."""
    params = params or {}
    result = True
    for atom in guard:
        try:
            lhs = as_rational(clocks[atom.clock])
        except KeyError:
            raise DomainError(f"clock {atom.clock!r} has no value") from None
        if atom.is_parametric:
            try:
                rhs = as_rational(params[atom.rhs])
            except KeyError:
                raise DomainError(f"parameter {atom.rhs!r} has no value") from None
        else:
            rhs = atom.rhs
        if not _compare(lhs, atom.op, rhs):
            result = False
    return result


@dataclass(frozen=True)
class Edge:
    source: str
    action: str
    target: str
    guard: Guard = ()
    resets: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "guard", tuple(self.guard))
        object.__setattr__(self, "resets", frozenset(self.resets))


@dataclass(frozen=True)
class Pta:
    """Parametric timed automaton.

    ``invariants`` maps a location to a conjunction of guard atoms; locations
    missing from the map carry the trivial invariant.
    """

    alphabet: frozenset[str]
    locations: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    clocks: tuple[str, ...]
    parameters: tuple[str, ...]
    invariants: Mapping[str, Guard]
    edges: tuple[Edge, ...]
    _out: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "alphabet", frozenset(self.alphabet))
        set_(self, "locations", tuple(self.locations))
        set_(self, "accepting", frozenset(self.accepting))
        set_(self, "clocks", tuple(self.clocks))
        set_(self, "parameters", tuple(self.parameters))
        set_(self, "invariants", {loc: tuple(g) for loc, g in self.invariants.items() if g})
        set_(self, "edges", tuple(self.edges))
        locs = set(self.locations)
        if len(locs) != len(self.locations):
            raise DomainError("duplicate location names")
        if self.initial not in locs:
            raise DomainError(f"initial location {self.initial!r} is not declared")
        if not self.accepting <= locs:
            raise DomainError(f"undeclared accepting locations {sorted(self.accepting - locs)}")
        if set(self.clocks) & set(self.parameters):
            raise DomainError("a name is used both as clock and parameter")
        for loc, guard in self.invariants.items():
            if loc not in locs:
                raise DomainError(f"invariant on undeclared location {loc!r}")
            self._check_guard(guard, f"invariant of {loc!r}")
        allowed = self.alphabet | RESERVED_ACTIONS
        out: dict[str, list[Edge]] = {loc: [] for loc in self.locations}
        for e in self.edges:
            if e.source not in locs or e.target not in locs:
                raise DomainError(f"edge {e.source!r} -> {e.target!r} has an undeclared endpoint")
            if e.action not in allowed:
                raise DomainError(f"edge action {e.action!r} is not in the alphabet")
            if not e.resets <= set(self.clocks):
                raise DomainError(f"edge resets undeclared clocks {sorted(e.resets - set(self.clocks))}")
            self._check_guard(e.guard, f"guard of edge {e.source!r} -> {e.target!r}")
            out[e.source].append(e)
        set_(self, "_out", {loc: tuple(es) for loc, es in out.items()})

    def _check_guard(self, guard: Guard, where: str) -> None:
        for atom in guard:
            if atom.clock not in self.clocks:
                raise DomainError(f"{where}: undeclared clock {atom.clock!r}")
            if atom.is_parametric and atom.rhs not in self.parameters:
                raise DomainError(f"{where}: undeclared parameter {atom.rhs!r}")

    def edges_from(self, loc: str) -> tuple[Edge, ...]:
        return self._out[loc]

    def invariant(self, loc: str) -> Guard:
        return self.invariants.get(loc, ())

    def is_accepting(self, loc: str) -> bool:
        return loc in self.accepting

    def replace(self, **changes) -> "Pta":
        fields = dict(
            alphabet=self.alphabet,
            locations=self.locations,
            initial=self.initial,
            accepting=self.accepting,
            clocks=self.clocks,
            parameters=self.parameters,
            invariants=self.invariants,
            edges=self.edges,
        )
        fields.update(changes)
        return Pta(**fields)


def check_valuation(pta: Pta, valuation: Mapping[str, Rational]) -> dict[str, Fraction]:
    """Validate a total, non-negative parameter valuation for ``pta``."""
    missing = [p for p in pta.parameters if p not in valuation]
    if missing:
        raise DomainError(f"valuation misses parameters {missing}")
    values = {}
    for p in pta.parameters:
        v = as_rational(valuation[p])
        if v < 0:
            raise DomainError(f"parameter {p} = {v} is negative")
        values[p] = v
    return values


def valuate_pta(pta: Pta, valuation: Mapping[str, Rational]) -> Pta:
    """Replace every parameter occurrence by its value."""
    values = check_valuation(pta, valuation)

    def fix(guard: Guard) -> Guard:
        return tuple(
            GuardAtom(a.clock, a.op, values[a.rhs]) if a.is_parametric else a for a in guard
        )

    return pta.replace(
        parameters=(),
        invariants={loc: fix(g) for loc, g in pta.invariants.items()},
        edges=tuple(
            Edge(e.source, e.action, e.target, fix(e.guard), e.resets) for e in pta.edges
        ),
    )
