"""Reachability synthesis over the parametric zone graph, the matching
pipeline and its branch-and-bound optimizing variant."""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Collection, Iterable, Mapping, NamedTuple, Union

from .model import DomainError, as_rational, Edge, GuardAtom, Pta, TimedWord, valuate_pta
from .polyhedron import (
    EQ,
    LE,
    LT,
    Bound,
    ConvexPoly,
    DisjPoly,
    LinAtom,
    VarSpace,
    _eliminate,
    _elapse_system,
    _norm,
    _read_bounds,
    _simplify,
    _system_includes,
    analyze,
    includes,
    is_empty,
    substitute,
)
from .transform import (
    END_PARAM,
    START_PARAM,
    SyncProduct,
    make_alphabet,
    make_symbolic,
    normalize_pattern,
    sync_product,
    tw2pta,
)

MIN = "min"
MAX = "max"
DEFAULT_CEILING = 1_000_000


class StateLimitError(RuntimeError):
    """Exploration generated more symbolic states than allowed."""


class EmptyInitialStateError(DomainError):
    """The initial location's invariant rules out the all-zero clock valuation."""


@dataclass(frozen=True)
class EngineOptions:
    """``subsumption`` None picks the per-entry-point default."""

    subsumption: bool | None = None
    max_states: int | None = None
    collect_stats: bool = True


class SymbolicState(NamedTuple):
    locs: tuple
    zone: ConvexPoly


@dataclass
class MatchSet:
    space: VarSpace
    disjuncts: DisjPoly
    states: int = 0
    comp_seconds: float = 0.0

    @property
    def matches(self) -> int:
        return len(self.disjuncts)

    @property
    def stats(self) -> dict:
        return {"states": self.states, "matches": self.matches, "comp_seconds": self.comp_seconds}

    def at(self, valuation: Mapping) -> DisjPoly:
        """The (t, t') match set for fixed values of the other variables."""
        return fix_variables(self.disjuncts, valuation)


@dataclass
class OptResult:
    feasible: bool
    bound: Fraction | None
    strict: bool
    direction: str
    parameter: str
    states: int = 0
    comp_seconds: float = 0.0

    @property
    def unbounded(self) -> bool:
        return self.feasible and self.bound is None


Automaton = Union[Pta, SyncProduct]


def fix_variables(union: DisjPoly, valuation: Mapping) -> DisjPoly:
    """Substitute every named value; empty disjuncts are dropped."""
    names = [v for v in union.space.names if v in valuation]
    space = union.space.subspace(v for v in union.space.names if v not in valuation)
    out = []
    for d in union.disjuncts:
        for name in names:
            d = substitute(d, name, as_rational(valuation[name]))
        if not is_empty(d):
            out.append(d)
    return DisjPoly(space, out)


def _guard_row(atom: GuardAtom, space: VarSpace) -> LinAtom:
    n = len(space)
    coeffs = [0] * n
    x = space.index(atom.clock)
    if atom.is_parametric:
        scale, const = 1, 0
        coeffs[space.index(atom.rhs)] = -1
    else:
        value = atom.rhs
        scale, const = value.denominator, -value.numerator
    coeffs[x] += scale
    op = atom.op
    if op in (">=", ">"):
        coeffs = [-c for c in coeffs]
        const = -const
    rel = {"<": LT, ">": LT, "<=": LE, ">=": LE, "=": EQ}[op]
    return _norm(tuple(coeffs), const, rel)


class _Compiled(NamedTuple):
    edge: Edge
    guard: tuple
    resets: tuple
    zeros: tuple
    invariant: tuple


class Explorer:
    """Symbolic successor computation for one automaton (plain or product)."""

    def __init__(self, automaton: Automaton):
        self.automaton = automaton
        self.space = VarSpace.of(automaton.clocks, automaton.parameters)
        self.n = len(self.space)
        self.clock_idx = tuple(range(len(automaton.clocks)))
        self.param_idx = tuple(range(len(automaton.clocks), self.n))
        self.param_space = self.space.subspace(automaton.parameters)
        self._edges: dict[int, _Compiled] = {}
        self._invariants: dict = {}

    def rows(self, guard: Iterable[GuardAtom]) -> tuple[LinAtom, ...]:
        return tuple(_guard_row(a, self.space) for a in guard)

    def invariant_rows(self, locs) -> tuple[LinAtom, ...]:
        rows = self._invariants.get(locs)
        if rows is None:
            rows = self.rows(self.automaton.invariant(locs))
            self._invariants[locs] = rows
        return rows

    def _compile(self, edge: Edge) -> _Compiled:
        c = self._edges.get(id(edge))
        if c is None or c.edge is not edge:
            resets = tuple(sorted(self.space.index(x) for x in edge.resets))
            zeros = tuple(
                LinAtom(tuple(1 if j == i else 0 for j in range(self.n)), 0, EQ) for i in resets
            )
            c = _Compiled(edge, self.rows(edge.guard), resets, zeros, self.invariant_rows(edge.target))
            self._edges[id(edge)] = c
        return c

    def initial(self):
        """``(system, witness)`` of the initial symbolic state."""
        n = self.n
        zero = tuple(LinAtom(tuple(1 if j == i else 0 for j in range(n)), 0, EQ) for i in self.clock_idx)
        nonneg = tuple(
            LinAtom(tuple(-1 if j == i else 0 for j in range(n)), 0, LE) for i in self.param_idx
        )
        inv = self.invariant_rows(self.automaton.initial)
        system = _simplify(zero + nonneg + inv, n)
        if system is not None:
            system = _elapse_system(system, self.clock_idx, n)
        result = analyze(system + inv, n) if system is not None else None
        if result is None:
            raise EmptyInitialStateError("the initial location's invariant is unsatisfiable at time 0")
        return result

    def step(self, system: tuple, edge: Edge):
        """``(system, witness)`` after firing ``edge`` and letting time pass, or None."""
        n = self.n
        c = self._compile(edge)
        sys1 = _simplify(system + c.guard, n)
        if sys1 is None:
            return None
        if c.resets:
            sys1 = _eliminate(sys1, c.resets, n)
            if sys1 is None:
                return None
        if c.zeros or c.invariant:
            sys1 = _simplify(c.zeros + sys1 + c.invariant, n)
            if sys1 is None:
                return None
        sys2 = _elapse_system(sys1, self.clock_idx, n)
        if sys2 is None:
            return None
        return analyze(sys2 + c.invariant, n)

    def parameter_shadow(self, system: tuple) -> ConvexPoly:
        """Projection of a zone onto the parameters, over the parameter space."""
        shadow = _eliminate(system, self.clock_idx, self.n)
        keep = self.param_idx
        return ConvexPoly(
            self.param_space,
            (_norm(tuple(a.coeffs[i] for i in keep), a.const, a.rel) for a in shadow),
        )

    def state(self, locs, system) -> SymbolicState:
        return SymbolicState(locs, ConvexPoly(self.space, system))


def initial_state(automaton: Automaton) -> SymbolicState:
    ex = Explorer(automaton)
    system, _ = ex.initial()
    return ex.state(automaton.initial, system)


def successor(automaton: Automaton, state: SymbolicState, edge: Edge) -> SymbolicState | None:
    if edge.source != state.locs:
        raise DomainError(f"edge leaves {edge.source!r}, not {state.locs!r}")
    ex = Explorer(automaton)
    if state.zone.space != ex.space:
        raise DomainError("zone is not over the automaton's clocks and parameters")
    system = _simplify(state.zone.atoms, ex.n)
    if system is None:
        raise DomainError("symbolic states carry non-empty zones")
    out = ex.step(system, edge)
    if out is None:
        return None
    return ex.state(edge.target, out[0])


class _Visited:
    """Semantic visited set: same locations and mutually including zones.

    Zones denoting the same set share their canonical witness, so only
    zones in the same (locations, witness) bucket need an inclusion test.
    """

    def __init__(self, n: int):
        self.n = n
        self.exact: dict = {}
        self.buckets: dict = {}

    def add(self, locs, system, witness, rank=None) -> bool:
        key = (locs, system)
        if key in self.exact:
            return False
        bkey = (locs, witness)
        bucket = self.buckets.get(bkey)
        if bucket is not None:
            n = self.n
            for other in bucket:
                if _system_includes(other, system, n) and _system_includes(system, other, n):
                    return False
            bucket.append(system)
        else:
            self.buckets[bkey] = [system]
        self.exact[key] = rank
        return True

    def forget_below(self, rank) -> None:
        """Drop entries whose rank is below ``rank`` (they cannot recur)."""
        stale = [k for k, r in self.exact.items() if r is not None and r < rank]
        for key in stale:
            del self.exact[key]
        self.buckets = {
            k: v for k, v in self.buckets.items() if any((k[0], s) in self.exact for s in v)
        }


def _accepting_predicate(automaton: Automaton, accepting) -> Callable:
    if accepting is None:
        return automaton.is_accepting
    if callable(accepting):
        return accepting
    accepting = frozenset(accepting)
    return accepting.__contains__


def _explore(
    automaton: Automaton,
    accepting,
    options: EngineOptions,
    progress: Callable | None,
    on_accept: Callable,
    prune: Callable | None = None,
) -> int:
    """Worklist exploration; returns the number of symbolic states generated.

    With ``progress`` (a rank that never decreases along edges) states are
    processed in rank order, breadth-first within a rank, and visited
    entries of finished ranks are released.
    """
    ex = Explorer(automaton)
    is_final = _accepting_predicate(automaton, accepting)
    ceiling = options.max_states
    visited = _Visited(ex.n)
    system, witness = ex.initial()
    rank_of = progress if progress is not None else (lambda locs: 0)
    queues: dict[int, deque] = {}
    ranks: list[int] = []

    def push(locs, system, witness) -> bool:
        r = rank_of(locs)
        if not visited.add(locs, system, witness, r):
            return False
        q = queues.get(r)
        if q is None:
            q = queues[r] = deque()
            ranks.append(r)
        q.append((locs, system))
        return True

    states = 0
    push(automaton.initial, system, witness)
    states += 1
    current = None
    while ranks:
        r = min(ranks)
        if current is not None and r != current and progress is not None:
            visited.forget_below(r)
        current = r
        q = queues[r]
        while q:
            locs, system = q.popleft()
            if is_final(locs):
                on_accept(ex, locs, system)
                continue
            if prune is not None and prune(ex, system):
                continue
            for edge in automaton.edges_from(locs):
                out = ex.step(system, edge)
                if out is None:
                    continue
                if push(edge.target, out[0], out[1]):
                    states += 1
                    if ceiling is not None and states > ceiling:
                        raise StateLimitError(f"more than {ceiling} symbolic states")
        del queues[r]
        ranks.remove(r)
    return states


def _synthesize(automaton, accepting, options, progress, subsumption) -> tuple[DisjPoly, int]:
    param_space = VarSpace.of(automaton.clocks, automaton.parameters).subspace(automaton.parameters)
    found: list[ConvexPoly] = []

    def on_accept(ex: Explorer, locs, system):
        shadow = ex.parameter_shadow(system)
        if subsumption:
            if any(includes(d, shadow) for d in found):
                return
            found[:] = [d for d in found if not includes(shadow, d)]
        found.append(shadow)

    states = _explore(automaton, accepting, options, progress, on_accept)
    return DisjPoly(param_space, found), states


def efsynth(
    automaton: Automaton,
    accepting: Collection | Callable | None = None,
    options: EngineOptions | None = None,
    *,
    progress: Callable | None = None,
) -> DisjPoly:
    """Parameter valuations for which an accepting location is reachable.

    ``accepting`` defaults to the automaton's own accepting locations.
    Subsumption defaults to on; the state ceiling to one million.
    """
    return efsynth_stats(automaton, accepting, options, progress=progress)[0]


def efsynth_stats(automaton, accepting=None, options=None, *, progress=None) -> tuple[DisjPoly, int]:
    options = options or EngineOptions()
    if options.max_states is None:
        options = EngineOptions(options.subsumption, DEFAULT_CEILING, options.collect_stats)
    subsumption = True if options.subsumption is None else options.subsumption
    return _synthesize(automaton, accepting, options, progress, subsumption)


def build_pipeline(pattern: Pta, w: TimedWord) -> tuple[SyncProduct, Callable]:
    """Product of the symbolic pattern and the word automaton, plus its rank."""
    sigma = make_alphabet(set(pattern.alphabet) | set(w.alphabet))
    symbolic = make_symbolic(normalize_pattern(pattern, sigma), sigma)
    word = tw2pta(w, sigma)
    index = {loc: k for k, loc in enumerate(word.locations)}
    product = sync_product([symbolic, word])
    return product, lambda locs: index[locs[1]]


def _result_space(pattern: Pta) -> VarSpace:
    return VarSpace.of((), pattern.parameters + (START_PARAM, END_PARAM))


def ptpm(pattern: Pta, w: TimedWord, options: EngineOptions | None = None) -> MatchSet:
    """All (t, t', valuation) such that the segment of ``w`` over [t, t'] matches."""
    options = options or EngineOptions()
    subsumption = bool(options.subsumption)
    start = time.perf_counter()
    product, rank = build_pipeline(pattern, w)
    found, states = _synthesize(product, None, options, rank, subsumption)
    space = _result_space(pattern)
    if found.space != space:
        raise AssertionError("pipeline parameter order changed")
    elapsed = time.perf_counter() - start if options.collect_stats else 0.0
    return MatchSet(space, found, states, elapsed)


def ptpm_fixed(
    pattern: Pta,
    w: TimedWord,
    valuation: Mapping,
    options: EngineOptions | None = None,
) -> MatchSet:
    """Match set in (t, t') for one parameter valuation."""
    return ptpm(valuate_pta(pattern, valuation), w, options)


def _better(candidate: Bound, incumbent: Bound | None, direction: str) -> bool:
    """Whether ``candidate`` strictly improves on ``incumbent``."""
    if incumbent is None:
        return True
    if direction == MAX:
        if incumbent.value is None:
            return False
        if candidate.value is None:
            return True
        if candidate.value != incumbent.value:
            return candidate.value > incumbent.value
    else:
        if candidate.value is None:
            return incumbent.value is not None
        if incumbent.value is None:
            return False
        if candidate.value != incumbent.value:
            return candidate.value < incumbent.value
    return incumbent.strict and not candidate.strict


def ptpm_opt(
    pattern: Pta,
    w: TimedWord,
    parameter: str,
    direction: str = MIN,
    options: EngineOptions | None = None,
) -> OptResult:
    """Best value of one parameter over all matches, with pruning.

    A branch is cut when the parameter's range over its zone cannot strictly
    improve the incumbent; the parameter range only shrinks along a path.
    """
    if direction not in (MIN, MAX):
        raise DomainError(f"direction must be {MIN!r} or {MAX!r}, got {direction!r}")
    if parameter not in pattern.parameters:
        raise DomainError(f"unknown parameter {parameter!r}")
    options = options or EngineOptions()
    start = time.perf_counter()
    product, rank = build_pipeline(pattern, w)
    k = len(product.clocks) + product.parameters.index(parameter)
    others: list = []
    best: list = [None]

    def extreme(ex: Explorer, system) -> Bound:
        if not others:
            others.append(tuple(i for i in range(ex.n) if i != k))
        shadow = _eliminate(system, others[0], ex.n)
        lower, upper = _read_bounds(shadow, k)
        return lower if direction == MIN else upper

    def on_accept(ex, locs, system):
        b = extreme(ex, system)
        if _better(b, best[0], direction):
            best[0] = b

    def prune(ex, system) -> bool:
        return best[0] is not None and not _better(extreme(ex, system), best[0], direction)

    states = _explore(product, None, options, rank, on_accept, prune)
    elapsed = time.perf_counter() - start if options.collect_stats else 0.0
    b = best[0]
    if b is None:
        return OptResult(False, None, False, direction, parameter, states, elapsed)
    return OptResult(True, b.value, b.strict and b.value is not None, direction, parameter, states, elapsed)
