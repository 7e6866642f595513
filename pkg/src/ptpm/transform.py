"""Pattern normalization, the symbolic-pattern and word-automaton
constructions, and the strong-broadcast synchronized product."""

from __future__ import annotations

from itertools import product as cartesian
from typing import Iterable, Sequence

from .model import (
    START,
    TERMINAL,
    DomainError,
    Edge,
    GuardAtom,
    Pta,
    TimedWord,
    guard_sat,
)

ABS_CLOCK = "x_abs"
START_PARAM = "t"
END_PARAM = "t_prime"


class PatternError(ValueError):
    """The pattern cannot be put in the shape the matcher needs."""


def make_alphabet(actions: Iterable[str]) -> frozenset[str]:
    """Word alphabet: the given actions minus the reserved ones."""
    return frozenset(actions) - {TERMINAL, START}


def _fresh(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    name = base
    k = 1
    while name in taken:
        name = f"{base}_{k}"
        k += 1
    return name


def normalize_pattern(pattern: Pta, sigma: Iterable[str]) -> Pta:
    """Single final location entered only by ``$``; no foreign actions.

    Edges whose action is outside ``sigma`` plus ``$`` are deleted.  When the
    pattern already has one accepting location, entered only through ``$``
    edges, without invariant and not initial, it is kept; otherwise a fresh
    final location receives every ``$`` edge that used to reach an accepting
    location.  Invariants of accepting locations move onto those ``$`` edges.
    The declared alphabet becomes ``sigma`` plus ``$``.
    """
    sigma = make_alphabet(sigma)
    if not pattern.accepting:
        raise PatternError("the pattern has no accepting location")
    allowed = sigma | {TERMINAL}
    edges = [e for e in pattern.edges if e.action in allowed]
    for e in edges:
        if e.target in pattern.accepting and e.action != TERMINAL:
            raise PatternError(
                f"edge {e.source!r} -{e.action}-> {e.target!r} enters an accepting "
                "location without reading $"
            )

    keep_final = None
    if len(pattern.accepting) == 1:
        (only,) = pattern.accepting
        if only != pattern.initial and not pattern.invariant(only):
            keep_final = only
    if keep_final is not None:
        final = keep_final
        locations = pattern.locations
    else:
        final = _fresh("final", pattern.locations)
        locations = pattern.locations + (final,)

    new_edges = []
    for e in edges:
        if e.source in pattern.accepting and e.source == keep_final:
            continue  # nothing is read after $
        if e.action == TERMINAL and e.target in pattern.accepting:
            guard = e.guard + _invariant_as_guard(pattern, e)
            if guard is None:
                continue
            new_edges.append(Edge(e.source, TERMINAL, final, guard, e.resets))
        else:
            new_edges.append(e)
    invariants = {loc: g for loc, g in pattern.invariants.items() if loc != keep_final}
    return Pta(
        alphabet=sigma | {TERMINAL},
        locations=locations,
        initial=pattern.initial,
        accepting=frozenset({final}),
        clocks=pattern.clocks,
        parameters=pattern.parameters,
        invariants=invariants,
        edges=tuple(new_edges),
    )


def _invariant_as_guard(pattern: Pta, edge: Edge):
    """The target invariant evaluated right after ``edge`` fires, as a guard."""
    out = []
    for atom in pattern.invariant(edge.target):
        if atom.clock not in edge.resets:
            out.append(atom)
        elif atom.is_parametric:
            raise PatternError(
                f"invariant {atom} of accepting location {edge.target!r} constrains a "
                "clock reset by its $ edge against a parameter"
            )
        elif not _zero_satisfies(atom):
            return None
    return tuple(out)


def _zero_satisfies(atom: GuardAtom) -> bool:
    return guard_sat((atom,), {atom.clock: 0})


def make_symbolic(pattern: Pta, sigma: Iterable[str], reuse_clock: bool = False) -> Pta:
    """Let a normalized pattern start anytime and record its start and end.

    Adds parameters ``t`` and ``t_prime``, the shared never-reset clock
    ``x_abs``, a helper clock (fresh unless ``reuse_clock`` finds a pattern
    clock reset on every initial edge), two pre-initial locations and one
    post-final location, which becomes the only accepting one.  ``$`` edges
    get ``x_abs = t_prime`` and ``x_abs > t`` (a segment has positive length)
    and reset the helper clock.
    """
    sigma = sorted(make_alphabet(sigma))
    if len(pattern.accepting) != 1:
        raise PatternError("normalize the pattern first: one accepting location expected")
    (final,) = pattern.accepting
    for name in (START_PARAM, END_PARAM, ABS_CLOCK):
        if name in pattern.parameters or name in pattern.clocks:
            raise PatternError(f"name {name!r} is reserved for the matcher")
    names = set(pattern.clocks) | set(pattern.parameters) | {ABS_CLOCK, START_PARAM, END_PARAM}

    helper = None
    if reuse_clock and pattern.clocks:
        initial_edges = pattern.edges_from(pattern.initial)
        for c in pattern.clocks:
            if initial_edges and all(c in e.resets for e in initial_edges):
                helper = c
                break
    clocks = pattern.clocks
    if helper is None:
        helper = _fresh("x_new", names)
        clocks = clocks + (helper,)
    all_clocks = (ABS_CLOCK,) + clocks
    local = frozenset(clocks)

    l0 = pattern.initial
    skip_first = _fresh(f"{l0}''", pattern.locations)
    skip = _fresh(f"{l0}'", set(pattern.locations) | {skip_first})
    post = _fresh(f"{final}_post", set(pattern.locations) | {skip_first, skip})
    end_action = _fresh("end", set(sigma) | {TERMINAL, START})

    reset_helper = frozenset({helper})
    edges = [Edge(skip_first, a, skip, (), reset_helper) for a in sigma]
    edges += [Edge(skip, a, skip, (), reset_helper) for a in sigma]
    edges.append(
        Edge(
            skip,
            START,
            l0,
            (GuardAtom(ABS_CLOCK, "=", START_PARAM), GuardAtom(helper, ">", 0)),
            local,
        )
    )
    edges.append(Edge(skip_first, START, l0, (GuardAtom(ABS_CLOCK, "=", START_PARAM),), local))
    for e in pattern.edges:
        if e.action == TERMINAL:
            guard = e.guard + (
                GuardAtom(ABS_CLOCK, "=", END_PARAM),
                GuardAtom(ABS_CLOCK, ">", START_PARAM),
            )
            edges.append(Edge(e.source, e.action, e.target, guard, e.resets | reset_helper))
        elif e.source != final:
            edges.append(e)
    edges.append(Edge(final, end_action, post, (GuardAtom(helper, ">", 0),), frozenset()))

    return Pta(
        alphabet=frozenset(sigma) | {TERMINAL, START, end_action},
        locations=(skip_first, skip) + pattern.locations + (post,),
        initial=skip_first,
        accepting=frozenset({post}),
        clocks=all_clocks,
        parameters=pattern.parameters + (START_PARAM, END_PARAM),
        invariants=dict(pattern.invariants),
        edges=tuple(edges),
    )


def word_location(k: int) -> str:
    return f"w{k}"


def tw2pta(w: TimedWord, alphabet: Iterable[str] | None = None) -> Pta:
    """The word as a linear automaton over the shared absolute clock.

    Location ``w{k}`` is reached by reading event ``k`` exactly at its
    timestamp, and may only be left before the next timestamp.  Declaring a
    wider ``alphabet`` than the word's own actions blocks the other actions
    in a product.
    """
    n = len(w)
    locations = tuple(word_location(k) for k in range(n + 1))
    edges = tuple(
        Edge(locations[k - 1], a, locations[k], (GuardAtom(ABS_CLOCK, "=", tau),))
        for k, (a, tau) in enumerate(w.events, start=1)
    )
    invariants = {
        locations[k]: (GuardAtom(ABS_CLOCK, "<=", w.events[k].time),) for k in range(n)
    }
    return Pta(
        alphabet=w.alphabet | make_alphabet(alphabet or ()),
        locations=locations,
        initial=locations[0],
        accepting=frozenset(),
        clocks=(ABS_CLOCK,),
        parameters=(),
        invariants=invariants,
        edges=edges,
    )


def _union_ordered(groups: Iterable[Sequence[str]]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for g in groups:
        for x in g:
            seen.setdefault(x, None)
    return tuple(seen)


class SyncProduct:
    """Strong-broadcast product of automata, built lazily.

    Behaves like a :class:`Pta` whose locations are tuples; every action
    declared by a component must be taken by all components declaring it,
    the others stay put.  ``to_pta`` materializes the full product.
    """

    def __init__(self, components: Sequence[Pta]):
        if not components:
            raise DomainError("a product needs at least one automaton")
        self.components = tuple(components)
        self.clocks = _union_ordered(c.clocks for c in components)
        self.parameters = _union_ordered(c.parameters for c in components)
        self.initial = tuple(c.initial for c in components)
        self._edges: dict[tuple, tuple[Edge, ...]] = {}
        self._invariants: dict[tuple, tuple[GuardAtom, ...]] = {}
        # An action used on an edge but not declared (such as $ in a bare
        # pattern) belongs to its own component.
        owned = [c.alphabet | {e.action for e in c.edges} for c in components]
        self.alphabet = frozenset().union(*owned)
        self._zeta = {
            a: tuple(i for i, acts in enumerate(owned) if a in acts) for a in self.alphabet
        }

    def is_accepting(self, locs: tuple) -> bool:
        return any(c.is_accepting(l) for c, l in zip(self.components, locs))

    @property
    def accepting_predicate(self):
        return self.is_accepting

    def invariant(self, locs: tuple) -> tuple[GuardAtom, ...]:
        inv = self._invariants.get(locs)
        if inv is None:
            inv = tuple(a for c, l in zip(self.components, locs) for a in c.invariant(l))
            self._invariants[locs] = inv
        return inv

    def edges_from(self, locs: tuple) -> tuple[Edge, ...]:
        cached = self._edges.get(locs)
        if cached is not None:
            return cached
        by_action: list[dict[str, list[Edge]]] = []
        order: dict[str, None] = {}
        for c, l in zip(self.components, locs):
            groups: dict[str, list[Edge]] = {}
            for e in c.edges_from(l):
                groups.setdefault(e.action, []).append(e)
                order.setdefault(e.action, None)
            by_action.append(groups)
        out = []
        for a in order:
            zeta = self._zeta.get(a, ())
            choices = [by_action[i].get(a) for i in zeta]
            if not zeta or not all(choices):
                continue
            for combo in cartesian(*choices):
                target = list(locs)
                guard: tuple[GuardAtom, ...] = ()
                resets: frozenset[str] = frozenset()
                for i, e in zip(zeta, combo):
                    target[i] = e.target
                    guard += e.guard
                    resets |= e.resets
                out.append(Edge(locs, a, tuple(target), guard, resets))
        cached = tuple(out)
        self._edges[locs] = cached
        return cached

    def to_pta(self) -> Pta:
        """Every location tuple and every synchronized edge, eagerly."""
        locations = tuple(cartesian(*(c.locations for c in self.components)))
        edges = tuple(e for locs in locations for e in self.edges_from(locs))
        return Pta(
            alphabet=self.alphabet,
            locations=locations,
            initial=self.initial,
            accepting=frozenset(l for l in locations if self.is_accepting(l)),
            clocks=self.clocks,
            parameters=self.parameters,
            invariants={l: self.invariant(l) for l in locations},
            edges=edges,
        )


def sync_product(automata: Sequence[Pta]) -> SyncProduct:
    return SyncProduct(automata)


def branching_factor(pattern: Pta) -> int:
    """Largest number of same-action edges leaving one location (at least 1)."""
    best = 1
    for loc in pattern.locations:
        counts: dict[str, int] = {}
        for e in pattern.edges_from(loc):
            counts[e.action] = counts.get(e.action, 0) + 1
        if counts:
            best = max(best, max(counts.values()))
    return best
