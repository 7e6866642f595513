"""Exact not-necessarily-closed convex polyhedra over the rationals.

A constraint is an integer row ``c . v + k  REL  0`` where REL is one of
``eq`` (=), ``le`` (<=) or ``lt`` (<).  Rows are kept primitive (gcd of all
entries is 1); equalities additionally have a positive leading coefficient.
Every geometric question (emptiness, projection, inclusion, bounds) is
answered with Fourier-Motzkin elimination; equalities are eliminated by
substitution before any pairwise combination happens.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

Rational = Union[int, Fraction]

EQ = "eq"
LE = "le"
LT = "lt"
RELATIONS = (EQ, LE, LT)

CLOCK = "clock"
PARAMETER = "parameter"


class SpaceMismatchError(ValueError):
    """Two polyhedra (or a polyhedron and an atom) live in different spaces."""


class EmptyPolyhedronError(ValueError):
    """An operation that needs a non-empty polyhedron received an empty one."""


class VarSpace:
    """Ordered, named variables, each tagged as a clock or a parameter."""

    __slots__ = ("names", "kinds", "_index")

    def __init__(self, names: Iterable[str], kinds: Iterable[str] | None = None):
        names = tuple(names)
        kinds = tuple(kinds) if kinds is not None else (PARAMETER,) * len(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if len(kinds) != len(names):
            raise ValueError("one kind per variable is required")
        for kind in kinds:
            if kind not in (CLOCK, PARAMETER):
                raise ValueError(f"unknown variable kind {kind!r}")
        self.names = names
        self.kinds = kinds
        self._index = {name: i for i, name in enumerate(names)}

    @classmethod
    def of(cls, clocks: Iterable[str] = (), parameters: Iterable[str] = ()) -> "VarSpace":
        clocks, parameters = tuple(clocks), tuple(parameters)
        return cls(clocks + parameters, (CLOCK,) * len(clocks) + (PARAMETER,) * len(parameters))

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, VarSpace)
            and self.names == other.names
            and self.kinds == other.kinds
        )

    def __hash__(self) -> int:
        return hash((self.names, self.kinds))

    def __repr__(self) -> str:
        return f"VarSpace({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def kind(self, name: str) -> str:
        return self.kinds[self.index(name)]

    @property
    def clocks(self) -> tuple[str, ...]:
        return tuple(n for n, k in zip(self.names, self.kinds) if k == CLOCK)

    @property
    def parameters(self) -> tuple[str, ...]:
        return tuple(n for n, k in zip(self.names, self.kinds) if k == PARAMETER)

    def subspace(self, names: Iterable[str]) -> "VarSpace":
        names = tuple(names)
        return VarSpace(names, (self.kind(n) for n in names))


class LinAtom(NamedTuple):
    """Integer row ``sum(coeffs[i] * v[i]) + const  rel  0``."""

    coeffs: tuple[int, ...]
    const: int
    rel: str

    def is_constant(self) -> bool:
        return not any(self.coeffs)

    def holds_trivially(self) -> bool:
        """Truth value of a constant atom (meaningless if variables occur)."""
        k = self.const
        if self.rel == EQ:
            return k == 0
        return k <= 0 if self.rel == LE else k < 0

    def evaluate(self, point: Sequence[Rational]) -> bool:
        value = self.const + sum(c * x for c, x in zip(self.coeffs, point) if c)
        if self.rel == EQ:
            return value == 0
        return value <= 0 if self.rel == LE else value < 0

    def negations(self) -> tuple["LinAtom", ...]:
        """Atoms whose disjunction is the complement of this one."""
        neg = tuple(-c for c in self.coeffs)
        if self.rel == LE:
            return (_norm(neg, -self.const, LT),)
        if self.rel == LT:
            return (_norm(neg, -self.const, LE),)
        return (_norm(self.coeffs, self.const, LT), _norm(neg, -self.const, LT))


def _norm(coeffs: tuple[int, ...], const: int, rel: str) -> LinAtom:
    g = gcd(*coeffs, const)
    if g > 1:
        coeffs = tuple(c // g for c in coeffs)
        const //= g
    if rel == EQ:
        for c in coeffs:
            if c:
                if c < 0:
                    coeffs = tuple(-x for x in coeffs)
                    const = -const
                break
    return LinAtom(coeffs, const, rel)


def make_atom(
    space: VarSpace,
    coeffs: Mapping[str, Rational],
    const: Rational = 0,
    rel: str = LE,
) -> LinAtom:
    """Build a normalized atom ``sum(coeffs[v] * v) + const  rel  0``."""
    if rel not in RELATIONS:
        raise ValueError(f"relation must be one of {RELATIONS}, got {rel!r}")
    row = [Fraction(0)] * len(space)
    for name, value in coeffs.items():
        row[space.index(name)] += Fraction(value)
    const = Fraction(const)
    scale = lcm(*(x.denominator for x in row), const.denominator)
    ints = tuple(int(x * scale) for x in row)
    return _norm(ints, int(const * scale), rel)


# ---------------------------------------------------------------------------
# System-level kernel.  A "system" is a tuple of LinAtom in simplified form:
# equalities first (reduced row echelon form, pivot columns absent from every
# other row), then inequalities sorted, no two parallel inequalities.
# ``None`` stands for the empty system (a contradiction was derived).


def _rref(eqs: list[LinAtom], n: int) -> list[LinAtom] | None:
    if not eqs:
        return []
    rows = [list(a.coeffs) + [a.const] for a in eqs]
    r = 0
    for col in range(n):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        pc = prow[col]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][col]
                if f:
                    row = [pc * x - f * y for x, y in zip(rows[i], prow)]
                    g = gcd(*row)
                    rows[i] = [x // g for x in row] if g > 1 else row
        r += 1
        if r == len(rows):
            break
    for row in rows[r:]:
        if row[n] != 0:
            return None
    return [_norm(tuple(row[:n]), row[n], EQ) for row in rows[:r]]


def _reduce(a: LinAtom, eqs: list[LinAtom], pivots: list[int]) -> LinAtom:
    for p, e in zip(pivots, eqs):
        ap = a.coeffs[p]
        if ap:
            ep = e.coeffs[p]
            a = _norm(
                tuple(ep * x - ap * y for x, y in zip(a.coeffs, e.coeffs)),
                ep * a.const - ap * e.const,
                a.rel,
            )
    return a


_DIRECTIONS: dict = {}


def _direction(coeffs: tuple[int, ...]):
    """(primitive direction with positive lead, scale, lead was positive), memoized."""
    g = gcd(*coeffs)
    if g == 0:
        info = (coeffs, 0, True)
    else:
        key = tuple(c // g for c in coeffs) if g > 1 else coeffs
        lead = 0
        for lead in key:
            if lead:
                break
        if lead < 0:
            key = tuple(-x for x in key)
        info = (key, g, lead > 0)
    if len(_DIRECTIONS) > 500_000:
        _DIRECTIONS.clear()
    _DIRECTIONS[coeffs] = info
    return info


def _simplify(atoms: Iterable[LinAtom], n: int):
    """Simplified system equivalent to ``atoms``, or None when contradictory."""
    eqs: list[LinAtom] = []
    ineqs: list[LinAtom] = []
    for a in atoms:
        if a.rel == EQ:
            if not any(a.coeffs):
                if a.const:
                    return None
                continue
            eqs.append(a)
        else:
            ineqs.append(a)
    while True:
        if len(eqs) > 1:
            eqs = _rref(eqs, n)
            if eqs is None:
                return None
        pivots = [_lead(e.coeffs) for e in eqs]
        # Per primitive direction d (first entry positive), the tightest upper
        # bound on d.v and the tightest lower bound, each as (atom, scale).
        # Both are tighter when const/scale is larger.
        upper: dict[tuple[int, ...], tuple[LinAtom, int]] = {}
        lower: dict[tuple[int, ...], tuple[LinAtom, int]] = {}
        for a in ineqs:
            if eqs:
                for p, e in zip(pivots, eqs):
                    if a.coeffs[p]:
                        a = _reduce(a, eqs, pivots)
                        break
            info = _DIRECTIONS.get(a.coeffs)
            if info is None:
                info = _direction(a.coeffs)
            key, g, is_upper = info
            if g == 0:
                if not a.holds_trivially():
                    return None
                continue
            side = upper if is_upper else lower
            prev = side.get(key)
            if prev is None:
                side[key] = (a, g)
            else:
                b, h = prev
                lhs, rhs = a.const * h, b.const * g
                if lhs > rhs or (lhs == rhs and a.rel == LT):
                    side[key] = (a, g)
        new_eqs = []
        if len(lower) < len(upper):
            shared = [k for k in lower if k in upper]
        else:
            shared = [k for k in upper if k in lower]
        for key in shared:
            a, g = upper[key]
            b, h = lower[key]
            # d.v <= -a.const/g  and  d.v >= b.const/h
            gap = b.const * g + a.const * h
            if gap > 0:
                return None
            if gap == 0:
                if a.rel == LT or b.rel == LT:
                    return None
                new_eqs.append(_norm(a.coeffs, a.const, EQ))
                del upper[key]
                del lower[key]
        if not new_eqs:
            return tuple(eqs) + tuple(sorted([v[0] for v in upper.values()] + [v[0] for v in lower.values()]))
        eqs = eqs + new_eqs
        ineqs = [v[0] for v in upper.values()] + [v[0] for v in lower.values()]


def _lead(coeffs: tuple[int, ...]) -> int:
    for i, c in enumerate(coeffs):
        if c:
            return i
    return -1


def _eliminate_one(system: tuple[LinAtom, ...], k: int) -> list[LinAtom]:
    """One Fourier-Motzkin step on variable ``k`` (no simplification)."""
    eq = None
    for a in system:
        if a.rel != EQ:
            break
        if a.coeffs[k]:
            eq = a
            break
    if eq is not None:
        ek = eq.coeffs[k]
        m = abs(ek)
        out = []
        for a in system:
            if a is eq:
                continue
            ak = a.coeffs[k]
            if not ak:
                out.append(a)
                continue
            f = ak if ek > 0 else -ak
            out.append(
                _norm(
                    tuple(m * x - f * y for x, y in zip(a.coeffs, eq.coeffs)),
                    m * a.const - f * eq.const,
                    a.rel,
                )
            )
        return out
    pos, neg, out = [], [], []
    for a in system:
        c = a.coeffs[k]
        if c > 0:
            pos.append(a)
        elif c < 0:
            neg.append(a)
        else:
            out.append(a)
    for p in pos:
        pk = p.coeffs[k]
        pc = p.coeffs
        for q in neg:
            qk = -q.coeffs[k]
            rel = LT if (p.rel == LT or q.rel == LT) else LE
            out.append(
                _norm(
                    tuple(qk * x + pk * y for x, y in zip(pc, q.coeffs)),
                    qk * p.const + pk * q.const,
                    rel,
                )
            )
    return out


def _elimination_cost(system: tuple[LinAtom, ...], k: int) -> int:
    pos = neg = 0
    for a in system:
        c = a.coeffs[k]
        if c:
            if a.rel == EQ:
                return -1
            if c > 0:
                pos += 1
            else:
                neg += 1
    return pos * neg - pos - neg


def _eliminate(system, indices: Iterable[int], n: int):
    """Project ``indices`` out of a simplified system (greedy order)."""
    todo = set(indices)
    dirty = False
    while todo and system is not None:
        occurring = [k for k in todo if any(a.coeffs[k] for a in system)]
        if not occurring:
            break
        costs = {k: _elimination_cost(system, k) for k in occurring}
        k = min(occurring, key=lambda i: (costs[i], i))
        todo.discard(k)
        if costs[k] < 0:
            # substitution keeps equalities in front; compact later
            system = tuple(_eliminate_one(system, k))
            dirty = True
        else:
            system = _simplify(_eliminate_one(system, k), n)
            dirty = False
    if dirty:
        system = _simplify(system, n)
    return system


def _system_is_empty(system, n: int) -> bool:
    if system is None:
        return True
    if all(a.rel == EQ for a in system):
        return False
    return _eliminate(system, range(n), n) is None


def analyze(atoms: Iterable[LinAtom], n: int):
    """Decide emptiness and, when non-empty, a canonical witness.

    The witness is a tuple of ``(numerator, denominator)`` pairs in lowest
    terms; see :func:`witness_point` for Fractions.

    Variables are eliminated in index order.  The witness is the reverse-
    lexicographic minimum of the topological closure (a variable unbounded
    below takes its supremum, or 0 if unbounded both ways), so two systems
    denoting the same set always yield the same witness.  Returns ``None`` for
    an empty set, else ``(system, witness)``.
    """
    system = _simplify(atoms, n)
    if system is None:
        return None
    stages = []
    current = system
    for k in range(n):
        stages.append(current)
        by_equality = False
        occurs = False
        for a in current:
            if a.coeffs[k]:
                occurs = True
                by_equality = a.rel == EQ
                break
        if occurs:
            current = _eliminate_one(current, k)
            # Substitution keeps equalities first and never grows the system;
            # only pairwise combination needs compaction.
            if by_equality:
                current = tuple(current)
            else:
                current = _simplify(current, n)
                if current is None:
                    return None
    if not all(a.holds_trivially() for a in current):
        return None
    # Back-substitution in exact integer pairs (numerator, positive denominator).
    pn = [0] * n
    pd = [1] * n
    for k in range(n - 1, -1, -1):
        lo = hi = None
        fixed = None
        for a in stages[k]:
            c = a.coeffs[k]
            if not c:
                continue
            coeffs = a.coeffs
            num, den = a.const, 1
            for j in range(k + 1, n):
                cj = coeffs[j]
                if cj and pn[j]:
                    dj = pd[j]
                    num = num * dj + cj * pn[j] * den
                    den *= dj
            vn, vd = -num, den * c
            if vd < 0:
                vn, vd = -vn, -vd
            if a.rel == EQ:
                fixed = (vn, vd)
                break
            if c > 0:
                if hi is None or vn * hi[1] < hi[0] * vd:
                    hi = (vn, vd)
            elif lo is None or vn * lo[1] > lo[0] * vd:
                lo = (vn, vd)
        value = fixed or lo or hi
        if value is not None:
            g = gcd(*value)
            pn[k], pd[k] = value[0] // g, value[1] // g
    return system, tuple(zip(pn, pd))


def witness_point(witness) -> tuple[Fraction, ...]:
    return tuple(Fraction(a, b) for a, b in witness)


# ---------------------------------------------------------------------------
# Public objects


class ConvexPoly:
    """Conjunction of atoms over a variable space; no atoms means universe."""

    __slots__ = ("space", "atoms")

    def __init__(self, space: VarSpace, atoms: Iterable[LinAtom] = ()):
        atoms = tuple(atoms)
        n = len(space)
        for a in atoms:
            if len(a.coeffs) != n:
                raise SpaceMismatchError(
                    f"atom over {len(a.coeffs)} variables in a {n}-variable space"
                )
        self.space = space
        self.atoms = atoms

    @classmethod
    def universe(cls, space: VarSpace) -> "ConvexPoly":
        return cls(space)

    @classmethod
    def empty(cls, space: VarSpace) -> "ConvexPoly":
        return cls(space, (LinAtom((0,) * len(space), 1, LE),))

    @classmethod
    def from_strings(cls, space: VarSpace, constraints: Iterable[str] | str) -> "ConvexPoly":
        """Parse human constraints such as ``"1.7 < t < 2.8 - p1"``."""
        if isinstance(constraints, str):
            constraints = [constraints]
        atoms: list[LinAtom] = []
        for text in constraints:
            atoms.extend(parse_constraint(space, text))
        return cls(space, atoms)

    def __repr__(self) -> str:
        return f"ConvexPoly({format_poly(self)!r})"

    def __and__(self, other: "ConvexPoly") -> "ConvexPoly":
        _check_space(self.space, other.space)
        return ConvexPoly(self.space, self.atoms + other.atoms)

    def __contains__(self, point) -> bool:
        return contains_point(self, point)

    def simplified(self) -> "ConvexPoly":
        system = _simplify(self.atoms, len(self.space))
        if system is None:
            return ConvexPoly.empty(self.space)
        return ConvexPoly(self.space, system)

    def is_empty(self) -> bool:
        return is_empty(self)


class DisjPoly:
    """Finite union of convex polyhedra over one space; no disjuncts is empty."""

    __slots__ = ("space", "disjuncts")

    def __init__(self, space: VarSpace, disjuncts: Iterable[ConvexPoly] = ()):
        disjuncts = tuple(disjuncts)
        for d in disjuncts:
            _check_space(space, d.space)
        self.space = space
        self.disjuncts = disjuncts

    def __len__(self) -> int:
        return len(self.disjuncts)

    def __iter__(self):
        return iter(self.disjuncts)

    def __repr__(self) -> str:
        return f"DisjPoly({len(self.disjuncts)} disjuncts over {list(self.space.names)})"

    def __contains__(self, point) -> bool:
        return any(contains_point(d, point) for d in self.disjuncts)

    def is_empty(self) -> bool:
        return all(is_empty(d) for d in self.disjuncts)


def _check_space(a: VarSpace, b: VarSpace) -> None:
    if a != b:
        raise SpaceMismatchError(f"{a!r} != {b!r}")


def conjoin(poly: ConvexPoly, atoms: Iterable[LinAtom]) -> ConvexPoly:
    """Intersection with extra atoms; kept syntactic (nothing is simplified)."""
    return ConvexPoly(poly.space, poly.atoms + tuple(atoms))


def is_empty(poly: ConvexPoly) -> bool:
    n = len(poly.space)
    return _system_is_empty(_simplify(poly.atoms, n), n)


def eliminate(poly: ConvexPoly, names: Iterable[str]) -> ConvexPoly:
    """Existential projection of ``names``; the space is unchanged."""
    n = len(poly.space)
    system = _eliminate(_simplify(poly.atoms, n), [poly.space.index(v) for v in names], n)
    if system is None:
        return ConvexPoly.empty(poly.space)
    return ConvexPoly(poly.space, system)


def project(poly: ConvexPoly, names: Sequence[str]) -> ConvexPoly:
    """Shadow of ``poly`` on ``names``, expressed over the subspace ``names``."""
    space = poly.space
    keep = [space.index(v) for v in names]
    wanted = set(names)
    drop = [v for v in space.names if v not in wanted]
    shadow = eliminate(poly, drop)
    sub = space.subspace(names)
    if _is_marked_empty(shadow):
        return ConvexPoly.empty(sub)
    return ConvexPoly(
        sub, (_norm(tuple(a.coeffs[i] for i in keep), a.const, a.rel) for a in shadow.atoms)
    )


def _is_marked_empty(poly: ConvexPoly) -> bool:
    return len(poly.atoms) == 1 and poly.atoms[0].is_constant() and not poly.atoms[0].holds_trivially()


def time_elapse(poly: ConvexPoly, clocks: Iterable[str] | None = None) -> ConvexPoly:
    """Let time pass: every clock may grow by the same delay ``d >= 0``."""
    space = poly.space
    names = space.clocks if clocks is None else tuple(clocks)
    idx = [space.index(c) for c in names]
    n = len(space)
    system = _simplify(poly.atoms, n)
    system = _elapse_system(system, idx, n) if system is not None else None
    if system is None:
        return ConvexPoly.empty(space)
    return ConvexPoly(space, system)


def _elapse_system(system, clock_idx: Sequence[int], n: int):
    ext = [
        LinAtom(a.coeffs + (-sum(a.coeffs[i] for i in clock_idx),), a.const, a.rel)
        for a in system
    ]
    ext.append(LinAtom((0,) * n + (-1,), 0, LE))
    # ``system`` is simplified, so its equalities still come first.
    out = _eliminate_one(tuple(ext), n)
    return _simplify((_norm(a.coeffs[:n], a.const, a.rel) for a in out), n)


def reset(poly: ConvexPoly, clocks: Iterable[str]) -> ConvexPoly:
    """Existentially forget ``clocks`` and pin each of them to zero."""
    space = poly.space
    clocks = tuple(clocks)
    if not clocks:
        return poly
    shadow = eliminate(poly, clocks)
    zeros = [make_atom(space, {c: 1}, 0, EQ) for c in clocks]
    return ConvexPoly(space, shadow.atoms + tuple(zeros)).simplified()


def includes(outer: ConvexPoly, inner: ConvexPoly) -> bool:
    """True iff ``inner`` is a subset of ``outer``."""
    _check_space(outer.space, inner.space)
    n = len(outer.space)
    inner_sys = _simplify(inner.atoms, n)
    if _system_is_empty(inner_sys, n):
        return True
    outer_sys = _simplify(outer.atoms, n)
    if outer_sys is None:
        return False
    return _system_includes(outer_sys, inner_sys, n)


def _system_includes(outer_sys, inner_sys, n: int) -> bool:
    for c in outer_sys:
        for neg in c.negations():
            if not _system_is_empty(_simplify(inner_sys + (neg,), n), n):
                return False
    return True


def substitute(poly: ConvexPoly, name: str, value: Rational) -> ConvexPoly:
    """Fix ``name := value`` and drop it from the space."""
    space = poly.space
    k = space.index(name)
    value = Fraction(value)
    num, den = value.numerator, value.denominator
    sub = space.subspace(v for v in space.names if v != name)
    atoms = []
    for a in poly.atoms:
        coeffs = tuple(den * c for i, c in enumerate(a.coeffs) if i != k)
        atoms.append(_norm(coeffs, den * a.const + num * a.coeffs[k], a.rel))
    return ConvexPoly(sub, atoms)


def difference(a: DisjPoly, b: DisjPoly) -> DisjPoly:
    """Exact ``a \\ b`` as a finite union."""
    _check_space(a.space, b.space)
    n = len(a.space)
    subtrahends = [s for s in (_simplify(q.atoms, n) for q in b.disjuncts) if s is not None]
    result = []
    for p in a.disjuncts:
        pieces = [_simplify(p.atoms, n)]
        pieces = [x for x in pieces if not _system_is_empty(x, n)]
        for q in subtrahends:
            next_pieces = []
            for piece in pieces:
                next_pieces.extend(_minus(piece, q, n))
            pieces = next_pieces
            if not pieces:
                break
        result.extend(ConvexPoly(a.space, piece) for piece in pieces)
    return DisjPoly(a.space, result)


def _minus(p, q, n: int) -> list:
    if _system_is_empty(_simplify(p + q, n), n):
        return [p]
    out = []
    current = p
    for c in q:
        for neg in c.negations():
            piece = _simplify(current + (neg,), n)
            if not _system_is_empty(piece, n):
                out.append(piece)
        current = _simplify(current + (c,), n)
        if current is None:
            break
    return out


def equivalent(a: DisjPoly | ConvexPoly, b: DisjPoly | ConvexPoly) -> bool:
    """Semantic set equality (both differences empty)."""
    if isinstance(a, ConvexPoly):
        a = DisjPoly(a.space, [a])
    if isinstance(b, ConvexPoly):
        b = DisjPoly(b.space, [b])
    return difference(a, b).is_empty() and difference(b, a).is_empty()


class Bound(NamedTuple):
    """One side of an interval; ``value`` None means unbounded."""

    value: Fraction | None
    strict: bool = False

    @property
    def unbounded(self) -> bool:
        return self.value is None


UNBOUNDED = Bound(None, False)


def bounds(poly: ConvexPoly, name: str) -> tuple[Bound, Bound]:
    """Infimum and supremum of ``name`` over a non-empty polyhedron.

    A strict bound is not attained.  Raises EmptyPolyhedronError on an empty
    polyhedron.
    """
    space = poly.space
    n = len(space)
    k = space.index(name)
    system = _eliminate(_simplify(poly.atoms, n), (i for i in range(n) if i != k), n)
    if system is None:
        raise EmptyPolyhedronError(f"cannot bound {name!r} over an empty polyhedron")
    return _read_bounds(system, k)


def _read_bounds(system, k: int) -> tuple[Bound, Bound]:
    lower = upper = UNBOUNDED
    for a in system:
        c = a.coeffs[k]
        if not c:
            continue
        val = Fraction(-a.const, c)
        if a.rel == EQ:
            return Bound(val, False), Bound(val, False)
        strict = a.rel == LT
        if c > 0:
            if upper.value is None or val < upper.value or (val == upper.value and strict):
                upper = Bound(val, strict)
        elif lower.value is None or val > lower.value or (val == lower.value and strict):
            lower = Bound(val, strict)
    return lower, upper


def union_add(union: DisjPoly, poly: ConvexPoly, subsumption: bool = False) -> DisjPoly:
    """Add a disjunct unless it is empty (or, with subsumption, already covered)."""
    _check_space(union.space, poly.space)
    if is_empty(poly):
        return union
    if subsumption and any(includes(d, poly) for d in union.disjuncts):
        return union
    return DisjPoly(union.space, union.disjuncts + (poly,))


def minimize(poly: ConvexPoly) -> ConvexPoly:
    """Drop inequalities entailed by the remaining atoms."""
    n = len(poly.space)
    system = _simplify(poly.atoms, n)
    if system is None or _system_is_empty(system, n):
        return ConvexPoly.empty(poly.space)
    return ConvexPoly(poly.space, _minimize_system(system, n))


def _minimize_system(system, n: int):
    eqs = [a for a in system if a.rel == EQ]
    kept = [a for a in system if a.rel != EQ]
    i = 0
    while i < len(kept):
        c = kept[i]
        others = tuple(eqs) + tuple(kept[:i]) + tuple(kept[i + 1:])
        (neg,) = c.negations()
        if _system_is_empty(_simplify(others + (neg,), n), n):
            del kept[i]
        else:
            i += 1
    return tuple(eqs) + tuple(kept)


def contains_point(poly: ConvexPoly, point) -> bool:
    """Membership of a point given as a mapping or a sequence in space order."""
    if isinstance(point, Mapping):
        point = [Fraction(point[v]) for v in poly.space.names]
    return all(a.evaluate(point) for a in poly.atoms)


# ---------------------------------------------------------------------------
# Text form


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_']*)|(<=|>=|<|>|=|≤|≥|\+|-|−|\*))")
_REL_TOKENS = {"<": "<", "<=": "<=", "≤": "<=", "=": "=", ">=": ">=", "≥": ">=", ">": ">"}


def _parse_number(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        return Fraction(num) / Fraction(den)
    return Fraction(text)


def _parse_expr(space: VarSpace, tokens: list[str]) -> tuple[dict[str, Fraction], Fraction]:
    coeffs: dict[str, Fraction] = {}
    const = Fraction(0)
    i = 0
    sign = 1
    expect_term = True
    while i < len(tokens):
        tok = tokens[i]
        if tok in ("+", "-", "−"):
            if tok != "+":
                sign = -sign
            i += 1
            expect_term = True
            continue
        if not expect_term:
            raise ValueError(f"unexpected token {tok!r}")
        if tok[0].isdigit():
            value = _parse_number(tok)
            if i + 1 < len(tokens) and tokens[i + 1] == "*":
                i += 1
            if i + 1 < len(tokens) and (tokens[i + 1][0].isalpha() or tokens[i + 1][0] == "_"):
                name = tokens[i + 1]
                space.index(name)
                coeffs[name] = coeffs.get(name, Fraction(0)) + sign * value
                i += 2
            else:
                const += sign * value
                i += 1
        else:
            space.index(tok)
            coeffs[tok] = coeffs.get(tok, Fraction(0)) + sign
            i += 1
        sign = 1
        expect_term = False
    if expect_term:
        raise ValueError("expression ends with an operator")
    return coeffs, const


def parse_constraint(space: VarSpace, text: str) -> list[LinAtom]:
    """Parse one (possibly chained) constraint into atoms."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    parts: list[list[str]] = [[]]
    rels: list[str] = []
    for tok in tokens:
        if tok in _REL_TOKENS:
            rels.append(_REL_TOKENS[tok])
            parts.append([])
        else:
            parts[-1].append(tok)
    if not rels:
        raise ValueError(f"no relation in {text!r}")
    exprs = [_parse_expr(space, p) for p in parts]
    atoms = []
    for (lc, lk), rel, (rc, rk) in zip(exprs, rels, exprs[1:]):
        diff = dict(lc)
        for name, v in rc.items():
            diff[name] = diff.get(name, Fraction(0)) - v
        k = lk - rk
        if rel in (">", ">="):
            diff = {name: -v for name, v in diff.items()}
            k = -k
        atoms.append(make_atom(space, diff, k, {"<": LT, "<=": LE, ">": LT, ">=": LE, "=": EQ}[rel]))
    return atoms


def _fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_atom(space: VarSpace, atom: LinAtom) -> str:
    """Render as ``lhs REL rhs`` with a unit leading coefficient."""
    lead = _lead(atom.coeffs)
    if lead < 0:
        return "true" if atom.holds_trivially() else "false"
    c0 = atom.coeffs[lead]
    scale = Fraction(1, abs(c0))
    flip = c0 < 0
    sign = -1 if flip else 1
    terms = []
    for name, c in zip(space.names, atom.coeffs):
        if not c:
            continue
        v = sign * c * scale
        mag = abs(v)
        body = name if mag == 1 else f"{_fmt_rational(mag)}*{name}"
        if not terms:
            terms.append(body if v > 0 else f"-{body}")
        else:
            terms.append(f"+ {body}" if v > 0 else f"- {body}")
    rhs = -sign * atom.const * scale
    if atom.rel == EQ:
        op = "="
    elif atom.rel == LE:
        op = ">=" if flip else "<="
    else:
        op = ">" if flip else "<"
    return f"{' '.join(terms)} {op} {_fmt_rational(rhs)}"


def format_poly(poly: ConvexPoly, joiner: str = " ∧ ") -> str:
    if not poly.atoms:
        return "true"
    return joiner.join(format_atom(poly.space, a) for a in poly.atoms)


def atom_to_fractions(space: VarSpace, atom: LinAtom) -> tuple[dict[str, Fraction], Fraction]:
    """Coefficients scaled so the leading coefficient has magnitude one."""
    lead = _lead(atom.coeffs)
    scale = Fraction(1, abs(atom.coeffs[lead])) if lead >= 0 else Fraction(1)
    coeffs = {name: c * scale for name, c in zip(space.names, atom.coeffs) if c}
    return coeffs, atom.const * scale

