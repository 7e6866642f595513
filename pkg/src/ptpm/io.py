"""File formats: timed words (.tw), patterns (.pat.json), match results
(.match.json) and 2-D projections (.csv plus an optional gnuplot script)."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from typing import Any, Iterable, Mapping, Sequence

from .engine import MatchSet
from .model import GUARD_OPS, DomainError, Edge, GuardAtom, Pta, TimedWord
from .polyhedron import (
    EQ,
    LE,
    LT,
    PARAMETER,
    RELATIONS,
    ConvexPoly,
    DisjPoly,
    LinAtom,
    VarSpace,
    bounds,
    format_poly,
    includes,
    is_empty,
    make_atom,
    minimize,
    project,
)


class ParseError(ValueError):
    """Malformed input; ``where`` names the line or field at fault."""

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


# ---------------------------------------------------------------------------
# Timed words

_ACTION = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_DECIMAL = re.compile(r"\d+(?:\.\d+)?\Z")


def parse_decimal(text: str) -> Fraction:
    """Exact value of a decimal literal such as ``0.5`` or ``12``."""
    if not _DECIMAL.match(text):
        raise ValueError(f"not a decimal literal: {text!r}")
    return Fraction(text)


def format_decimal(x: Fraction) -> str:
    """Shortest exact decimal rendering; fails if ``x`` has no finite expansion."""
    x = Fraction(x)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise DomainError(f"{x} has no finite decimal expansion")
    digits = max(twos, fives)
    if digits == 0:
        return str(x.numerator)
    scaled = x * 10**digits
    sign = "-" if scaled < 0 else ""
    body = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{body[:-digits]}.{body[-digits:]}"


def parse_word(text: str) -> TimedWord:
    """One ``<action> <timestamp>`` per line; ``;`` comments and blank lines skipped."""
    events = []
    previous = Fraction(0)
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        where = f"line {number}"
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<action> <timestamp>', got {raw!r}", where)
        action, stamp = parts
        if not _ACTION.match(action):
            raise ParseError(f"bad action name {action!r}", where)
        if action in ("start",):
            raise ParseError(f"action {action!r} is reserved", where)
        try:
            tau = parse_decimal(stamp)
        except ValueError as exc:
            raise ParseError(str(exc), where) from None
        if tau <= previous:
            raise ParseError(
                f"timestamp {stamp} does not exceed the previous one" if events
                else f"timestamp {stamp} is not positive",
                where,
            )
        previous = tau
        events.append((action, tau))
    return TimedWord(events)


def format_word(w: TimedWord) -> str:
    return "".join(f"{a} {format_decimal(tau)}\n" for a, tau in w)


# ---------------------------------------------------------------------------
# Patterns


def _require(obj: Mapping, key: str, kind, where: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    value = obj[key]
    if not isinstance(value, kind):
        raise ParseError(f"field {key!r} must be a {getattr(kind, '__name__', kind)}", where)
    return value


def _names(obj: Mapping, key: str, where: str) -> list[str]:
    values = _require(obj, key, list, where)
    for k, v in enumerate(values):
        if not isinstance(v, str):
            raise ParseError("expected a string", f"{where}.{key}[{k}]")
    return values


def _parse_atom(obj, where: str, clocks: set, params: set) -> GuardAtom:
    if not isinstance(obj, dict):
        raise ParseError("expected an object", where)
    clock = _require(obj, "clock", str, where)
    if clock not in clocks:
        raise ParseError(f"undeclared clock {clock!r}", f"{where}.clock")
    op = _require(obj, "op", str, where)
    if op not in GUARD_OPS:
        raise ParseError(f"bad operator {op!r}, expected one of {list(GUARD_OPS)}", f"{where}.op")
    rhs = _require(obj, "rhs", dict, where)
    if set(rhs) == {"param"}:
        name = rhs["param"]
        if name not in params:
            raise ParseError(f"undeclared parameter {name!r}", f"{where}.rhs.param")
        return GuardAtom(clock, op, name)
    if set(rhs) == {"const"}:
        value = rhs["const"]
        try:
            if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
                const = Fraction(value)
            elif isinstance(value, str):
                const = parse_decimal(value)
            else:
                raise ValueError(f"not a decimal: {value!r}")
        except ValueError as exc:
            raise ParseError(str(exc), f"{where}.rhs.const") from None
        return GuardAtom(clock, op, const)
    raise ParseError("rhs must be {\"const\": decimal} or {\"param\": name}", f"{where}.rhs")


def _parse_guard(items, where: str, clocks, params) -> tuple[GuardAtom, ...]:
    if not isinstance(items, list):
        raise ParseError("expected an array", where)
    return tuple(_parse_atom(a, f"{where}[{k}]", clocks, params) for k, a in enumerate(items))


def pattern_from_dict(doc: Mapping[str, Any]) -> Pta:
    if not isinstance(doc, dict):
        raise ParseError("a pattern is a JSON object")
    alphabet = _names(doc, "alphabet", "pattern")
    clocks = _names(doc, "clocks", "pattern")
    params = _names(doc, "parameters", "pattern")
    locations = _names(doc, "locations", "pattern")
    initial = _require(doc, "initial", str, "pattern")
    accepting = _names(doc, "accepting", "pattern")
    locset, clockset, paramset = set(locations), set(clocks), set(params)
    if initial not in locset:
        raise ParseError(f"undeclared location {initial!r}", "initial")
    for k, loc in enumerate(accepting):
        if loc not in locset:
            raise ParseError(f"undeclared location {loc!r}", f"accepting[{k}]")
    invariants = {}
    for loc, guard in doc.get("invariants", {}).items():
        if loc not in locset:
            raise ParseError(f"undeclared location {loc!r}", f"invariants.{loc}")
        invariants[loc] = _parse_guard(guard, f"invariants.{loc}", clockset, paramset)
    actions = set(alphabet) | {"$", "start"}
    edges = []
    for k, e in enumerate(_require(doc, "edges", list, "pattern")):
        where = f"edges[{k}]"
        if not isinstance(e, dict):
            raise ParseError("expected an object", where)
        source = _require(e, "source", str, where)
        target = _require(e, "target", str, where)
        action = _require(e, "action", str, where)
        for field_name, loc in (("source", source), ("target", target)):
            if loc not in locset:
                raise ParseError(f"undeclared location {loc!r}", f"{where}.{field_name}")
        if action not in actions:
            raise ParseError(f"action {action!r} is not in the alphabet", f"{where}.action")
        guard = _parse_guard(e.get("guard", []), f"{where}.guard", clockset, paramset)
        resets = e.get("resets", [])
        if not isinstance(resets, list):
            raise ParseError("expected an array", f"{where}.resets")
        for r, c in enumerate(resets):
            if c not in clockset:
                raise ParseError(f"undeclared clock {c!r}", f"{where}.resets[{r}]")
        edges.append(Edge(source, action, target, guard, frozenset(resets)))
    try:
        return Pta(
            alphabet=frozenset(alphabet),
            locations=tuple(locations),
            initial=initial,
            accepting=frozenset(accepting),
            clocks=tuple(clocks),
            parameters=tuple(params),
            invariants=invariants,
            edges=tuple(edges),
        )
    except DomainError as exc:
        raise ParseError(str(exc), "pattern") from None


def parse_pattern(text: str) -> Pta:
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    return pattern_from_dict(doc)


def _atom_doc(atom: GuardAtom) -> dict:
    rhs = {"param": atom.rhs} if atom.is_parametric else {"const": format_decimal(atom.rhs)}
    return {"clock": atom.clock, "op": atom.op, "rhs": rhs}


def pattern_to_dict(pta: Pta) -> dict:
    return {
        "alphabet": sorted(pta.alphabet),
        "clocks": list(pta.clocks),
        "parameters": list(pta.parameters),
        "locations": list(pta.locations),
        "initial": pta.initial,
        "accepting": sorted(pta.accepting),
        "invariants": {loc: [_atom_doc(a) for a in g] for loc, g in pta.invariants.items()},
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "action": e.action,
                "guard": [_atom_doc(a) for a in e.guard],
                "resets": sorted(e.resets),
            }
            for e in pta.edges
        ],
    }


def format_pattern(pta: Pta) -> str:
    return json.dumps(pattern_to_dict(pta), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Match results


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str, where: str) -> Fraction:
    if not isinstance(text, str) or not re.fullmatch(r"-?\d+/\d+", text):
        raise ParseError(f"expected a rational 'num/den', got {text!r}", where)
    num, den = text.split("/")
    if int(den) == 0:
        raise ParseError("zero denominator", where)
    return Fraction(int(num), int(den))


def _row_doc(space: VarSpace, atom: LinAtom) -> dict:
    return {
        "coeffs": {v: format_rational(c) for v, c in zip(space.names, atom.coeffs) if c},
        "const": format_rational(atom.const),
        "rel": atom.rel,
    }


def _row_key(row: dict) -> str:
    return json.dumps(row, sort_keys=True)


def result_document(m: MatchSet, simplify: bool = True) -> dict:
    """JSON-ready document with a platform-independent ordering."""
    space = m.disjuncts.space
    disjuncts = []
    for d in m.disjuncts:
        if simplify:
            d = minimize(d)
        rows = sorted((_row_doc(space, a) for a in d.atoms), key=_row_key)
        disjuncts.append(rows)
    disjuncts.sort(key=lambda rows: [_row_key(r) for r in rows])
    return {
        "variables": list(space.names),
        "disjuncts": disjuncts,
        "stats": {
            "states": m.states,
            "matches": m.matches,
            "comp_seconds": round(m.comp_seconds, 6),
        },
    }


def result_text(doc: Mapping) -> str:
    """One disjunct per line, atoms joined by ``∧``; ``no match`` when empty."""
    m = read_result(doc)
    if not m.disjuncts.disjuncts:
        return "no match\n"
    return "".join(format_poly(d) + "\n" for d in m.disjuncts)


def write_result(m: MatchSet, simplify: bool = True) -> tuple[dict, str]:
    doc = result_document(m, simplify)
    return doc, result_text(doc)


def dump_result(doc: Mapping) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def read_result(doc: Mapping | str) -> MatchSet:
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    if not isinstance(doc, dict):
        raise ParseError("a result is a JSON object")
    names = _names(doc, "variables", "result")
    space = VarSpace(names, [PARAMETER] * len(names))
    polys = []
    for k, rows in enumerate(_require(doc, "disjuncts", list, "result")):
        atoms = []
        for r, row in enumerate(rows):
            where = f"disjuncts[{k}][{r}]"
            if not isinstance(row, dict):
                raise ParseError("expected an object", where)
            coeffs = row.get("coeffs", {})
            if not isinstance(coeffs, dict):
                raise ParseError("expected an object", f"{where}.coeffs")
            for v in coeffs:
                if v not in space:
                    raise ParseError(f"unknown variable {v!r}", f"{where}.coeffs")
            rel = row.get("rel")
            if rel not in RELATIONS:
                raise ParseError(f"rel must be one of {list(RELATIONS)}", f"{where}.rel")
            atoms.append(
                make_atom(
                    space,
                    {v: parse_rational(c, f"{where}.coeffs.{v}") for v, c in coeffs.items()},
                    parse_rational(row.get("const", "0/1"), f"{where}.const"),
                    rel,
                )
            )
        polys.append(ConvexPoly(space, atoms))
    stats = doc.get("stats", {})
    return MatchSet(
        space,
        DisjPoly(space, polys),
        int(stats.get("states", 0)),
        float(stats.get("comp_seconds", 0.0)),
    )


# ---------------------------------------------------------------------------
# 2-D projections


@dataclass(frozen=True)
class Polygon:
    """Closure vertices in counterclockwise order.

    ``clipped[k]`` flags the edge from vertex ``k`` to vertex ``k + 1``: it lies
    on the box border and the region continues past it.
    """

    vertices: tuple[tuple[Fraction, Fraction], ...]
    clipped: tuple[bool, ...]


def _ccw(points: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    if len(points) < 3:
        return sorted(points)
    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)

    def half(p) -> int:
        dx, dy = p[0] - cx, p[1] - cy
        return 0 if dy > 0 or (dy == 0 and dx > 0) else 1

    def cmp(p, q) -> int:
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        cross = (p[0] - cx) * (q[1] - cy) - (p[1] - cy) * (q[0] - cx)
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    ordered = sorted(points, key=cmp_to_key(cmp))
    start = ordered.index(min(ordered))
    return ordered[start:] + ordered[:start]


def _closure_holds(atom: LinAtom, point) -> bool:
    value = atom.const + sum(c * x for c, x in zip(atom.coeffs, point))
    return value == 0 if atom.rel == EQ else value <= 0


def _vertices(poly: ConvexPoly) -> list[tuple[Fraction, Fraction]]:
    lines = [a for a in poly.atoms if any(a.coeffs)]
    found = set()
    for a, b in combinations(lines, 2):
        (a1, a2), (b1, b2) = a.coeffs, b.coeffs
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        # a1 x + a2 y = -ka ; b1 x + b2 y = -kb
        x = Fraction(-a.const * b2 + b.const * a2, det)
        y = Fraction(-a1 * b.const + b1 * a.const, det)
        if all(_closure_holds(c, (x, y)) for c in poly.atoms):
            found.add((x, y))
    return _ccw(list(found))


def project_2d(
    m: MatchSet | DisjPoly,
    var_x: str,
    var_y: str,
    box: Sequence,
    drop_covered: bool = False,
) -> list[Polygon]:
    """Each disjunct's shadow on (var_x, var_y), clipped to ``box``.

    ``box`` is ``(x0, x1, y0, y1)``.  Identical regions are reported once;
    with ``drop_covered`` a region inside another one is omitted as well.
    """
    union = m.disjuncts if isinstance(m, MatchSet) else m
    space = union.space
    for v in (var_x, var_y):
        if v not in space:
            raise DomainError(f"unknown variable {v!r}")
    if var_x == var_y:
        raise DomainError("the two axes must differ")
    x0, x1, y0, y1 = (Fraction(b) for b in box)
    if not (x0 < x1 and y0 < y1):
        raise DomainError("the box must have positive width and height")
    plane = VarSpace([var_x, var_y], [PARAMETER, PARAMETER])
    border = [
        make_atom(plane, {var_x: -1}, x0, LE),
        make_atom(plane, {var_x: 1}, -x1, LE),
        make_atom(plane, {var_y: -1}, y0, LE),
        make_atom(plane, {var_y: 1}, -y1, LE),
    ]
    regions: list[tuple[ConvexPoly, ConvexPoly]] = []
    for d in union:
        shadow = ConvexPoly(plane, project(d, [var_x, var_y]).atoms)
        clipped = ConvexPoly(plane, shadow.atoms + tuple(border))
        if is_empty(clipped):
            continue
        shadow, clipped = minimize(shadow), minimize(clipped)
        if any(includes(other, shadow) and includes(shadow, other) for other, _ in regions):
            continue
        regions.append((shadow, clipped))
    if drop_covered:
        regions = [
            (shadow, clipped)
            for k, (shadow, clipped) in enumerate(regions)
            if not any(j != k and includes(other, clipped) for j, (_, other) in enumerate(regions))
        ]
    out = []
    for shadow, clipped in regions:
        verts = _vertices(clipped)
        beyond = _beyond(shadow, var_x, var_y, (x0, x1, y0, y1))
        flags = []
        for k, p in enumerate(verts):
            q = verts[(k + 1) % len(verts)]
            flags.append(len(verts) > 1 and _on_open_side(p, q, (x0, x1, y0, y1), beyond))
        out.append(Polygon(tuple(verts), tuple(flags)))
    return out


def _beyond(shadow: ConvexPoly, var_x: str, var_y: str, box) -> tuple[bool, bool, bool, bool]:
    """Whether the unclipped shadow extends past each side (x0, x1, y0, y1)."""
    (lx, ux), (ly, uy) = bounds(shadow, var_x), bounds(shadow, var_y)
    x0, x1, y0, y1 = box
    return (
        lx.value is None or lx.value < x0,
        ux.value is None or ux.value > x1,
        ly.value is None or ly.value < y0,
        uy.value is None or uy.value > y1,
    )


def _on_open_side(p, q, box, beyond) -> bool:
    x0, x1, y0, y1 = box
    return (
        (beyond[0] and p[0] == q[0] == x0)
        or (beyond[1] and p[0] == q[0] == x1)
        or (beyond[2] and p[1] == q[1] == y0)
        or (beyond[3] and p[1] == q[1] == y1)
    )


def polygons_csv(polygons: Iterable[Polygon], var_x: str, var_y: str) -> str:
    """One block per polygon, blank-line separated; exact and decimal coordinates."""
    lines = [f"polygon,vertex,{var_x},{var_y},{var_x}_exact,{var_y}_exact,clipped_next"]
    blocks = []
    for k, poly in enumerate(polygons):
        block = []
        for i, ((x, y), flag) in enumerate(zip(poly.vertices, poly.clipped)):
            block.append(
                f"{k},{i},{float(x)!r},{float(y)!r},{format_rational(x)},{format_rational(y)},{int(flag)}"
            )
        blocks.append("\n".join(block))
    text = "\n".join(lines)
    if blocks:
        text += "\n" + "\n\n".join(blocks)
    return text + "\n"


def gnuplot_script(csv_name: str, var_x: str, var_y: str, box: Sequence) -> str:
    x0, x1, y0, y1 = (float(Fraction(b)) for b in box)
    return (
        "set datafile separator ','\n"
        f"set xlabel '{var_x}'\nset ylabel '{var_y}'\n"
        f"set xrange [{x0!r}:{x1!r}]\nset yrange [{y0!r}:{y1!r}]\n"
        f"plot '{csv_name}' every ::1 using 3:4 with filledcurves closed fillstyle transparent solid 0.3 title 'match regions'\n"
    )
