import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptpm.polyhedron import (
    EQ,
    LE,
    LT,
    ConvexPoly,
    DisjPoly,
    EmptyPolyhedronError,
    SpaceMismatchError,
    VarSpace,
    bounds,
    conjoin,
    difference,
    eliminate,
    equivalent,
    includes,
    is_empty,
    make_atom,
    minimize,
    reset,
    substitute,
    time_elapse,
    union_add,
)

from conftest import Q, poly
from fm_oracle import is_empty_2d

XY = VarSpace.of(parameters=("x", "y"))
XP = VarSpace.of(clocks=("x",), parameters=("p", "p1"))
CLK = VarSpace.of(clocks=("x", "y"), parameters=("p",))
TP = VarSpace.of(parameters=("t", "p1"))


def same(a, b):
    return equivalent(a, b)


class TestConjoin:
    def test_universe_and_atom(self):
        u = ConvexPoly.universe(XP)
        assert same(conjoin(u, poly(XP, "x <= 2").atoms), poly(XP, "x <= 2"))

    def test_contradiction_kept_syntactically(self):
        p = conjoin(poly(XP, "x <= 2"), poly(XP, "x > 2").atoms)
        assert len(p.atoms) == 2 and is_empty(p)

    def test_parametric(self):
        p = conjoin(poly(XP, "x > p1"), poly(XP, "x = 1.1").atoms)
        assert len(p.atoms) == 2 and not is_empty(p)

    def test_input_untouched(self):
        p = poly(XP, "x <= 2")
        conjoin(p, poly(XP, "x > 1").atoms)
        assert len(p.atoms) == 1

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            poly(XP, "x <= 1") & poly(XY, "x <= 1")


class TestIsEmpty:
    def test_closed_against_open(self):
        assert is_empty(poly(XP, "x <= 2", "x > 2"))

    def test_open_interval(self):
        assert not is_empty(poly(XP, "x < 2", "x > 1"))

    def test_parameter_gap(self):
        assert is_empty(poly(XP, "p > 1.2", "p < 1.2"))

    def test_touching_closed_is_a_point(self):
        assert not is_empty(poly(XP, "x <= 2", "x >= 2"))


class TestEliminate:
    def test_one_fm_step(self):
        assert same(eliminate(poly(XY, "x - y <= 0", "y < 2"), ["y"]), poly(XY, "x < 2"))

    def test_equality_leaves_universe(self):
        assert same(eliminate(poly(XP, "x = p"), ["x"]), ConvexPoly.universe(XP))

    def test_derived_shadow(self):
        shadow = eliminate(poly(TP, "t < 2.8 - p1", "t > 1.7"), ["t"])
        assert same(shadow, poly(TP, "p1 < 1.1"))
        # independent check: the interval (1.7, 2.8 - p1) is non-empty exactly below 1.1
        for k in range(0, 300):
            p1 = Fraction(k, 100)
            assert (Fraction(17, 10) < Fraction(28, 10) - p1) == ([0, p1] in shadow)

    def test_strict_and_weak_combine_strictly(self):
        combos = [("x < y", "y <= 1"), ("x <= y", "y < 1"), ("x < y", "y < 1")]
        for a, b in combos:
            out = eliminate(poly(XY, a, b), ["y"])
            assert same(out, poly(XY, "x < 1"))
        assert same(eliminate(poly(XY, "x <= y", "y <= 1"), ["y"]), poly(XY, "x <= 1"))


class TestElapse:
    def test_from_origin(self):
        out = time_elapse(poly(CLK, "x = 0", "y = 0"))
        assert same(out, poly(CLK, "x = y", "x >= 0"))

    def test_parameters_do_not_move(self):
        s = VarSpace.of(clocks=("x",), parameters=("p",))
        assert same(time_elapse(poly(s, "x = 1", "p = 2")), poly(s, "x >= 1", "p = 2"))

    def test_idempotent(self):
        p = time_elapse(poly(CLK, "x = 0", "y <= 3", "y >= 1", "p >= 0"))
        assert same(time_elapse(p), p)


class TestReset:
    def test_single_clock(self):
        assert same(reset(poly(CLK, "x = 3", "y = 5"), ["x"]), poly(CLK, "x = 0", "y = 5"))

    def test_nothing_to_reset(self):
        p = poly(CLK, "x <= p")
        assert reset(p, []) is p

    def test_parametric_constraint_dropped(self):
        assert same(reset(poly(CLK, "x > p"), ["x"]), poly(CLK, "x = 0"))


class TestIncludes:
    def test_wider_includes_narrower(self):
        assert includes(poly(XP, "x <= 2"), poly(XP, "x < 1"))

    def test_open_misses_boundary(self):
        assert not includes(poly(XP, "x < 1"), poly(XP, "x <= 1"))

    def test_empty_is_included(self):
        assert includes(poly(XP, "x < 1"), ConvexPoly.empty(XP))


class TestSubstitute:
    def test_shift_constant(self):
        out = substitute(poly(TP, "t < 2.8 - p1"), "p1", 1)
        assert out.space.names == ("t",)
        assert same(out, poly(out.space, "t < 1.8"))

    def test_becomes_empty(self):
        assert is_empty(substitute(poly(XP, "p > 1.2"), "p", 1))

    def test_becomes_universe(self):
        out = substitute(poly(XP, "p > 0.7"), "p", 1)
        assert same(out, ConvexPoly.universe(out.space))


class TestDifference:
    def test_cut(self):
        a = DisjPoly(XP, [poly(XP, "0 <= x <= 2")])
        b = DisjPoly(XP, [poly(XP, "x > 1")])
        assert same(difference(a, b), poly(XP, "0 <= x <= 1"))

    def test_self(self):
        a = DisjPoly(XP, [poly(XP, "0 <= x <= 2", "p < x")])
        assert difference(a, a).is_empty()

    def test_nothing_removed(self):
        a = DisjPoly(XP, [poly(XP, "0 <= x <= 2")])
        assert same(difference(a, DisjPoly(XP)), a)


class TestBounds:
    def test_open_lower(self):
        s = VarSpace(("p2",))
        lo, hi = bounds(poly(s, "p2 > 0.7"), "p2")
        assert (lo.value, lo.strict, hi.unbounded) == (Q("0.7"), True, True)

    def test_derived_interval(self):
        lo, hi = bounds(poly(TP, "p1 >= 0", "t < 2.8 - p1", "t > 1.7"), "p1")
        assert (lo.value, lo.strict) == (0, False)
        assert (hi.value, hi.strict) == (Q("1.1"), True)

    def test_point(self):
        lo, hi = bounds(poly(XP, "x = 3"), "x")
        assert lo == hi and (lo.value, lo.strict) == (3, False)

    def test_empty_signalled(self):
        with pytest.raises(EmptyPolyhedronError):
            bounds(poly(XP, "x < 0", "x > 0"), "x")


class TestUnionAdd:
    def test_subsumed_is_skipped(self):
        u = DisjPoly(XP, [poly(XP, "x <= 2")])
        assert len(union_add(u, poly(XP, "x < 1"), subsumption=True)) == 1

    def test_without_subsumption(self):
        u = DisjPoly(XP, [poly(XP, "x <= 2")])
        assert len(union_add(u, poly(XP, "x < 1"), subsumption=False)) == 2

    def test_empty_never_added(self):
        u = DisjPoly(XP, [poly(XP, "x <= 2")])
        assert len(union_add(u, poly(XP, "x < 1", "x > 1"))) == 1


def test_minimize_drops_redundant_atoms():
    m = minimize(poly(XY, "x <= 1", "x <= 2", "x < 3", "y >= 0", "x + y <= 100", "y <= 5"))
    assert len(m.atoms) == 3 and same(m, poly(XY, "x <= 1", "0 <= y <= 5"))


def test_make_atom_is_integral_and_primitive():
    a = make_atom(XY, {"x": Q("0.5"), "y": Q("1.5")}, Q("-0.25"), LE)
    assert (a.coeffs, a.const, a.rel) == ((2, 6), -1, LE)


# property tests ------------------------------------------------------------

small = st.integers(-3, 3)
rel = st.sampled_from([LE, LT, EQ])


def _atom(space, coeffs, const, r):
    return make_atom(space, dict(zip(space.names, coeffs)), const, r)


@st.composite
def polys(draw, space, max_atoms=5):
    n = len(space)
    rows = draw(st.lists(st.tuples(st.lists(small, min_size=n, max_size=n), st.integers(-6, 6), rel), min_size=1, max_size=max_atoms))
    return ConvexPoly(space, [_atom(space, c, k, r) for c, k, r in rows]), rows


XYZ = VarSpace(("x", "y", "z"))
points = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=3, max_size=3)


@settings(max_examples=300, deadline=None)
@given(polys(XYZ), points, st.sampled_from(["x", "y", "z"]))
def test_fm_sound_and_complete(pr, q, var):
    p, _ = pr
    shadow = eliminate(p, [var])
    k = XYZ.index(var)
    point = {v: q[i] for i, v in enumerate(XYZ.names) if i != k}
    fixed = p
    for v, value in point.items():
        fixed = substitute(fixed, v, value)
    q_full = list(q)
    q_full[k] = 0  # the eliminated coordinate is irrelevant to the shadow
    assert (q_full in shadow) == (not is_empty(fixed))


@settings(max_examples=300, deadline=None)
@given(polys(XY, max_atoms=5))
def test_is_empty_matches_vertex_search(pr):
    p, rows = pr
    oracle_rows = []
    for (a, b), c, r in rows:
        oracle_rows.append((a, b, c, {LE: "le", LT: "lt", EQ: "eq"}[r]))
    assert is_empty(p) == is_empty_2d(oracle_rows)


@settings(max_examples=150, deadline=None)
@given(polys(XY, max_atoms=3), polys(XY, max_atoms=3))
def test_mutual_inclusion_iff_empty_differences(pa, pb):
    a, b = pa[0], pb[0]
    both = includes(a, b) and includes(b, a)
    da = difference(DisjPoly(XY, [a]), DisjPoly(XY, [b])).is_empty()
    db = difference(DisjPoly(XY, [b]), DisjPoly(XY, [a])).is_empty()
    assert both == (da and db)


@settings(max_examples=150, deadline=None)
@given(polys(CLK, max_atoms=4))
def test_elapse_monotone_and_idempotent(pr):
    p, _ = pr
    e = time_elapse(p)
    assert includes(e, p)
    assert equivalent(time_elapse(e), e)


def test_fm_trials_seeded():
    rng = random.Random(7)
    for _ in range(200):
        n_atoms = rng.randint(1, 5)
        p = ConvexPoly(XYZ, [_atom(XYZ, [rng.randint(-3, 3) for _ in range(3)], rng.randint(-6, 6), rng.choice([LE, LT, EQ])) for _ in range(n_atoms)])
        q = [Fraction(rng.randint(-20, 20), 4) for _ in range(3)]
        shadow = eliminate(p, ["z"])
        fixed = substitute(substitute(p, "x", q[0]), "y", q[1])
        assert (q[:2] + [0] in shadow) == (not is_empty(fixed))
