import json
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptpm.engine import MatchSet, ptpm, ptpm_fixed
from ptpm.io import (
    ParseError,
    format_decimal,
    format_pattern,
    format_word,
    gnuplot_script,
    parse_pattern,
    parse_word,
    polygons_csv,
    project_2d,
    read_result,
    result_document,
    write_result,
)
from ptpm.model import DomainError, TimedWord
from ptpm.patterns import BUILTIN, running_example_word
from ptpm.polyhedron import DisjPoly, VarSpace, contains_point, eliminate, equivalent
from ptpm.transform import PatternError, normalize_pattern

from conftest import Q

DATA = Path(__file__).resolve().parent.parent / "data"
FIG_TEXT = "a 0.5\na 0.9\nb 1.3\nb 1.7\na 2.8\na 3.7\na 4.9\na 5.3\na 6.0"


class TestWords:
    def test_fig_word(self):
        assert parse_word(FIG_TEXT) == running_example_word()

    def test_exact_decimals(self):
        assert parse_word("a 0.5").events[0].time == Fraction(1, 2)

    def test_repeated_timestamp(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_word("a 1\na 1")

    def test_empty(self):
        assert parse_word("") == TimedWord()

    def test_comments_and_blank_lines(self):
        assert len(parse_word("; header\n\na 1\n  \n; more\nb 2\n")) == 2

    @pytest.mark.parametrize("text", ["$ 1", "start 1", "a", "a -1", "a 1e3", "1a 2", "a 1 2"])
    def test_malformed(self, text):
        with pytest.raises(ParseError, match="line 1"):
            parse_word(text)

    def test_format_round_trip(self):
        w = parse_word(FIG_TEXT)
        assert parse_word(format_word(w)) == w

    def test_non_decimal_time_cannot_be_written(self):
        with pytest.raises(ValueError):
            format_decimal(Fraction(1, 3))


def load(name):
    return parse_pattern((DATA / name).read_text())


class TestPatterns:
    def test_running_example(self):
        p = load("running.pat.json")
        assert (len(p.locations), len(p.edges), p.parameters) == (5, 4, ("p1", "p2"))

    def test_gear(self):
        p = load("gear.pat.json")
        assert len(p.locations) == 4
        (g2,) = [e for e in p.edges if e.action == "g2"]
        assert [str(a) for a in g2.guard] == ["x < p"]

    def test_terminal_into_plain_location_parses_then_fails_normalization(self):
        doc = json.loads((DATA / "running.pat.json").read_text())
        doc["edges"].append({"source": "l0", "target": "l1", "action": "$"})
        doc["accepting"] = ["l4", "l1"]
        p = parse_pattern(json.dumps(doc))
        with pytest.raises(PatternError):
            normalize_pattern(p, {"a", "b"})

    @pytest.mark.parametrize(
        "mutate, field",
        [
            (lambda d: d.pop("initial"), "initial"),
            (lambda d: d["edges"][0]["guard"][0].update(op="=<"), "op"),
            (lambda d: d["edges"][0].update(target="nowhere"), "edges"),
            (lambda d: d["edges"][0]["guard"][0].update(rhs={"param": "q"}), "edges"),
        ],
    )
    def test_errors_name_the_field(self, mutate, field):
        doc = json.loads((DATA / "running.pat.json").read_text())
        mutate(doc)
        with pytest.raises(ParseError, match=field):
            parse_pattern(json.dumps(doc))

    @pytest.mark.parametrize("name", sorted(BUILTIN))
    def test_round_trip(self, name):
        p = BUILTIN[name]()
        assert parse_pattern(format_pattern(p)) == p


class TestResults:
    def test_running_example_text(self, fig_pattern, fig_word):
        doc, text = write_result(ptpm(fig_pattern, fig_word))
        assert len(doc["disjuncts"]) == 3 and doc["stats"]["matches"] == 3
        assert "p2 > 7/10" in text
        assert doc["variables"] == ["p1", "p2", "t", "t_prime"]

    def test_empty(self):
        space = VarSpace(("t", "t_prime"))
        doc, text = write_result(MatchSet(space, DisjPoly(space)))
        assert doc["disjuncts"] == [] and text.strip() == "no match"

    def test_round_trip(self, fig_pattern, fig_word):
        m = ptpm(fig_pattern, fig_word)
        back = read_result(json.dumps(result_document(m)))
        assert equivalent(back.disjuncts, m.disjuncts)
        assert back.states == m.states

    def test_deterministic_order(self, fig_pattern, fig_word):
        a = result_document(ptpm(fig_pattern, fig_word))
        b = result_document(ptpm(fig_pattern, fig_word))
        a["stats"].pop("comp_seconds")
        b["stats"].pop("comp_seconds")
        assert a == b

    def test_rationals_in_lowest_terms(self, fig_pattern, fig_word):
        doc = result_document(ptpm(fig_pattern, fig_word))
        for d in doc["disjuncts"]:
            for atom in d:
                for v in list(atom["coeffs"].values()) + [atom["const"]]:
                    num, den = (int(x) for x in v.split("/"))
                    assert Fraction(num, den).denominator == den and den > 0

    def test_bad_document(self):
        with pytest.raises(ParseError):
            read_result('{"variables": ["t"], "disjuncts": [[{"coeffs": {"q": "1/1"}, "const": "0/1", "rel": "le"}]]}')


class TestProjection:
    def test_parameter_plane(self, fig_pattern, fig_word):
        polys = project_2d(ptpm(fig_pattern, fig_word), "p1", "p2", (0, 2, 0, 3))
        assert len(polys) == 3
        boxes = sorted((max(v[0] for v in p.vertices), min(v[1] for v in p.vertices)) for p in polys)
        assert boxes == [(Q("0.9"), Q("1.2")), (Q("1.1"), Q("1.2")), (Q("1.2"), Q("0.7"))]
        assert all(any(p.clipped) for p in polys)

    def test_empty(self):
        space = VarSpace(("t", "t_prime"))
        assert project_2d(MatchSet(space, DisjPoly(space)), "t", "t_prime", (0, 1, 0, 1)) == []
        assert polygons_csv([], "t", "t_prime").count("\n") <= 1

    def test_fixed_valuation_rectangle(self, fig_pattern, fig_word):
        m = ptpm_fixed(fig_pattern, fig_word, {"p1": 1, "p2": 1})
        (poly,) = project_2d(m, "t", "t_prime", (0, 8, 0, 8))
        assert sorted(poly.vertices) == [(Q("3.7"), 6), (Q("3.7"), 8), (Q("3.9"), 6), (Q("3.9"), 8)]
        top = [k for k, v in enumerate(poly.vertices) if v[1] == 8 and poly.vertices[(k + 1) % 4][1] == 8]
        assert [poly.clipped[k] for k in top] == [True]
        assert sum(poly.clipped) == 1

    def test_start_end_plane(self, fig_pattern, fig_word):
        assert len(project_2d(ptpm(fig_pattern, fig_word), "t", "t_prime", (0, 8, 0, 8))) == 3

    def test_unknown_variable(self, fig_pattern, fig_word):
        with pytest.raises(DomainError):
            project_2d(ptpm(fig_pattern, fig_word), "p1", "zz", (0, 1, 0, 1))

    def test_vertices_counterclockwise(self, fig_pattern, fig_word):
        for p in project_2d(ptpm(fig_pattern, fig_word), "t", "t_prime", (0, 8, 0, 8)):
            vs = p.vertices
            area2 = sum(vs[k][0] * vs[(k + 1) % len(vs)][1] - vs[(k + 1) % len(vs)][0] * vs[k][1] for k in range(len(vs)))
            assert area2 > 0

    def test_csv_and_script(self, fig_pattern, fig_word):
        polys = project_2d(ptpm(fig_pattern, fig_word), "p1", "p2", (0, 2, 0, 3))
        csv = polygons_csv(polys, "p1", "p2")
        assert csv.splitlines()[0] == "polygon,vertex,p1,p2,p1_exact,p2_exact,clipped_next"
        assert "out.csv" in gnuplot_script("out.csv", "p1", "p2", (0, 2, 0, 3))

    def test_samples_agree_with_shadows(self, fig_pattern, fig_word):
        m = ptpm(fig_pattern, fig_word)
        polys = project_2d(m, "p1", "p2", (0, 2, 0, 3))
        shadows = [eliminate(d, ["t", "t_prime"]) for d in m.disjuncts]
        rng = random.Random(11)
        for _ in range(400):
            x, y = Fraction(rng.randint(1, 199), 100), Fraction(rng.randint(1, 299), 100)
            in_shadow = any(contains_point(s, [x, y, 0, 0]) for s in shadows)
            in_polygon = any(_strictly_inside(p.vertices, (x, y)) for p in polys)
            on_border = any(_on_border(p.vertices, (x, y)) for p in polys)
            if not on_border:
                assert in_shadow == in_polygon, (x, y)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _strictly_inside(vs, q):
    return all(_cross(vs[k], vs[(k + 1) % len(vs)], q) > 0 for k in range(len(vs)))


def _on_border(vs, q):
    for k in range(len(vs)):
        a, b = vs[k], vs[(k + 1) % len(vs)]
        if _cross(a, b, q) == 0 and min(a[0], b[0]) <= q[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= q[1] <= max(a[1], b[1]):
            return True
    return False


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["a", "b", "g1"]), st.integers(1, 5000)), max_size=12))
def test_word_round_trip(pairs):
    times, now = [], 0
    for _, gap in pairs:
        now += gap
        times.append(Fraction(now, 1000))
    w = TimedWord([(a, t) for (a, _), t in zip(pairs, times)])
    assert parse_word(format_word(w)) == w
