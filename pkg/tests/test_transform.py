import pytest

from ptpm.model import START, TERMINAL, Edge, GuardAtom, Pta, TimedWord
from ptpm.patterns import accel, blowup, gear, running_example
from ptpm.transform import (
    ABS_CLOCK,
    PatternError,
    branching_factor,
    make_symbolic,
    normalize_pattern,
    sync_product,
    tw2pta,
)

from conftest import Q

G = GuardAtom


def two_final_pattern():
    return Pta(
        {"a", "b"},
        ("l0", "l1", "f1", "f2"),
        "l0",
        {"f1", "f2"},
        ("x",),
        (),
        {},
        (
            Edge("l0", "a", "l1", (), {"x"}),
            Edge("l1", TERMINAL, "f1"),
            Edge("l0", TERMINAL, "f2", (G("x", ">", 1),)),
        ),
    )


class TestNormalize:
    def test_running_example_unchanged(self, fig_pattern):
        out = normalize_pattern(fig_pattern, {"a", "b"})
        assert out.locations == fig_pattern.locations
        assert out.edges == fig_pattern.edges
        assert out.accepting == fig_pattern.accepting
        assert out.alphabet == {"a", "b", TERMINAL}

    def test_foreign_action_edge_deleted(self, fig_pattern):
        extra = fig_pattern.replace(
            alphabet=fig_pattern.alphabet | {"c"}, edges=fig_pattern.edges + (Edge("l1", "c", "l0"),)
        )
        out = normalize_pattern(extra, {"a", "b"})
        assert all(e.action != "c" for e in out.edges)
        assert len(out.edges) == 4

    def test_accepting_locations_merged(self):
        out = normalize_pattern(two_final_pattern(), {"a", "b"})
        assert len(out.accepting) == 1
        (final,) = out.accepting
        into = [e for e in out.edges if e.target == final]
        assert len(into) == 2 and all(e.action == TERMINAL for e in into)

    def test_no_accepting_location(self, fig_pattern):
        with pytest.raises(PatternError):
            normalize_pattern(fig_pattern.replace(accepting=frozenset()), {"a"})

    def test_non_terminal_edge_into_final(self, fig_pattern):
        bad = fig_pattern.replace(edges=fig_pattern.edges + (Edge("l2", "a", "l4"),))
        with pytest.raises(PatternError):
            normalize_pattern(bad, {"a", "b"})

    def test_accepting_invariant_moves_onto_terminal_edge(self, fig_pattern):
        pat = fig_pattern.replace(invariants={"l4": (G("x", "<", 3),)})
        out = normalize_pattern(pat, {"a", "b"})
        (final,) = out.accepting
        (edge,) = [e for e in out.edges if e.target == final]
        assert G("x", "<", 3) in edge.guard


class TestMakeSymbolic:
    def test_running_example_shape(self, fig_pattern):
        sym = make_symbolic(normalize_pattern(fig_pattern, {"a", "b"}), {"a", "b"})
        assert len(sym.locations) == 8
        assert len(sym.accepting) == 1
        (post,) = sym.accepting
        assert post not in fig_pattern.locations
        assert sym.initial == "l0''"

    @pytest.mark.parametrize("factory", [running_example, gear, accel, blowup])
    def test_construction_arithmetic(self, factory):
        pat = factory()
        sigma = pat.alphabet - {TERMINAL}
        norm = normalize_pattern(pat, sigma)
        sym = make_symbolic(norm, sigma)
        assert len(sym.locations) == len(norm.locations) + 3
        assert len(sym.parameters) == len(norm.parameters) + 2
        assert len(sym.clocks) - 1 - len(norm.clocks) <= 1  # x_abs plus at most one helper
        dropped = sum(1 for e in norm.edges if e.source in norm.accepting)
        assert len(sym.edges) - (len(norm.edges) - dropped) == 2 * len(sigma) + 2 + 1

    def test_start_and_terminal_guards(self, fig_pattern):
        sym = make_symbolic(normalize_pattern(fig_pattern, {"a", "b"}), {"a", "b"})
        starts = [e for e in sym.edges if e.action == START]
        assert len(starts) == 2
        assert all(G(ABS_CLOCK, "=", "t") in e.guard for e in starts)
        (dollar,) = [e for e in sym.edges if e.action == TERMINAL]
        assert G(ABS_CLOCK, "=", "t_prime") in dollar.guard
        assert "x_new" in dollar.resets

    def test_clock_reuse(self):
        pat = normalize_pattern(gear(), {"g1", "g2"})
        sym = make_symbolic(pat, {"g1", "g2"}, reuse_clock=True)
        assert sym.clocks == (ABS_CLOCK, "x")

    def test_reserved_names(self, fig_pattern):
        bad = fig_pattern.replace(parameters=("p1", "p2", "t"))
        with pytest.raises(PatternError):
            make_symbolic(normalize_pattern(bad, {"a"}), {"a"})


class TestTw2Pta:
    def test_fig_word(self, fig_word):
        a = tw2pta(fig_word)
        assert (len(a.locations), len(a.edges)) == (10, 9)
        assert a.accepting == frozenset()

    def test_empty_word(self):
        a = tw2pta(TimedWord())
        assert (len(a.locations), len(a.edges)) == (1, 0)

    def test_invariants(self, fig_word):
        a = tw2pta(fig_word)
        assert a.invariant("w8") == (G(ABS_CLOCK, "<=", Q("6.0")),)
        assert a.invariant("w9") == ()

    def test_declared_alphabet(self, fig_word):
        assert tw2pta(fig_word, {"a", "b", "c"}).alphabet == {"a", "b", "c"}

    def test_unique_run_reads_the_word(self, fig_word):
        a = tw2pta(fig_word)
        loc, read = a.initial, []
        while a.edges_from(loc):
            (e,) = a.edges_from(loc)
            (g,) = e.guard
            read.append((e.action, g.rhs))
            loc = e.target
        assert read == [(ev.action, ev.time) for ev in fig_word]


class TestProduct:
    def test_pipeline_initial_location(self, fig_pattern, fig_word):
        sym = make_symbolic(normalize_pattern(fig_pattern, {"a", "b"}), {"a", "b"})
        prod = sync_product([sym, tw2pta(fig_word, {"a", "b"})])
        assert prod.initial == ("l0''", "w0")

    def test_single_component(self, fig_pattern):
        prod = sync_product([fig_pattern]).to_pta()
        assert len(prod.locations) == len(fig_pattern.locations)
        assert sorted((e.source[0], e.action, e.target[0]) for e in prod.edges) == sorted(
            (e.source, e.action, e.target) for e in fig_pattern.edges
        )

    def test_pattern_local_start_freezes_word(self, fig_pattern, fig_word):
        sym = make_symbolic(normalize_pattern(fig_pattern, {"a", "b"}), {"a", "b"})
        prod = sync_product([sym, tw2pta(fig_word, {"a", "b"})])
        starts = [e for e in prod.edges_from(prod.initial) if e.action == START]
        assert [e.target for e in starts] == [("l0", "w0")]

    def test_shared_action_blocks_when_one_side_cannot_move(self):
        w = tw2pta(TimedWord([("b", 1)]), {"a", "b"})
        sym = make_symbolic(normalize_pattern(running_example(), {"a", "b"}), {"a", "b"})
        prod = sync_product([sym, w])
        # from l0 only 'a' is possible in the pattern, only 'b' in the word
        assert prod.edges_from(("l0", "w0")) == ()

    def test_location_count_bound(self, fig_pattern):
        w = tw2pta(TimedWord([("a", 1), ("a", 2)]))
        prod = sync_product([fig_pattern, w]).to_pta()
        assert len(prod.locations) <= len(fig_pattern.locations) * len(w.locations)


def _accepting_paths(prod, locs, path, out):
    if prod.is_accepting(locs):
        out.append(list(path))
        return
    for e in prod.edges_from(locs):
        path.append(e.action)
        _accepting_paths(prod, e.target, path, out)
        path.pop()


@pytest.mark.parametrize(
    "factory, actions",
    [(running_example, "b a a a"), (gear, "g1 g2 g1 g2"), (blowup, "a b a b")],
)
def test_accepting_paths_fire_start_once_and_terminal_last_but_one(factory, actions):
    pat = factory()
    sigma = sorted(pat.alphabet - {TERMINAL})
    w = TimedWord([(a, k + 1) for k, a in enumerate(actions.split())])
    sym = make_symbolic(normalize_pattern(pat, sigma), sigma)
    prod = sync_product([sym, tw2pta(w, sigma)])
    paths = []
    _accepting_paths(prod, prod.initial, [], paths)
    assert paths
    for p in paths:
        assert p.count(START) == 1 and p.count(TERMINAL) == 1
        assert p[-2] == TERMINAL
        first_pattern = p.index(START)
        assert all(a in sigma for a in p[:first_pattern])


def test_branching_factor():
    assert branching_factor(running_example()) == 1
    assert branching_factor(blowup()) == 1
    assert branching_factor(accel()) >= 1
