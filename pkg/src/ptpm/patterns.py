"""Ready-made patterns: the running example and the three benchmark shapes."""

from __future__ import annotations

from .model import TERMINAL, Edge, GuardAtom, Pta, TimedWord

G = GuardAtom


def running_example() -> Pta:
    """Three ``a`` events: a gap above p1, then two gaps below p2, then the end."""
    return Pta(
        alphabet={"a", "b"},
        locations=("l0", "l1", "l2", "l3", "l4"),
        initial="l0",
        accepting={"l4"},
        clocks=("x",),
        parameters=("p1", "p2"),
        invariants={},
        edges=(
            Edge("l0", "a", "l1", (G("x", ">", "p1"),), {"x"}),
            Edge("l1", "a", "l2", (G("x", "<", "p2"),), {"x"}),
            Edge("l2", "a", "l3", (G("x", "<", "p2"),)),
            Edge("l3", TERMINAL, "l4"),
        ),
    )


def running_example_word() -> TimedWord:
    return TimedWord(
        [
            ("a", "0.5"),
            ("a", "0.9"),
            ("b", "1.3"),
            ("b", "1.7"),
            ("a", "2.8"),
            ("a", "3.7"),
            ("a", "4.9"),
            ("a", "5.3"),
            ("a", "6.0"),
        ]
    )


def gear() -> Pta:
    """Gear 1 then gear 2 less than ``p`` later."""
    return Pta(
        alphabet={"g1", "g2", "g3", "g4"},
        locations=("init", "g1", "g2", "done"),
        initial="init",
        accepting={"done"},
        clocks=("x",),
        parameters=("p",),
        invariants={},
        edges=(
            Edge("init", "g1", "g1", (), {"x"}),
            Edge("g1", "g2", "g2", (G("x", "<", "p"),)),
            Edge("g2", TERMINAL, "done"),
        ),
    )


def accel() -> Pta:
    """Gears 1 to 4 within ``p``, then high RPM, gears 1 to 4 again, lasting over 1."""
    main = ["idle", "g1", "g2", "g3", "g4"]
    primed = [loc + "'" for loc in main]
    edges = []
    for chain in (main, primed):
        for k, gear_name in enumerate(("g1", "g2", "g3", "g4")):
            if gear_name == "g4":
                edges.append(Edge(chain[k], gear_name, chain[k + 1], (G("x", "<=", "p"),), {"x"}))
            else:
                edges.append(Edge(chain[k], gear_name, chain[k + 1]))
    for loc, loc_primed in zip(main, primed):
        edges.append(Edge(loc, "rpmHigh", loc_primed))
    edges.append(Edge(primed[-1], TERMINAL, "done", (G("x", ">", 1),)))
    return Pta(
        alphabet={"g1", "g2", "g3", "g4", "rpmHigh"},
        locations=tuple(main + primed + ["done"]),
        initial="idle",
        accepting={"done"},
        clocks=("x",),
        parameters=("p",),
        invariants={},
        edges=tuple(edges),
    )


def blowup() -> Pta:
    """Alternating ``a``/``b`` whose match count grows quadratically."""
    return Pta(
        alphabet={"a", "b"},
        locations=("l1", "l2", "l3", "l4"),
        initial="l1",
        accepting={"l4"},
        clocks=("x", "y"),
        parameters=("p1", "p2", "p3"),
        invariants={},
        edges=(
            Edge("l1", "a", "l2", (), {"y"}),
            Edge("l2", "b", "l3", (G("x", "<", "p1"),)),
            Edge("l3", TERMINAL, "l4", (G("x", "=", "p1"),)),
            Edge("l3", "a", "l2", (G("y", ">=", "p3"), G("y", "<", "p2")), {"y"}),
        ),
    )


BUILTIN = {
    "running": running_example,
    "gear": gear,
    "accel": accel,
    "blowup": blowup,
}
