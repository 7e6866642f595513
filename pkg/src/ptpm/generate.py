"""Deterministic benchmark words driven by a 32-bit linear congruential generator."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .model import DomainError, TimedWord

LCG_A = 1664525
LCG_C = 1013904223
LCG_M = 2**32


def lcg_gaps(seed: int) -> Iterator[Fraction]:
    """Inter-event gaps in [0.05, 0.949], in steps of 0.001."""
    state = seed % LCG_M
    while True:
        state = (LCG_A * state + LCG_C) % LCG_M
        yield Fraction(state % 900 + 50, 1000)


def _timestamps(count: int, seed: int) -> list[Fraction]:
    gaps = lcg_gaps(seed)
    out, now = [], Fraction(0)
    for _ in range(count):
        now += next(gaps)
        out.append(now)
    return out


def blowup_word(events: int, seed: int = 0) -> TimedWord:
    """``a b a b ...`` with ``events`` events (even, at least 2)."""
    if events < 2 or events % 2:
        raise DomainError(f"blowup words need an even number of events >= 2, got {events}")
    times = _timestamps(events, seed)
    return TimedWord([("a" if k % 2 == 0 else "b", tau) for k, tau in enumerate(times)])


def gear_word(events: int, seed: int = 0) -> TimedWord:
    """Gear shifts cycling up 1..4 then down 4..1, one event per gap."""
    if events < 0:
        raise DomainError(f"event count must be non-negative, got {events}")
    cycle = ("g1", "g2", "g3", "g4", "g3", "g2")
    times = _timestamps(events, seed)
    return TimedWord([(cycle[k % len(cycle)], tau) for k, tau in enumerate(times)])
