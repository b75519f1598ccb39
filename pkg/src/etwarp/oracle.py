"""Exhaustive search over interlacing patterns for small instances."""

from __future__ import annotations

from functools import lru_cache

from .core import Move, TimeSeries, WarpingPath
from .etw import path_value

__all__ = ["MAX_SIDE", "enumerate_patterns", "brute_force_similarity"]

MAX_SIDE = 12


def _check_cap(n: int, m: int, cap: int) -> None:
    if n < 1 or m < 1:
        raise ValueError(f"sizes must be positive, got ({n}, {m})")
    if n > cap or m > cap:
        raise ValueError(f"oracle is capped at {cap} samples per series, got ({n}, {m})")


@lru_cache(maxsize=None)
def _patterns(i: int, j: int) -> tuple[tuple[Move, ...], ...]:
    # All move sequences from (0, 0) to (i, j). The last move is varied
    # first (F by increasing count, then G) to mirror the DP tie-break.
    if (i, j) == (0, 0):
        return ((),)
    if i <= 0 or j <= 0:
        return ()
    out = []
    for k in range(1, i + 1):
        for head in _patterns(i - k, j - 1):
            out.append(head + (Move("F", k, i, j),))
    for p in range(2, j + 1):
        for head in _patterns(i - 1, j - p):
            out.append(head + (Move("G", p, i, j),))
    return tuple(out)


def enumerate_patterns(n: int, m: int, cap: int = MAX_SIDE) -> list[WarpingPath]:
    """Every admissible F/G pattern from (0, 0) to (n, m)."""
    _check_cap(n, m, cap)
    return [WarpingPath(moves) for moves in _patterns(n, m)]


def brute_force_similarity(
    f: TimeSeries, g: TimeSeries, C, cap: int = MAX_SIDE
) -> tuple[float, WarpingPath]:
    """Best pattern value by enumeration; the first maximizer wins ties."""
    _check_cap(len(f), len(g), cap)
    best, arg = -1.0, None
    for moves in _patterns(len(f), len(g)):
        path = WarpingPath(moves)
        v = path_value(path, f, g, C)
        if v > best:
            best, arg = v, path
    return best, arg
