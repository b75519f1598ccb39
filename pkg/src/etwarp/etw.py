"""Elastic time warping: the block dynamic program and warp reconstruction.

Notation: ``f`` has samples ``f_0..f_{n-1}`` at times ``s_0..s_{n-1}`` and
``g`` has ``g_0..g_{m-1}`` at ``t_0..t_{m-1}``; both grids get the terminal
instant ``s_n = t_m = 1``. ``V[i, j]`` is the best value of
``int_0^{t_j} C(f(alpha(tau)), g(tau)) sqrt(alpha'(tau)) dtau`` over warps
with ``alpha(t_j) = s_i``, restricted to interlacing patterns built from

* F-moves ``(i-k, j-1) -> (i, j)``: samples ``f_{i-k}..f_{i-1}`` share the
  interval ``[t_{j-1}, t_j]``;
* G-moves ``(i-1, j-p) -> (i, j)``, ``p >= 2``: sample ``f_{i-1}`` spans
  ``[t_{j-p}, t_j]``.

Each block has a closed-form optimum (Cauchy-Schwarz), so the recurrence
only maximizes over block sizes. One cell costs O(n + m) thanks to running
sums of the squared block terms, for O(nm(n + m)) overall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (
    DegenerateWarpError,
    EtwResult,
    Move,
    PiecewiseLinearDiffeo,
    SimilarityMatrix,
    TimeSeries,
    ValueMetric,
    WarpingPath,
    build_similarity_matrix,
)

__all__ = [
    "DpState",
    "block_f_value",
    "block_g_value",
    "fill_table",
    "elastic_similarity",
    "etw_similarity",
    "decode_path",
    "path_value",
    "reconstruct_alpha",
    "evaluate_objective",
    "dtw_baseline",
]

BRANCH_NONE, BRANCH_F, BRANCH_G = 0, 1, 2


def _as_matrix(C, n: int, m: int) -> np.ndarray:
    c = C.entries if isinstance(C, SimilarityMatrix) else np.asarray(C, dtype=float)
    if c.shape != (n, m):
        raise ValueError(f"similarity matrix has shape {c.shape}, expected {(n, m)}")
    return c


def block_f_value(f: TimeSeries, g: TimeSeries, C, i: int, j: int, k: int) -> float:
    """Optimal contribution of ``f_{i-k}..f_{i-1}`` matched inside ``[t_{j-1}, t_j]``.

    ``sqrt((t_j - t_{j-1}) * sum_l (s_{i-l} - s_{i-l-1}) C(f_{i-l-1}, g_{j-1})**2)``
    for ``l = 0..k-1``.
    """
    n, m = len(f), len(g)
    c = _as_matrix(C, n, m)
    if not (1 <= k <= i <= n and 1 <= j <= m):
        raise IndexError(f"F-block out of range: i={i}, j={j}, k={k} for n={n}, m={m}")
    s, t = f.grid, g.grid
    acc = 0.0
    for l in range(k):
        r = i - l - 1
        acc += (s[r + 1] - s[r]) * c[r, j - 1] ** 2
    return math.sqrt((t[j] - t[j - 1]) * acc)


def block_g_value(f: TimeSeries, g: TimeSeries, C, i: int, j: int, p: int) -> float:
    """Optimal contribution of ``f_{i-1}`` stretched over ``[t_{j-p}, t_j]``."""
    n, m = len(f), len(g)
    c = _as_matrix(C, n, m)
    if not (1 <= p <= j <= m and 1 <= i <= n):
        raise IndexError(f"G-block out of range: i={i}, j={j}, p={p} for n={n}, m={m}")
    s, t = f.grid, g.grid
    acc = 0.0
    for l in range(p):
        q = j - l - 1
        acc += (t[q + 1] - t[q]) * c[i - 1, q] ** 2
    return math.sqrt((s[i] - s[i - 1]) * acc)


@njit(cache=True, nogil=True)
def _fill(s, t, c2, table, branch, count):  # pragma: no cover - compiled
    n = s.size - 1
    m = t.size - 1
    table[:, :] = -np.inf
    table[0, 0] = 0.0
    for j in range(1, m + 1):
        dt = t[j] - t[j - 1]
        for i in range(1, n + 1):
            best = -np.inf
            bb = 0
            bc = 0
            # F-moves: k = i on the first column, else 1 <= k < i
            kmax = i if j == 1 else i - 1
            kmin = i if j == 1 else 1
            acc = 0.0
            for k in range(1, kmax + 1):
                r = i - k
                acc += (s[r + 1] - s[r]) * c2[r, j - 1]
                if k >= kmin:
                    cand = table[r, j - 1] + math.sqrt(dt * acc)
                    if cand > best:
                        best = cand
                        bb = 1
                        bc = k
            # G-moves: p = j on the first row, else 2 <= p < j
            ds = s[i] - s[i - 1]
            pmax = j if i == 1 else j - 1
            pmin = j if i == 1 else 2
            if pmin < 2:
                pmin = 2
            acc = 0.0
            for p in range(1, pmax + 1):
                q = j - p
                acc += (t[q + 1] - t[q]) * c2[i - 1, q]
                if p >= pmin:
                    cand = table[i - 1, q] + math.sqrt(ds * acc)
                    if cand > best:
                        best = cand
                        bb = 2
                        bc = p
            table[i, j] = best
            branch[i, j] = bb
            count[i, j] = bc


@dataclass(frozen=True, eq=False)
class DpState:
    """Filled value table and backpointers.

    Border cells ``table[i, 0]`` and ``table[0, j]`` (other than the origin)
    are unreachable and hold ``-inf``.
    """

    table: np.ndarray
    branch: np.ndarray
    count: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        n1, m1 = self.table.shape
        return n1 - 1, m1 - 1


def fill_table(f: TimeSeries, g: TimeSeries, C) -> DpState:
    n, m = len(f), len(g)
    c = _as_matrix(C, n, m)
    table = np.empty((n + 1, m + 1))
    branch = np.zeros((n + 1, m + 1), dtype=np.int8)
    count = np.zeros((n + 1, m + 1), dtype=np.int64)
    _fill(f.grid, g.grid, np.ascontiguousarray(c * c), table, branch, count)
    if not np.all(np.isfinite(table[1:, 1:])):
        raise AssertionError("recurrence left a reachable cell unset")
    if np.any(np.isfinite(table[1:, 0])) or np.any(np.isfinite(table[0, 1:])):
        raise AssertionError("recurrence wrote an unreachable border cell")
    return DpState(table, branch, count)


def decode_path(state: DpState) -> WarpingPath:
    """Backtrace the optimal interlacing pattern from (n, m) to (0, 0)."""
    i, j = state.shape
    moves = []
    while (i, j) != (0, 0):
        b, k = int(state.branch[i, j]), int(state.count[i, j])
        if b == BRANCH_F:
            moves.append(Move("F", k, i, j))
            i, j = i - k, j - 1
        elif b == BRANCH_G:
            moves.append(Move("G", k, i, j))
            i, j = i - 1, j - k
        else:
            raise AssertionError(f"no backpointer at reachable cell {(i, j)}")
        if i < 0 or j < 0:
            raise AssertionError("backpointer leaves the table")
    return WarpingPath(tuple(reversed(moves)))


def path_value(path: WarpingPath, f: TimeSeries, g: TimeSeries, C) -> float:
    """Sum of closed-form block values along a pattern."""
    total = 0.0
    for mv in path:
        if mv.branch == "F":
            total += block_f_value(f, g, C, mv.end_i, mv.end_j, mv.count)
        else:
            total += block_g_value(f, g, C, mv.end_i, mv.end_j, mv.count)
    return total


def reconstruct_alpha(
    path: WarpingPath,
    f: TimeSeries,
    g: TimeSeries,
    C,
    slope_floor: float = 1e-12,
) -> PiecewiseLinearDiffeo:
    """Optimal piecewise-linear warp realising ``path``.

    Inside an F-block, ``alpha`` rises through ``s_{i-k}, ..., s_i`` over
    ``[t_{j-1}, t_j]``; the time spent on sample ``r`` is proportional to
    ``C(f_r, g_{j-1})**2 * (s_{r+1} - s_r)``. Inside a G-block the slope
    over ``[t_q, t_{q+1}]`` is proportional to ``C(f_{i-1}, g_q)**2``,
    scaled so the total rise is ``s_i - s_{i-1}``.

    Raises
    ------
    DegenerateWarpError
        If a G-block slope falls below ``slope_floor`` or an F-block
        crossing collapses onto its neighbour in floating point.
    """
    n, m = len(f), len(g)
    c = _as_matrix(C, n, m)
    if path.end != (n, m):
        raise ValueError(f"path ends at {path.end}, expected {(n, m)}")
    s, t = f.grid, g.grid
    xs, ys = [0.0], [0.0]
    for mv in path:
        i, j = mv.end_i, mv.end_j
        if mv.branch == "F" and mv.count > 1:
            rows = np.arange(i - mv.count, i)
            weight = c[rows, j - 1] ** 2 * np.diff(s[i - mv.count : i + 1])
            frac = weight / weight.sum()
            cross = t[j - 1] + (t[j] - t[j - 1]) * np.cumsum(frac)
            xs.extend(cross[:-1])
            ys.extend(s[i - mv.count + 1 : i])
        elif mv.branch == "G":
            cols = np.arange(j - mv.count, j)
            dt = np.diff(t[j - mv.count : j + 1])
            weight = c[i - 1, cols] ** 2
            slope = (s[i] - s[i - 1]) * weight / np.dot(dt, weight)
            if slope.min() < slope_floor:
                raise DegenerateWarpError(f"G-block ending at {(i, j)} is degenerate")
            rise = s[i - 1] + np.cumsum(dt * slope)
            xs.extend(t[j - mv.count + 1 : j])
            ys.extend(rise[:-1])
        xs.append(t[j])
        ys.append(s[i])
    try:
        return PiecewiseLinearDiffeo(xs, ys)
    except ValueError as exc:
        raise DegenerateWarpError(str(exc)) from exc


def evaluate_objective(
    f: TimeSeries, g: TimeSeries, C, alpha: PiecewiseLinearDiffeo
) -> float:
    """Exact ``int_0^1 C(f(alpha(tau)), g(tau)) sqrt(alpha'(tau)) dtau``.

    On every piece between the knots of ``alpha``, the g-grid and the
    preimages of the f-grid the integrand is constant.
    """
    n, m = len(f), len(g)
    c = _as_matrix(C, n, m)
    x = np.unique(
        np.concatenate([alpha.knots, g.grid, alpha.inverse_at(f.grid)])
    )
    x = x[(x >= 0.0) & (x <= 1.0)]
    w = np.diff(x)
    mids = 0.5 * (x[:-1] + x[1:])
    seg = np.searchsorted(alpha.knots, mids, side="right") - 1
    slope = alpha.slopes[np.clip(seg, 0, alpha.slopes.size - 1)]
    fi = np.searchsorted(f.timestamps, alpha(mids), side="right") - 1
    gj = np.searchsorted(g.timestamps, mids, side="right") - 1
    return float(np.sum(c[fi, gj] * np.sqrt(slope) * w))


def elastic_similarity(
    f: TimeSeries, g: TimeSeries, C, slope_floor: float = 1e-12
) -> EtwResult:
    """Elastic time warping similarity of ``f`` and ``g`` under ``C``.

    Parameters
    ----------
    f, g : TimeSeries
        Series of lengths n and m.
    C : SimilarityMatrix or array_like, shape (n, m)
        Pointwise similarities in (0, 1].
    slope_floor : float
        Passed to :func:`reconstruct_alpha`; ``alpha`` is left as None when
        the optimal warp is degenerate.

    Returns
    -------
    EtwResult
        ``value`` is ``V[n, m]``, always in (0, 1] for entries in (0, 1].
    """
    if len(f) == 0 or len(g) == 0:
        raise ValueError("empty series")
    c = _as_matrix(C, len(f), len(g))
    if np.any(c <= 0) or np.any(c > 1) or not np.all(np.isfinite(c)):
        raise ValueError("similarity entries must lie in (0, 1]")
    state = fill_table(f, g, c)
    path = decode_path(state)
    try:
        alpha = reconstruct_alpha(path, f, g, c, slope_floor)
    except DegenerateWarpError:
        alpha = None
    n, m = state.shape
    return EtwResult(
        value=float(state.table[n, m]),
        table=state.table,
        branch=state.branch,
        count=state.count,
        path=path,
        alpha=alpha,
    )


def etw_similarity(
    f: TimeSeries, g: TimeSeries, metric: ValueMetric = ValueMetric.EUCLIDEAN
) -> EtwResult:
    """:func:`elastic_similarity` with the ``exp(-rho)`` kernel on ``metric``."""
    return elastic_similarity(f, g, build_similarity_matrix(f, g, metric))


def dtw_baseline(f: TimeSeries, g: TimeSeries, cost) -> float:
    """Classic DTW cumulative cost with unit steps in i, j or both."""
    n, m = len(f), len(g)
    d = np.asarray(cost, dtype=float)
    if d.shape != (n, m):
        raise ValueError(f"cost matrix has shape {d.shape}, expected {(n, m)}")
    if np.any(d < 0):
        raise ValueError("costs must be nonnegative")
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            acc[i, j] = d[i - 1, j - 1] + min(acc[i - 1, j], acc[i, j - 1], acc[i - 1, j - 1])
    return float(acc[n, m])
