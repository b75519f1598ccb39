"""Shared domain types, input validation and similarity kernels."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "KERNEL_FLOOR",
    "TimeSeries",
    "SimilarityMatrix",
    "ValueMetric",
    "PiecewiseLinearDiffeo",
    "Move",
    "WarpingPath",
    "EtwResult",
    "DegenerateWarpError",
    "build_time_series",
    "normalize_timestamps",
    "exp_kernel",
    "build_similarity_matrix",
]

# Zero similarities would force zero slopes in the reconstructed warp.
KERNEL_FLOOR = 1e-15

# Breakpoints closer than this are treated as coincident.
COINCIDENCE_TOL = 1e-14

# Minimum admissible slope of a piecewise-linear diffeomorphism.
MIN_SLOPE = 1e-13


class DegenerateWarpError(ValueError):
    """Raised when an optimal warp would need a (near) zero slope."""


def _check_timestamps(t: np.ndarray) -> None:
    if t.ndim != 1 or t.size == 0:
        raise ValueError("timestamps must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(t)):
        raise ValueError("timestamps contain NaN or Inf")
    if t[0] != 0.0:
        raise ValueError(f"first timestamp must be 0, got {t[0]!r}")
    if t[-1] >= 1.0:
        raise ValueError(f"last timestamp must be < 1, got {t[-1]!r}")
    bad = np.flatnonzero(np.diff(t) <= 0)
    if bad.size:
        k = int(bad[0]) + 1
        raise ValueError(
            f"timestamps must be strictly increasing (index {k}: "
            f"{t[k - 1]!r} -> {t[k]!r})"
        )


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A sampled series read as a piecewise-constant function on [0, 1].

    The value ``values[j]`` holds on ``[timestamps[j], timestamps[j + 1])``,
    the last one up to 1.

    Attributes
    ----------
    timestamps : ndarray, shape (n,)
        Strictly increasing, starting at 0, ending below 1.
    values : ndarray
        Either a float array of shape (n, d) or an object array of opaque
        labels (usable only with a precomputed similarity matrix).
    """

    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.array(self.timestamps, dtype=float)
        _check_timestamps(t)
        v = _as_values(self.values)
        if len(v) != len(t):
            raise ValueError(
                f"length mismatch: {len(t)} timestamps, {len(v)} values"
            )
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def numeric(self) -> bool:
        return self.values.dtype != object

    @property
    def dim(self) -> int | None:
        return self.values.shape[1] if self.numeric else None

    @property
    def grid(self) -> np.ndarray:
        """Timestamps with the terminal instant 1 appended."""
        return np.append(self.timestamps, 1.0)

    def __call__(self, x):
        """Evaluate the piecewise-constant function at ``x`` in [0, 1]."""
        idx = np.searchsorted(self.timestamps, x, side="right") - 1
        return self.values[np.clip(idx, 0, len(self) - 1)]


def _as_values(values) -> np.ndarray:
    try:
        v = np.array(values, dtype=float)
    except (TypeError, ValueError):
        v = np.empty(len(values), dtype=object)
        v[:] = list(values)
        return v
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2:
        raise ValueError("values must be scalars or vectors of uniform dimension")
    if not np.all(np.isfinite(v)):
        raise ValueError("values contain NaN or Inf")
    return v


def build_time_series(timestamps: Sequence[float], values: Sequence) -> TimeSeries:
    """Validate and wrap a sampled series.

    Raises ``ValueError`` on empty input, length mismatch, non-finite entries
    or timestamps that are not strictly increasing in [0, 1) from 0.
    """
    if len(timestamps) == 0:
        raise ValueError("a time series needs at least one sample")
    if len(timestamps) != len(values):
        raise ValueError(
            f"length mismatch: {len(timestamps)} timestamps, {len(values)} values"
        )
    return TimeSeries(np.asarray(timestamps, dtype=float), values)


def normalize_timestamps(raw: Sequence[float]) -> np.ndarray:
    """Affinely map raw sample times onto [0, 1).

    ``raw[0]`` goes to 0 and an implied terminal instant goes to 1. The
    terminal instant is the last sample plus the mean sampling gap, or
    ``raw[0] + 1`` for a single sample.
    """
    r = np.asarray(raw, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("need a non-empty 1-D sequence of timestamps")
    if not np.all(np.isfinite(r)):
        raise ValueError("timestamps contain NaN or Inf")
    if np.any(np.diff(r) <= 0):
        raise ValueError("timestamps must be strictly increasing")
    if r.size == 1:
        return np.zeros(1)
    end = r[-1] + (r[-1] - r[0]) / (r.size - 1)
    out = (r - r[0]) / (end - r[0])
    out[0] = 0.0
    if np.any(np.diff(out) <= 0) or out[-1] >= 1.0:
        raise ValueError("timestamps too close together to normalise in double precision")
    return out


class ValueMetric(enum.Enum):
    """Distance on the value space of a series."""

    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    PRECOMPUTED = "precomputed"

    @property
    def scipy_name(self) -> str:
        if self is ValueMetric.PRECOMPUTED:
            raise ValueError("precomputed metric has no pointwise distance")
        return {"euclidean": "euclidean", "manhattan": "cityblock"}[self.value]

    def distance(self, x, y) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if x.shape != y.shape:
            raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("non-finite coordinates")
        d = x - y
        if self is ValueMetric.EUCLIDEAN:
            return float(np.sqrt(np.dot(d, d)))
        if self is ValueMetric.MANHATTAN:
            return float(np.abs(d).sum())
        raise ValueError("precomputed metric has no pointwise distance")


def exp_kernel(x, y, metric: ValueMetric = ValueMetric.EUCLIDEAN) -> float:
    """Similarity ``exp(-rho(x, y))`` in (0, 1]."""
    return float(np.exp(-metric.distance(x, y)))


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Grid of pairwise similarities ``C(f_i, g_j)``, floored at ``floor``."""

    entries: np.ndarray
    floor: float = KERNEL_FLOOR

    def __post_init__(self):
        c = np.array(self.entries, dtype=float)
        if c.ndim != 2 or 0 in c.shape:
            raise ValueError(f"similarity matrix must be 2-D and non-empty, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("similarity matrix contains NaN or Inf")
        if np.any(c < 0) or np.any(c > 1):
            raise ValueError("similarity entries must lie in [0, 1]")
        c = np.maximum(c, self.floor)
        c.setflags(write=False)
        object.__setattr__(self, "entries", c)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def T(self) -> "SimilarityMatrix":
        return SimilarityMatrix(self.entries.T, self.floor)

    def __getitem__(self, idx):
        return self.entries[idx]


Kernel = Callable[[object, object], float]


def build_similarity_matrix(
    f: TimeSeries,
    g: TimeSeries,
    kernel: ValueMetric | Kernel = ValueMetric.EUCLIDEAN,
    floor: float = KERNEL_FLOOR,
) -> SimilarityMatrix:
    """Similarity grid between the samples of ``f`` and ``g``.

    ``kernel`` is either a built-in metric (exp kernel on that metric,
    vectorised) or any callable returning a similarity in [0, 1].
    """
    if isinstance(kernel, ValueMetric):
        if not (f.numeric and g.numeric):
            raise ValueError("exp kernel needs numeric values")
        if f.dim != g.dim:
            raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")
        c = np.exp(-cdist(f.values, g.values, metric=kernel.scipy_name))
    else:
        c = np.array([[kernel(x, y) for y in g.values] for x in f.values], dtype=float)
    return SimilarityMatrix(c, floor)


def _normalize_breakpoints(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop interior breakpoints where the slope does not change."""
    if len(x) <= 2:
        return x, y
    slope = np.diff(y) / np.diff(x)
    left, right = slope[:-1], slope[1:]
    bend = np.abs(left - right) > 1e-12 * np.maximum(left, right)
    keep = np.concatenate([[True], bend, [True]])
    return x[keep], y[keep]


@dataclass(frozen=True, eq=False)
class PiecewiseLinearDiffeo:
    """Strictly increasing piecewise-linear bijection of [0, 1].

    Stored as breakpoints ``(knots[k], values[k])`` from (0, 0) to (1, 1).
    Collinear interior breakpoints are removed on construction, so two
    diffeos that agree as functions share one representation.
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.array(self.knots, dtype=float)
        y = np.array(self.values, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise ValueError("need matching 1-D breakpoint arrays with >= 2 entries")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("breakpoints contain NaN or Inf")
        if x[0] != 0 or y[0] != 0 or x[-1] != 1 or y[-1] != 1:
            raise ValueError("diffeo must run from (0, 0) to (1, 1)")
        dx, dy = np.diff(x), np.diff(y)
        if np.any(dx <= 0) or np.any(dy <= 0):
            raise ValueError("breakpoint coordinates must be strictly increasing")
        if np.any(dy / dx < MIN_SLOPE):
            raise ValueError(f"slope below {MIN_SLOPE:g}")
        x, y = _normalize_breakpoints(x, y)
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "knots", x)
        object.__setattr__(self, "values", y)

    @classmethod
    def identity(cls) -> "PiecewiseLinearDiffeo":
        return cls([0.0, 1.0], [0.0, 1.0])

    @classmethod
    def from_breakpoints(cls, pairs) -> "PiecewiseLinearDiffeo":
        pairs = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(pairs[:, 0], pairs[:, 1])

    @property
    def breakpoints(self) -> np.ndarray:
        return np.column_stack([self.knots, self.values])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.knots)

    def __call__(self, x):
        return np.interp(x, self.knots, self.values)

    def inverse_at(self, y):
        return np.interp(y, self.values, self.knots)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinearDiffeo):
            return NotImplemented
        return (
            self.knots.shape == other.knots.shape
            and np.array_equal(self.knots, other.knots)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.knots.tobytes(), self.values.tobytes()))

    def __repr__(self):
        pts = ", ".join(f"({a:.6g}, {b:.6g})" for a, b in self.breakpoints)
        return f"PiecewiseLinearDiffeo([{pts}])"


@dataclass(frozen=True)
class Move:
    """One block of an interlacing pattern.

    ``F`` matches ``count`` samples of f to one interval of g, so it
    advances i by ``count`` and j by one. ``G`` matches one sample of f to
    ``count >= 2`` intervals of g.
    """

    branch: str
    count: int
    end_i: int
    end_j: int

    def __post_init__(self):
        if self.branch not in ("F", "G"):
            raise ValueError(f"branch must be 'F' or 'G', got {self.branch!r}")
        if self.count < (1 if self.branch == "F" else 2):
            raise ValueError(f"invalid count {self.count} for {self.branch}-move")

    @property
    def start(self) -> tuple[int, int]:
        if self.branch == "F":
            return self.end_i - self.count, self.end_j - 1
        return self.end_i - 1, self.end_j - self.count

    def __str__(self):
        return f"{self.branch}{self.count}"


@dataclass(frozen=True)
class WarpingPath:
    """Sequence of F/G moves leading from (0, 0) to (n, m)."""

    moves: tuple[Move, ...]

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        pos = (0, 0)
        for mv in self.moves:
            if mv.start != pos:
                raise ValueError(f"move {mv} does not start at {pos}")
            pos = (mv.end_i, mv.end_j)

    @property
    def end(self) -> tuple[int, int]:
        return (self.moves[-1].end_i, self.moves[-1].end_j) if self.moves else (0, 0)

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __str__(self):
        return " ".join(map(str, self.moves))

    @classmethod
    def from_counts(cls, spec: Sequence[tuple[str, int]]) -> "WarpingPath":
        """Build a path from ``[("F", 2), ("G", 3), ...]`` starting at (0, 0)."""
        i = j = 0
        moves = []
        for branch, count in spec:
            if branch == "F":
                i, j = i + count, j + 1
            else:
                i, j = i + 1, j + count
            moves.append(Move(branch, count, i, j))
        return cls(tuple(moves))


@dataclass(frozen=True, eq=False)
class EtwResult:
    """Outcome of the elastic time warping dynamic program.

    ``table`` is the (n+1, m+1) value table with ``-inf`` in the unreachable
    border cells; ``branch`` and ``count`` hold the backpointers. ``alpha``
    is None when the optimal warp is degenerate.
    """

    value: float
    table: np.ndarray
    branch: np.ndarray
    count: np.ndarray
    path: WarpingPath
    alpha: PiecewiseLinearDiffeo | None = field(default=None)
