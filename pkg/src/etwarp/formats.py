"""CSV inputs and the JSON result document.

Formats
-------
Time series CSV
    Header ``t,v1,...,vd`` then one ``timestamp,value...`` record per line.
Similarity CSV
    No header; ``n`` lines of ``m`` comma-separated reals in [0, 1].
Diffeo CSV
    Header ``tau,alpha`` then breakpoints from ``0,0`` to ``1,1``.
Result JSON
    Object with keys ``alpha``, ``metadata``, ``path``, ``similarity``
    (sorted), reals written with 17 significant digits. ``path`` is a list
    of ``{"branch", "count", "end_i", "end_j"}`` records and ``alpha`` a list
    of ``[tau, alpha(tau)]`` pairs, or null when the optimal warp is
    degenerate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import (
    EtwResult,
    Move,
    PiecewiseLinearDiffeo,
    SimilarityMatrix,
    TimeSeries,
    WarpingPath,
    normalize_timestamps,
)

__all__ = [
    "FormatError",
    "ResultDocument",
    "parse_time_series_csv",
    "parse_similarity_csv",
    "parse_diffeo_csv",
    "write_result_json",
    "read_result_json",
    "write_matrix_csv",
    "write_diffeo_csv",
    "format_real",
]


class FormatError(ValueError):
    """Malformed input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def format_real(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    s = f"{x:.17g}"
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line:
            yield lineno, [cell.strip() for cell in line.split(",")]


def _real(cell: str, lineno: int) -> float:
    try:
        x = float(cell)
    except ValueError:
        raise FormatError(f"malformed number {cell!r}", lineno) from None
    if not math.isfinite(x):
        raise FormatError(f"non-finite number {cell!r}", lineno)
    return x


def parse_time_series_csv(text: str, normalize: bool = False) -> TimeSeries:
    """Parse a ``t,v1,...,vd`` series.

    With ``normalize`` the raw timestamps only need to increase; they are
    mapped onto [0, 1) by :func:`~etwarp.core.normalize_timestamps`.
    """
    rows = _records(text)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise FormatError("empty input, expected header 't,v1,...'") from None
    d = len(header) - 1
    if header[0] != "t" or d < 1 or header[1:] != [f"v{k}" for k in range(1, d + 1)]:
        raise FormatError(f"expected header 't,v1,...,vd', got {','.join(header)!r}", lineno)
    times, values = [], []
    for lineno, cells in rows:
        if len(cells) != d + 1:
            raise FormatError(
                f"inconsistent dimension: expected {d} values, got {len(cells) - 1}", lineno
            )
        t = _real(cells[0], lineno)
        if not normalize:
            if not times and t != 0.0:
                raise FormatError(f"first timestamp must be 0, got {cells[0]}", lineno)
            if t >= 1.0:
                raise FormatError(f"timestamp must be < 1, got {cells[0]}", lineno)
        if times and t <= times[-1]:
            raise FormatError("timestamps must be strictly increasing", lineno)
        times.append(t)
        values.append([_real(c, lineno) for c in cells[1:]])
    if not times:
        raise FormatError("no records after header")
    if normalize:
        times = normalize_timestamps(times)
    return TimeSeries(np.asarray(times), np.asarray(values))


def parse_similarity_csv(text: str, n: int, m: int) -> SimilarityMatrix:
    """Parse an ``n`` by ``m`` headerless similarity grid.

    Zero entries are floored; negative entries or entries above 1 are
    rejected.
    """
    rows = []
    for lineno, cells in _records(text):
        if len(cells) != m:
            raise FormatError(f"expected {m} columns, got {len(cells)}", lineno)
        row = [_real(c, lineno) for c in cells]
        for c, x in zip(cells, row):
            if x < 0.0 or x > 1.0:
                raise FormatError(f"similarity {c} outside [0, 1]", lineno)
        rows.append(row)
    if len(rows) != n:
        raise FormatError(f"expected {n} rows, got {len(rows)}")
    return SimilarityMatrix(np.asarray(rows))


def parse_diffeo_csv(text: str) -> PiecewiseLinearDiffeo:
    rows = _records(text)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise FormatError("empty input, expected header 'tau,alpha'") from None
    if header != ["tau", "alpha"]:
        raise FormatError(f"expected header 'tau,alpha', got {','.join(header)!r}", lineno)
    pts = []
    for lineno, cells in rows:
        if len(cells) != 2:
            raise FormatError(f"expected 2 columns, got {len(cells)}", lineno)
        x, y = _real(cells[0], lineno), _real(cells[1], lineno)
        if not pts and (x, y) != (0.0, 0.0):
            raise FormatError("first breakpoint must be 0,0", lineno)
        if pts and (x <= pts[-1][0] or y <= pts[-1][1]):
            raise FormatError("breakpoints must be strictly increasing (non-monotone)", lineno)
        pts.append((x, y))
    if len(pts) < 2 or pts[-1] != (1.0, 1.0):
        raise FormatError("last breakpoint must be 1,1")
    try:
        return PiecewiseLinearDiffeo.from_breakpoints(pts)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


@dataclass
class ResultDocument:
    similarity: float
    path: list[dict[str, Any]]
    alpha: list[list[float]] | None
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_result(cls, result: EtwResult, metadata: dict | None = None) -> "ResultDocument":
        from . import __version__

        meta = {"version": __version__}
        meta.update(metadata or {})
        return cls(
            similarity=float(result.value),
            path=[
                {"branch": mv.branch, "count": mv.count, "end_i": mv.end_i, "end_j": mv.end_j}
                for mv in result.path
            ],
            alpha=None if result.alpha is None else result.alpha.breakpoints.tolist(),
            metadata=meta,
        )

    @property
    def warping_path(self) -> WarpingPath:
        return WarpingPath(tuple(Move(**mv) for mv in self.path))

    @property
    def warp(self) -> PiecewiseLinearDiffeo | None:
        return None if self.alpha is None else PiecewiseLinearDiffeo.from_breakpoints(self.alpha)


def _dump(obj, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_real(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(x, (int, float, np.number)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_dump(x) for x in obj) + "]"
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + _dump(x, indent + 1) for x in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_result_json(result: EtwResult | ResultDocument, metadata: dict | None = None) -> str:
    """Serialise a result deterministically (sorted keys, 17 significant digits)."""
    doc = result if isinstance(result, ResultDocument) else ResultDocument.from_result(result, metadata)
    body = {
        "similarity": doc.similarity,
        "path": doc.path,
        "alpha": doc.alpha,
        "metadata": doc.metadata,
    }
    return _dump(body) + "\n"


def read_result_json(text: str) -> ResultDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno) from None
    missing = {"similarity", "path", "alpha", "metadata"} - set(raw)
    if missing:
        raise FormatError(f"missing keys: {', '.join(sorted(missing))}")
    alpha = raw["alpha"]
    return ResultDocument(
        similarity=float(raw["similarity"]),
        path=[dict(mv) for mv in raw["path"]],
        alpha=None if alpha is None else [[float(a), float(b)] for a, b in alpha],
        metadata=raw["metadata"],
    )


def write_matrix_csv(matrix) -> str:
    return "".join(",".join(format_real(float(x)) for x in row) + "\n" for row in np.asarray(matrix))


def write_diffeo_csv(alpha: PiecewiseLinearDiffeo) -> str:
    lines = ["tau,alpha"] + [f"{format_real(a)},{format_real(b)}" for a, b in alpha.breakpoints]
    return "\n".join(lines) + "\n"
