"""Command-line interface.

Exit codes: 0 on success, 1 for bad input or usage, 2 when an internal
invariant is violated (including an oracle mismatch).
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import hellinger
from .core import SimilarityMatrix, ValueMetric, build_similarity_matrix
from .etw import elastic_similarity
from .formats import (
    format_real,
    parse_diffeo_csv,
    parse_similarity_csv,
    parse_time_series_csv,
    write_matrix_csv,
    write_result_json,
)
from .oracle import MAX_SIDE, brute_force_similarity

ORACLE_TOL = 1e-9


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are user errors (exit 1); 2 is reserved for invariants
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_series(path, normalize: bool):
    try:
        return parse_time_series_csv(_read(path), normalize=normalize)
    except ValueError as exc:
        raise UserError(f"{path}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UserError(f"cannot write {out}: {exc.strerror or exc}") from None


def _kernel(args, f, g) -> tuple[SimilarityMatrix, str]:
    if args.matrix is not None:
        try:
            C = parse_similarity_csv(_read(args.matrix), len(f), len(g))
        except ValueError as exc:
            raise UserError(f"{args.matrix}: {exc}") from None
        return C, f"matrix:{args.matrix}"
    metric = ValueMetric(args.metric)
    try:
        return build_similarity_matrix(f, g, metric), f"exp:{metric.value}"
    except ValueError as exc:
        raise UserError(str(exc)) from None


def cmd_compare(args) -> int:
    f = _load_series(args.a, args.normalize)
    g = _load_series(args.b, args.normalize)
    C, kernel = _kernel(args, f, g)
    result = elastic_similarity(f, g, C)
    meta = {"inputs": [str(args.a), str(args.b)], "kernel": kernel, "normalize": args.normalize}
    _emit(write_result_json(result, meta), args.out)
    return 0


def _manifest(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(path.glob("*.csv"))
    else:
        lines = _read(path).splitlines()
        files = [
            (path.parent / ln.strip())
            for ln in lines
            if ln.strip() and not ln.lstrip().startswith("#")
        ]
    if len(files) < 2:
        raise UserError(f"{path}: manifest must list at least 2 series")
    return files


def cmd_matrix(args) -> int:
    files = _manifest(Path(args.manifest))
    series = [_load_series(p, args.normalize) for p in files]
    metric = ValueMetric(args.metric)
    k = len(series)
    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]

    def job(pair):
        a, b = pair
        C = build_similarity_matrix(series[a], series[b], metric)
        return elastic_similarity(series[a], series[b], C).value

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        values = list(pool.map(job, pairs))
    out = np.eye(k)
    for (a, b), v in zip(pairs, values):
        out[a, b] = out[b, a] = v
    _emit(write_matrix_csv(out), args.out)
    return 0


def cmd_diffeo(args) -> int:
    try:
        a = parse_diffeo_csv(_read(args.a))
        b = parse_diffeo_csv(_read(args.b))
    except ValueError as exc:
        raise UserError(str(exc)) from None
    rows = [("C", hellinger.hellinger_affinity(a, b))]
    if args.metric in ("theta", "all"):
        rows.append(("theta", hellinger.theta_distance(a, b)))
    if args.metric in ("sine", "all"):
        rows.append(("S", hellinger.sine_distance(a, b)))
    if args.metric in ("hellinger", "all"):
        rows.append(("H", hellinger.hellinger_distance(a, b)))
    for name, v in rows:
        print(f"{name} {format_real(v)}")
    return 0


def cmd_oracle(args) -> int:
    f = _load_series(args.a, args.normalize)
    g = _load_series(args.b, args.normalize)
    if max(len(f), len(g)) > args.cap:
        raise UserError(
            f"oracle cap exceeded: series have {len(f)} and {len(g)} samples, cap is {args.cap}"
        )
    C, _ = _kernel(args, f, g)
    dp = elastic_similarity(f, g, C).value
    brute, _ = brute_force_similarity(f, g, C, cap=args.cap)
    diff = abs(dp - brute)
    ok = diff <= ORACLE_TOL
    print(f"dp {format_real(dp)}")
    print(f"oracle {format_real(brute)}")
    print(f"diff {diff:.3e}")
    print("PASS" if ok else "FAIL")
    return 0 if ok else 2


def bench_instance(rng: np.random.Generator, size: int):
    from .core import TimeSeries

    def series():
        t = np.concatenate([[0.0], np.sort(rng.uniform(0.0, 1.0, size - 1))])
        return TimeSeries(t, np.zeros(size))

    f, g = series(), series()
    C = rng.uniform(1e-3, 1.0, (size, size))
    return f, g, C


def run_bench(sizes: list[int], seed: int, repeats: int = 3) -> tuple[list[float], float | None]:
    """Best-of-``repeats`` wall time per size and the fitted log-log exponent."""
    rng = np.random.default_rng(seed)
    elastic_similarity(*bench_instance(np.random.default_rng(seed), 4))  # JIT warm-up
    times = []
    for n in sizes:
        f, g, C = bench_instance(rng, n)
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            elastic_similarity(f, g, C)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    exponent = None
    if len(set(sizes)) >= 3:
        exponent = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    return times, exponent


def cmd_bench(args) -> int:
    try:
        sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    except ValueError:
        raise UserError(f"--sizes must be a comma-separated list of integers, got {args.sizes!r}") from None
    if not sizes or min(sizes) < 1:
        raise UserError("bench sizes must be positive integers")
    print(f"seed {args.seed}")
    times, exponent = run_bench(sizes, args.seed, args.repeats)
    for n, t in zip(sizes, times):
        print(f"size {n} seconds {t:.6f}")
    if exponent is not None:
        print(f"exponent {exponent:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="etwarp", description="Elastic time warping with a Hellinger stretching penalty."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    metrics = [m.value for m in ValueMetric if m is not ValueMetric.PRECOMPUTED]

    def series_pair(p):
        p.add_argument("a", help="first series CSV (t,v1,...,vd)")
        p.add_argument("b", help="second series CSV")
        p.add_argument("--normalize", action="store_true", help="rescale raw timestamps onto [0, 1)")
        src = p.add_mutually_exclusive_group()
        src.add_argument("--kernel", choices=["exp"], default="exp", help="exp(-rho) kernel (default)")
        src.add_argument("--matrix", help="precomputed n x m similarity CSV")
        p.add_argument("--metric", choices=metrics, default="euclidean", help="value metric for --kernel exp")

    p = sub.add_parser("compare", help="similarity, warping path and optimal warp as JSON")
    series_pair(p)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("matrix", help="pairwise similarity matrix over a manifest")
    p.add_argument("manifest", help="directory of series CSVs or a file listing them")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--metric", choices=metrics, default="euclidean")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("diffeo", help="Hellinger affinity and distances between two warps")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metric", choices=["theta", "sine", "hellinger", "all"], default="all")
    p.set_defaults(func=cmd_diffeo)

    p = sub.add_parser("oracle", help="check the DP against exhaustive search")
    series_pair(p)
    p.add_argument("--cap", type=int, default=MAX_SIDE)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="time the DP and fit the growth exponent")
    p.add_argument("--sizes", required=True, help="comma-separated sizes, e.g. 100,200,400")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (UserError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
