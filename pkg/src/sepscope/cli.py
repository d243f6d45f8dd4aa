"""Command-line front end.

Exit codes::

    0   separable (conclusive) / CSS / success
    1   entangled / not a CSS
    2   inconclusive
    64  usage or parse error
    65  input parses but fails validation
    70  internal error
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import tolerances
from .errors import BadParameterError, SepscopeError
from .fano import fano_decompose, sm_measure
from .geometry import equality_residual, lambda_tau, prune_duplicates
from .io import (
    ParseError,
    decomposition_from_json,
    density_from_json,
    load_json,
    polytope_from_json,
    polytope_to_json,
)
from .separability import (
    SegmentVerdict,
    invariant_polytope,
    is_product,
    p_pure_polytope,
    ppt_min_eigenvalue,
    segment_scan,
)
from .states import random_state

log = logging.getLogger("sepscope")

EXIT_SEPARABLE = 0
EXIT_ENTANGLED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_SOFTWARE = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class AnalysisReport:
    input_digest: str
    dims: list
    sm_measure: float
    is_product: bool
    ppt_min_eigenvalue: float
    segment_verdict: str
    conclusive: bool
    classification: str
    segment_points: int
    timings: dict = field(default_factory=dict)

    def exit_code(self) -> int:
        return {"separable": EXIT_SEPARABLE, "entangled": EXIT_ENTANGLED}.get(self.classification, EXIT_INCONCLUSIVE)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()


def _emit(obj: dict, args, csv_rows: list[list] | None = None) -> None:
    if args.csv and csv_rows is not None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerows(csv_rows)
    else:
        json.dump(obj, sys.stdout, indent=2)
        sys.stdout.write("\n")


class _Timer:
    def __init__(self):
        self.ms: dict[str, float] = {}

    @contextlib.contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        yield
        self.ms[name] = round((time.perf_counter() - t0) * 1e3, 3)


def analyze(path: str, segment_points: int = 101) -> AnalysisReport:
    timer = _Timer()
    with timer.stage("load"):
        rho = density_from_json(load_json(path), require_bipartite=True)
    with timer.stage("sm_measure"):
        sm = sm_measure(rho)
    with timer.stage("is_product"):
        product = is_product(rho)
    with timer.stage("ppt"):
        ppt = ppt_min_eigenvalue(rho)
    with timer.stage("segment_scan"):
        scan = segment_scan(rho, segment_points)
    if scan.verdict is SegmentVerdict.ENTANGLED_DETECTED:
        classification, conclusive = "entangled", True
    elif product or scan.conclusive:
        classification, conclusive = "separable", True
    else:
        classification, conclusive = "inconclusive", False
    return AnalysisReport(
        input_digest=_digest(path),
        dims=list(rho.factor_dims),
        sm_measure=sm,
        is_product=product,
        ppt_min_eigenvalue=ppt,
        segment_verdict=scan.verdict.value,
        conclusive=conclusive,
        classification=classification,
        segment_points=segment_points,
        timings=timer.ms,
    )


def cmd_analyze(args) -> int:
    report = analyze(args.state_file, args.segment_points)
    d = asdict(report)
    flat = {k: v for k, v in d.items() if k != "timings"}
    _emit(d, args, [list(flat), [_fmt(v) if not isinstance(v, list) else " ".join(map(str, v)) for v in flat.values()]])
    return report.exit_code()


def cmd_fano(args) -> int:
    rho = density_from_json(load_json(args.state_file), require_bipartite=True)
    _emit(fano_decompose(rho).to_json(), args)
    return 0


def cmd_css_check(args) -> int:
    p = polytope_from_json(load_json(args.polytope_file))
    image = lambda_tau(p)
    residual = equality_residual(image, p)
    ok = residual <= tolerances.current().hull
    report = {
        "is_css": ok,
        "max_residual": residual,
        "tol_hull": tolerances.current().hull,
        "vertex_count": len(p),
        "vertex_count_pruned": len(prune_duplicates(p.vertices)),
        "image_vertex_count": len(image),
    }
    _emit(report, args, [list(report), [_fmt(v) for v in report.values()]])
    return 0 if ok else 1


def cmd_segment_scan(args) -> int:
    rho = density_from_json(load_json(args.state_file), require_bipartite=True)
    scan = segment_scan(rho, args.segment_points)
    if args.csv:
        sys.stdout.write(scan.to_csv())
    else:
        _emit(scan.to_json(), args)
    if scan.verdict is SegmentVerdict.ENTANGLED_DETECTED:
        return EXIT_ENTANGLED
    return EXIT_SEPARABLE if scan.conclusive else EXIT_INCONCLUSIVE


def cmd_polytope_build(args) -> int:
    dec = decomposition_from_json(load_json(args.decomposition_file))
    p = p_pure_polytope(dec) if args.pure else invariant_polytope(dec)
    _emit(polytope_to_json(p), args)
    return 0


def _sample_row(task: tuple[int, np.random.SeedSequence, tuple[int, int], float]) -> list[str]:
    # psd tolerance travels with the task: context-local overrides do not reach worker processes
    index, ss, dims, tol_psd = task
    rho = random_state(dims[0] * dims[1], np.random.default_rng(ss), factor_dims=dims)
    ppt = ppt_min_eigenvalue(rho)
    flag = int(ppt >= -tol_psd)
    return [str(index), _fmt(sm_measure(rho)), _fmt(ppt), str(flag)]


def sample_rows(dims: tuple[int, int], count: int, seed: int, workers: int = 1) -> list[list[str]]:
    """One row per Hilbert-Schmidt random state; row ``i`` depends only on ``(seed, i)``."""
    if count < 1:
        raise BadParameterError(f"--count must be >= 1, got {count}")
    if len(dims) != 2 or min(dims) < 1:
        raise BadParameterError(f"--dims must be two positive ints, got {dims}")
    children = np.random.SeedSequence(seed).spawn(count)
    tol_psd = tolerances.current().psd
    tasks = [(i, ss, tuple(dims), tol_psd) for i, ss in enumerate(children)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sample_row, tasks, chunksize=64))
    return [_sample_row(t) for t in tasks]


def cmd_sample(args) -> int:
    if args.seed is None:
        if args.ci:
            raise UsageError("--seed is required in --ci mode")
        args.seed = time.time_ns() % 2**63
        log.warning("no --seed given; using time-derived seed %d", args.seed)
    rows = sample_rows(tuple(args.dims), args.count, args.seed, args.workers)
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["index", "sm_measure", "ppt_min_eigenvalue", "ppt_flag"])
    w.writerows(rows)
    sys.stdout.write(out.getvalue())
    return 0


def _parse_overrides(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol-override expects KEY=VALUE, got {item!r}")
        key = key.strip().removeprefix("tol_")
        if key not in tolerances.Tolerances.keys():
            raise UsageError(f"unknown tolerance {key!r}; known: {', '.join(tolerances.Tolerances.keys())}")
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"tolerance {key!r} needs a number, got {value!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit JSON (default)")
    fmt.add_argument("--csv", action="store_true", help="emit CSV")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--ci", action="store_true", help="strict mode: randomness requires --seed")
    common.add_argument(
        "--tol-override", action="append", default=[], metavar="KEY=VALUE",
        help=f"override a named tolerance ({', '.join(tolerances.Tolerances.keys())})",
    )

    parser = _Parser(prog="sepscope", description="Separability checks for bipartite density matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="full report for one state")
    p.add_argument("state_file")
    p.add_argument("--segment-points", type=int, default=101)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fano", parents=[common], help="Fano decomposition of a state")
    p.add_argument("state_file")
    p.set_defaults(func=cmd_fano)

    p = sub.add_parser("css-check", parents=[common], help="is a polytope mapped onto itself")
    p.add_argument("polytope_file")
    p.set_defaults(func=cmd_css_check)

    p = sub.add_parser("segment-scan", parents=[common], help="PPT scan along the segment to omega(rho)")
    p.add_argument("state_file")
    p.add_argument("--segment-points", type=int, default=101)
    p.set_defaults(func=cmd_segment_scan)

    p = sub.add_parser("sample", parents=[common], help="metrics for random states, as CSV")
    p.add_argument("--dims", type=int, nargs=2, required=True, metavar=("N", "K"))
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("polytope-build", parents=[common], help="invariant polytope from a decomposition")
    p.add_argument("decomposition_file")
    p.add_argument("--pure", action="store_true", help="require pure factors (P_pure)")
    p.set_defaults(func=cmd_polytope_build)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("SEPSCOPE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        overrides = _parse_overrides(args.tol_override)
        with tolerances.override(**overrides):
            return args.func(args)
    except (ParseError, UsageError, OSError) as exc:
        print(f"sepscope: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SepscopeError, KeyError, TypeError, ValueError) as exc:
        print(f"sepscope: invalid input: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except Exception:  # pragma: no cover
        log.exception("internal error")
        return EXIT_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
