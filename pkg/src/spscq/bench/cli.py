"""``spscq`` command line: ``bench`` and ``verify`` subcommands.

Exit status: 0 pass, 1 correctness failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections.abc import Sequence
from typing import TextIO

from ..kinds import KINDS, STAGED_KINDS
from ..multipush import DEFAULT_STAGE_SIZE
from ..verify.explore import MemoryModel, ModelBoundError, explore
from ..verify.models import lamport_program, ring_program, uspsc_program
from .runner import BENCHES, BenchConfig, ConfigError, VerificationError, run_microkernel, run_raw_pipeline

__all__ = ["main", "build_parser", "CSV_HEADER"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
CSV_HEADER = ("queue", "bench", "capacity", "stage", "run", "ns_per_op")


def _pin_pair(text: str) -> tuple[int, int]:
    try:
        p, c = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P,C (two CPU ids), got {text!r}") from None
    if p < 0 or c < 0:
        raise argparse.ArgumentTypeError("CPU ids must be >= 0")
    return p, c


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spscq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser(
        "bench",
        help="time a two-thread pipeline",
        description=(
            "Latency is reported in ns per transfer (one push plus one pop): run time divided by --items. "
            "raw pushes 0..items-1 and checks every value popped; microkernel splits a sin/cos loop "
            "across the two threads and checks the result against the sequential loop."
        ),
    )
    b.add_argument("--queue", choices=KINDS, default="spsc")
    b.add_argument("--bench", choices=BENCHES, default="raw")
    b.add_argument("--capacity", type=int, default=1024, help="ring size, uSPSC internal ring size, or dSPSC node cache size")
    b.add_argument("--items", type=int, default=1_000_000)
    b.add_argument("--runs", type=int, default=100, help="timed runs after one untimed warm-up run")
    b.add_argument("--stage", type=int, default=DEFAULT_STAGE_SIZE, help="multipush batch size (mspsc, muspsc)")
    b.add_argument("--pin", type=_pin_pair, metavar="P,C", help="producer and consumer CPU ids")
    b.add_argument("--csv", metavar="PATH", help="write per-run rows and a summary row")

    v = sub.add_parser(
        "verify",
        help="exhaustively explore a queue model",
        description=(
            "Explore every interleaving of a small queue model. Exit 1 and print the trace if an item "
            "is lost, duplicated or reordered; exit 2 if the state budget runs out."
        ),
    )
    v.add_argument("--explore", choices=[m.value for m in MemoryModel], default=MemoryModel.RELAX_WW.value)
    v.add_argument("--capacity", type=int, choices=(1, 2), default=2)
    v.add_argument("--program", choices=("uspsc", "ring", "lamport"), default="uspsc")
    v.add_argument("--items", type=int, help="explore exactly this many items (default: every count up to the bound)")
    v.add_argument("--buffers", type=int, default=2, help="uspsc: rings available to the model")
    v.add_argument("--pool-fence", action="store_true", help="uspsc: barrier before linking a ring into the in-use list")
    v.add_argument("--max-states", type=int, default=2_000_000)
    return parser


def _write_csv(path: str, cfg: BenchConfig, per_run: Sequence[float], mean: float) -> None:
    stage = cfg.stage_size if cfg.queue_kind in STAGED_KINDS else ""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for i, ns in enumerate(per_run, 1):
            w.writerow((cfg.queue_kind, cfg.bench, cfg.capacity, stage, i, f"{ns:.3f}"))
        w.writerow((cfg.queue_kind, cfg.bench, cfg.capacity, stage, "mean", f"{mean:.3f}"))


def _bench(args: argparse.Namespace, out: TextIO) -> int:
    p, c = args.pin if args.pin else (None, None)
    cfg = BenchConfig(args.queue, args.capacity, args.items, args.runs, p, c, args.bench, args.stage)
    head = f"{cfg.queue_kind} {cfg.bench} capacity={cfg.capacity}"
    if cfg.queue_kind in STAGED_KINDS:
        head += f" stage={cfg.stage_size}"
    if cfg.bench == "raw":
        stats = run_raw_pipeline(cfg)
        print(f"{head}: {stats.mean_ns_per_op:.1f} ± {stats.stddev_ns:.1f} ns per transfer over {cfg.runs} runs", file=out)
    else:
        res = run_microkernel(cfg)
        stats = res.pipelined
        print(
            f"{head}: sequential {res.sequential.mean_ns_per_op:.1f} ns/iter, pipelined "
            f"{stats.mean_ns_per_op:.1f} ± {stats.stddev_ns:.1f} ns/iter, speedup {res.speedup:.3f}, "
            f"y = {res.y_pipelined!r} (matches)",
            file=out,
        )
    if stats.placement:
        print("placement: " + ", ".join(f"{k} on CPU {v}" for k, v in stats.placement.items()), file=out)
    if args.csv:
        _write_csv(args.csv, cfg, stats.per_run_ns, stats.mean_ns_per_op)
    return EXIT_OK


def _verify(args: argparse.Namespace, out: TextIO) -> int:
    model = MemoryModel(args.explore)
    cap = args.capacity
    if args.program == "uspsc":
        bound = min(4, cap * args.buffers)
        make = lambda n: uspsc_program(cap, n, max_buffers=args.buffers, pool_fence=args.pool_fence)  # noqa: E731
    elif args.program == "ring":
        bound = 4
        make = lambda n: ring_program(cap, n)  # noqa: E731
    else:
        bound = 3
        make = lambda n: lamport_program(cap, n)  # noqa: E731
    counts = [args.items] if args.items else range(1, bound + 1)
    status = EXIT_OK
    for n in counts:
        try:
            result = explore(make(n), model, args.max_states)
        except (ValueError, ModelBoundError) as exc:
            print(f"configuration error: {exc}", file=out)
            return EXIT_CONFIG
        print(result.summary(), file=out)
        if result.violation is not None:
            print(result.format_trace(), file=out)
            return EXIT_FAIL
        if not result.exhausted:
            status = EXIT_CONFIG
    return status


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench":
            return _bench(args, out)
        return _verify(args, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
