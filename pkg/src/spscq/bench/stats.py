"""Per-op latency statistics over repeated runs."""

from __future__ import annotations

import statistics
from collections.abc import Sequence
from dataclasses import dataclass, field

__all__ = ["StatsRecord", "compute_stats"]


@dataclass(frozen=True)
class StatsRecord:
    """Mean and sample standard deviation of per-op latency, in nanoseconds.

    ``run_times`` are wall-clock seconds per run; ``ops_per_run`` is the
    divisor that turns a run time into a per-op latency.
    """

    mean_ns_per_op: float
    stddev_ns: float
    run_times: tuple[float, ...]
    ops_per_run: int
    placement: dict[str, str] = field(default_factory=dict, compare=False)

    @property
    def total_elapsed(self) -> float:
        return sum(self.run_times)

    @property
    def per_run_ns(self) -> list[float]:
        return [t * 1e9 / self.ops_per_run for t in self.run_times]


def compute_stats(run_times: Sequence[float], ops_per_run: int, placement: dict[str, str] | None = None) -> StatsRecord:
    if not run_times:
        raise ValueError("need at least one run")
    if ops_per_run < 1:
        raise ValueError("ops_per_run must be >= 1")
    per_op = [t * 1e9 / ops_per_run for t in run_times]
    sd = statistics.stdev(per_op) if len(per_op) > 1 else 0.0
    return StatsRecord(statistics.fmean(per_op), sd, tuple(run_times), ops_per_run, dict(placement or {}))
