"""Correctness tooling: reference-FIFO oracle, two-thread stress runs and an interleaving explorer."""

from .explore import (
    NULL,
    ExplorationResult,
    Fence,
    Load,
    MemoryModel,
    ModelBoundError,
    Quiesce,
    Step,
    StepProgram,
    Store,
    explore,
    replay,
    run_sequential,
)
from .oracle import OracleMismatch, check_codes, oracle_check, random_ops
from .stress import DelayModel, StressFailure, StressReport, stress_fifo

__all__ = [
    "NULL",
    "ExplorationResult",
    "Fence",
    "Load",
    "MemoryModel",
    "ModelBoundError",
    "Quiesce",
    "Step",
    "StepProgram",
    "Store",
    "explore",
    "replay",
    "run_sequential",
    "OracleMismatch",
    "check_codes",
    "oracle_check",
    "random_ops",
    "DelayModel",
    "StressFailure",
    "StressReport",
    "stress_fifo",
]
