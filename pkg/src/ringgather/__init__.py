"""Simulate and verify g-partial gathering of mobile agents on rings.

Three protocols are provided: one for agents with distinct IDs, a
randomized one for anonymous agents, and a deterministic one for
anonymous agents that works whenever the initial placement is not too
symmetric. Runs are driven by fair, seeded schedulers and judged by the
predicates in :mod:`ringgather.verifier`.
"""

from .algo_anon import is_solvable, lex_min_rotation, period, relocation_offset, shift
from .ring_model import (
    Configuration, InstanceSpec, InvalidInstance, ModelViolation, build_initial_config,
    instance_from_gaps,
)
from .scheduler import (
    ExecutionTrace, RunResult, ScheduleStrategy, explore_bounded, replay, run, simulate,
)
from .verifier import (
    MoveBreakdown, TraceError, Verdict, account_moves, check_bounds, check_leader_invariant,
    check_partial_gathering, lower_bound_floor,
)

__version__ = "0.1.0"

__all__ = [
    "Configuration", "ExecutionTrace", "InstanceSpec", "InvalidInstance", "ModelViolation",
    "MoveBreakdown", "RunResult", "ScheduleStrategy", "TraceError", "Verdict",
    "account_moves", "build_initial_config", "check_bounds", "check_leader_invariant",
    "check_partial_gathering", "explore_bounded", "instance_from_gaps", "is_solvable",
    "lex_min_rotation", "lower_bound_floor", "period", "relocation_offset", "replay", "run",
    "shift", "simulate",
]
