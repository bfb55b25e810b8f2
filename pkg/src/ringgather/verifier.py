"""Success predicates, the election invariant, move accounting and bound checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ring_model import (
    ACTIVE, FINAL, INACTIVE, LEADER, MOVING, ROLES, SEMI_LEADER, Configuration, ceil_log2,
)

GATHERED = "Gathered"
UNSOLVABLE = "Unsolvable"
VIOLATION = "Violation"
TIMEOUT = "Timeout"
VERDICTS = (GATHERED, UNSOLVABLE, VIOLATION, TIMEOUT)

ACTIONS = frozenset({"stay", "move", "write", "role_change", "terminate"})


class TraceError(ValueError):
    """A trace is truncated, inconsistent or not in the expected format."""


@dataclass(frozen=True)
class Verdict:
    kind: str
    details: str
    group_sizes: tuple = ()  # sorted, one entry per node hosting final agents

    def __bool__(self) -> bool:
        return self.kind in (GATHERED, UNSOLVABLE)


def _groups(config: Configuration) -> tuple:
    occ = config.occupancy((FINAL,))
    return tuple(sorted(occ.values()))


def check_partial_gathering(final: Configuration, g: int, outcome: Optional[str] = None) -> Verdict:
    """Judge a final configuration.

    ``outcome`` is the run outcome from the scheduler; a run stopped by its
    step budget is reported as a timeout whatever the configuration looks like.
    """
    groups = _groups(final)
    if outcome == "StepLimit":
        return Verdict(TIMEOUT, "step limit reached before every agent terminated", groups)
    if outcome == "ModelViolation":
        return Verdict(VIOLATION, "run aborted by a model violation", groups)
    pending = [a.index for a in final.agents if a.role != FINAL]
    if pending:
        return Verdict(VIOLATION, f"agents not terminated: {pending}", groups)
    if final.spec.model == "anon" and all(getattr(a.regs, "unsolvable", False) for a in final.agents):
        return Verdict(UNSOLVABLE, "gap sequence period is below g; agents halted at their starts",
                       groups)
    small = [s for s in groups if s < g]
    if small:
        return Verdict(VIOLATION, f"groups smaller than g={g}: {small}", groups)
    return Verdict(GATHERED, f"{len(groups)} group(s), all of size >= {g}", groups)


def leader_segments(config: Configuration) -> list:
    """Inactive agents strictly between each leader and the next one forward.

    Uses the node where each agent ended its campaign. Returns one count per
    leader, in ring order; empty if there is no leader.
    """
    n = config.spec.n
    leaders = sorted(a.election_node for a in config.agents if a.elected == LEADER)
    inactive = [a.election_node for a in config.agents if a.elected == INACTIVE]
    if not leaders:
        return []
    if len(leaders) == 1:
        return [len(inactive)]
    out = []
    for i, here in enumerate(leaders):
        nxt = leaders[(i + 1) % len(leaders)]
        span = (nxt - here) % n or n
        out.append(sum(1 for v in inactive if 0 < (v - here) % n < span))
    return out


def check_leader_invariant(config: Configuration, g: int) -> bool:
    segments = leader_segments(config)
    return bool(segments) and all(s >= g - 1 for s in segments)


@dataclass
class MoveBreakdown:
    active: int = 0
    leader: int = 0
    inactive: int = 0
    moving: int = 0
    semi_leader: int = 0
    anon: int = 0
    per_phase: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.active + self.leader + self.inactive + self.moving + self.semi_leader + self.anon

    def add(self, model: str, role: str, count: int = 1, phase=None) -> None:
        if model == "anon":
            self.anon += count
            return
        setattr(self, role, getattr(self, role) + count)
        if role == ACTIVE and phase is not None:
            self.per_phase[phase] = self.per_phase.get(phase, 0) + count


def breakdown_from_config(config: Configuration) -> MoveBreakdown:
    """Role totals from the per-agent counters (no per-phase detail)."""
    b = MoveBreakdown()
    model = config.spec.model
    for a in config.agents:
        for role, c in a.moves_by_role.items():
            b.add(model, role, c)
    return b


def account_moves(trace) -> MoveBreakdown:
    """Attribute every move event of ``trace`` to the mover's role at that moment."""
    spec = trace.spec
    n, k, model = spec.n, spec.k, spec.model
    b = MoveBreakdown()
    last_t = -1
    for e in trace.events:
        try:
            t, h, node, role, action, detail = e
        except (TypeError, ValueError) as exc:
            raise TraceError(f"event is not a 6-field record: {e!r}") from exc
        if not isinstance(t, int) or t < last_t:
            raise TraceError(f"event times out of order at {e!r}")
        last_t = t
        if not (isinstance(h, int) and 0 <= h < k) or not (isinstance(node, int) and 0 <= node < n):
            raise TraceError(f"agent or node out of range in {e!r}")
        if role not in ROLES or action not in ACTIONS:
            raise TraceError(f"unknown role or action in {e!r}")
        if action != "move":
            continue
        if not isinstance(detail, dict) or detail.get("to") != (node + 1) % n:
            raise TraceError(f"move event does not advance one node: {e!r}")
        b.add(model, role, 1, detail.get("phase"))
    return b


def semi_circulations(config: Configuration) -> int:
    """Number of semi-leader tours started during a random-model run."""
    if config.spec.model != "random":
        return 0
    return sum(a.regs.semi_phase for a in config.agents)


def bound_failures(b: MoveBreakdown, model: str, n: int, k: int, g: int,
                   circulations: int = 0) -> list:
    """Human-readable list of violated move bounds (empty when all hold)."""
    L = ceil_log2(g)
    out = []
    if model == "anon":
        if b.total > k * (2 * n - 1):
            out.append(f"total {b.total} > k(2n-1) = {k * (2 * n - 1)}")
        return out
    if model == "random" and (circulations or b.semi_leader):
        cap = 2 * n * L + (2 * g + 1) * n + circulations * n
        if b.total > cap:
            out.append(f"total {b.total} > {cap} (with {circulations} semi-leader tours)")
        return out
    if b.active > 2 * n * L:
        out.append(f"active {b.active} > 2n*ceil(log2 g) = {2 * n * L}")
    if b.leader != n:
        out.append(f"leader {b.leader} != n = {n}")
    if b.moving > 2 * g * n:
        out.append(f"moving {b.moving} > 2gn = {2 * g * n}")
    return out


def check_bounds(b: MoveBreakdown, model: str, n: int, k: int, g: int, circulations: int = 0) -> bool:
    return not bound_failures(b, model, n, k, g, circulations)


def lower_bound_floor(n: int, g: int) -> int:
    """Smallest total move count any algorithm can achieve: ceil(n(g-1)/2)."""
    if g < 1:
        raise ValueError("g must be >= 1")
    return (n * (g - 1) + 1) // 2
