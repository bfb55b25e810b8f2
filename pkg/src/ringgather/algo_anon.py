"""Deterministic gathering for anonymous agents that know ``k``.

Each agent tours the ring once and records the gaps between consecutive
initial nodes. Every agent then sees a rotation of the same gap sequence,
so all of them agree on its lexicographically least rotation and on its
period. When the period is below ``g`` no deterministic algorithm can
gather (symmetric agents would mirror each other forever) and the agent
stops where it started; otherwise it walks to the nearest agent start
whose own gap sequence is the least rotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ring_model import FINAL, MOVE, AgentState, Context, Step, Whiteboard

CIRCULATE = "Circulate"
RELOCATE = "Relocate"
DONE = "Done"


class InvalidArgument(ValueError):
    pass


def distance_sequence(entries: Sequence[int], n: int | None = None) -> tuple:
    d = tuple(int(x) for x in entries)
    if not d:
        raise InvalidArgument("distance sequence must be non-empty")
    if any(x < 1 for x in d):
        raise InvalidArgument("every gap must be at least 1")
    if n is not None and sum(d) != n:
        raise InvalidArgument(f"gaps sum to {sum(d)}, expected {n}")
    return d


def gaps_from_positions(n: int, positions: Sequence[int]) -> tuple:
    """Gap sequence read forward from the first listed position."""
    start = positions[0]
    order = sorted(positions, key=lambda p: (p - start) % n)
    return tuple((order[(i + 1) % len(order)] - order[i]) % n or n for i in range(len(order)))


def shift(d: Sequence[int], x: int) -> tuple:
    k = len(d)
    if not 0 <= x < k:
        raise InvalidArgument(f"shift offset {x} outside [0, {k})")
    d = tuple(d)
    return d[x:] + d[:x]


def period(d: Sequence[int]) -> int:
    d = tuple(d)
    k = len(d)
    for p in range(1, k + 1):
        if k % p == 0 and d[p:] + d[:p] == d:
            return p
    return k  # unreachable: p = k always matches


def _least_rotation(s: Sequence[int]) -> int:
    """Booth's algorithm: start index of a lexicographically least rotation."""
    s = list(s) * 2
    fail = [-1] * len(s)
    best = 0
    for j in range(1, len(s)):
        c = s[j]
        i = fail[j - best - 1]
        while i != -1 and c != s[best + i + 1]:
            if c < s[best + i + 1]:
                best = j - i - 1
            i = fail[i]
        if c != s[best + i + 1]:  # i == -1
            if c < s[best]:
                best = j
            fail[j - best] = -1
        else:
            fail[j - best] = i + 1
    return best


def lex_min_rotation(d: Sequence[int]) -> tuple[tuple, int]:
    """Least rotation of ``d`` and the smallest offset producing it."""
    d = tuple(d)
    x = _least_rotation(d) % period(d)
    return d[x:] + d[:x], x


@dataclass(frozen=True)
class SolvabilityReport:
    d_min: tuple
    period: int
    solvable: bool
    expected_groups: int | None

    def render(self) -> str:
        lines = [
            "D_min: " + ",".join(map(str, self.d_min)),
            f"period: {self.period}",
            f"solvable: {'yes' if self.solvable else 'no'}",
        ]
        if self.solvable:
            lines.append(f"expected_groups: {self.expected_groups}")
        return "\n".join(lines)


def is_solvable(d: Sequence[int], g: int) -> SolvabilityReport:
    d_min, _ = lex_min_rotation(d)
    p = period(d_min)
    ok = p >= g
    return SolvabilityReport(d_min, p, ok, len(d_min) // p if ok else None)


def relocation_offset(d: Sequence[int], x: int) -> int:
    if not 0 <= x < len(d):
        raise InvalidArgument(f"offset {x} outside [0, {len(d)})")
    return sum(d[:x])


@dataclass(slots=True)
class AnonRegisters:
    total: int = 0
    dis: int = 0
    D: tuple = ()
    x: int = 0
    remaining_moves: int = 0
    unsolvable: bool = False


def anon_transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    r = agent.regs
    if agent.pc == CIRCULATE:
        if r.dis == 0 or not wb.initial:
            r.dis += 1
            return MOVE
        r.D = r.D + (r.dis,)
        r.total += 1
        r.dis = 0
        if r.total < ctx.k:
            r.dis = 1
            return MOVE
        # back at the start node with the full gap sequence
        report = is_solvable(r.D, ctx.g)
        if not report.solvable:
            r.unsolvable = True
            agent.pc = DONE
            return Step(role=FINAL)
        r.x = min(x for x in range(ctx.k) if shift(r.D, x) == report.d_min)
        r.remaining_moves = relocation_offset(r.D, r.x)
        agent.pc = RELOCATE

    if r.remaining_moves == 0:
        agent.pc = DONE
        return Step(role=FINAL)
    r.remaining_moves -= 1
    return MOVE


transition = anon_transition
