"""Randomized partial gathering for anonymous agents that know ``k``.

The election reuses the phase walk of :mod:`algo_distinct` with a fresh
random ID drawn at the start of every phase. Equal neighbouring IDs
cannot be ranked, so an agent that sees such a tie turns into a
semi-leader: it tours the ring once, leaving tour flags that make every
still-active agent drop out, compares random IDs with the other
semi-leaders, and becomes the single leader when it holds the unique
minimum (redrawing and touring again on a tie). The gathering part is
shared with the distinct-ID algorithm unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import algo_distinct as base
from .ring_model import (
    ACTIVE, INACTIVE, LEADER, MOVE, SEMI_LEADER, STAY,
    AgentState, Context, ModelViolation, Step, Whiteboard, ceil_log2,
)

SEMI_START = "SemiStart"
SEMI_SEEK = "SemiSeek"
SEMI_WAIT = "SemiWait"


@dataclass(slots=True)
class RandomRegisters:
    phase: int = 1
    id1: int = 0
    id2: int = 0
    id3: int = 0
    semi_observe: bool = False
    passed: bool = False  # overtaken by a survivor of our own phase
    visits: int = 0       # initial nodes reached during the first walk of a phase
    arrived: bool = False
    semi_phase: int = 0
    semi_id: int = 0
    agent_count: int = 0
    is_min: bool = True
    is_unique: bool = True
    leader_observe: bool = False
    count: int = 0


def id_bits(k: int, id_bits_override=None) -> int:
    if id_bits_override is not None:
        return id_bits_override
    return max(1, 3 * ceil_log2(k))


def draw_random_id(k: int, rng, id_bits_override=None) -> int:
    """Uniform ID in ``[0, 2**L)``; consumes exactly one ``getrandbits`` call."""
    return rng.getrandbits(id_bits(k, id_bits_override))


def _draw(ctx: Context) -> int:
    return ctx.rng.getrandbits(ctx.id_bits)


def _probe(r: RandomRegisters, wb: Whiteboard) -> int:
    where = base.probe_node(r.phase, wb)
    if where == base.WAIT and wb.semi_leader_flag:
        # the agent we were waiting for became a semi-leader and will never
        # write a later phase here
        return base.SKIP
    return where


def _drop_out() -> Step:
    return Step(writes={"inactive": True}, role=INACTIVE)


def _start_phase(agent: AgentState, ctx: Context) -> Step:
    r = agent.regs
    r.id1 = _draw(ctx)
    r.visits = 0
    r.passed = False
    r.arrived = True
    agent.pc = base.SEEK_FIRST
    return Step(move=True, writes={"phase": r.phase, "id": r.id1})


def random_active_transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    r = agent.regs
    pc = agent.pc
    if pc == base.WRITE_AND_ADVANCE:
        return _start_phase(agent, ctx)

    first = pc in (base.SEEK_FIRST, base.WAIT_PHASE1)
    if r.arrived:
        r.arrived = False
        if first and wb.initial:
            r.visits += 1
    where = _probe(r, wb)
    if where == base.SKIP:
        r.arrived = True
        agent.pc = base.SEEK_FIRST if first else base.SEEK_SECOND
        return MOVE
    if where == base.WAIT:
        agent.pc = base.WAIT_PHASE1 if first else base.WAIT_PHASE2
        return STAY

    if wb.tour_flag:
        r.semi_observe = True
    if first:
        if wb.phase > r.phase:
            r.passed = True
        if r.visits == ctx.k and wb.phase == r.phase and wb.id == r.id1:
            # one full lap back to our own mark: no other candidate is left
            agent.pc = base.INACTIVE_WAIT if r.semi_observe else base.LEADER_MARK_SELF
            if r.semi_observe:
                return _drop_out()
            return Step(writes={"leader_flag": True}, role=LEADER)
        r.id2 = wb.id
        r.arrived = True
        agent.pc = base.SEEK_SECOND
        return MOVE

    r.id3 = wb.id
    if r.semi_observe or r.passed:
        agent.pc = base.INACTIVE_WAIT
        return _drop_out()
    if r.phase == wb.phase and (r.id1 == r.id2 or r.id2 == r.id3):
        agent.pc = SEMI_START
        return Step(role=SEMI_LEADER)
    if r.id2 >= min(r.id1, r.id3):
        agent.pc = base.INACTIVE_WAIT
        return _drop_out()
    if r.phase == ctx.phases:
        agent.pc = base.LEADER_MARK_SELF
        return Step(writes={"leader_flag": True}, role=LEADER)
    r.phase += 1
    return _start_phase(agent, ctx)


def _new_tour(r: RandomRegisters) -> None:
    r.agent_count = 0
    r.is_min = True
    r.is_unique = True
    r.leader_observe = False


def _compare(agent: AgentState, wb: Whiteboard) -> Step:
    r = agent.regs
    if wb.semi_phase == r.semi_phase:
        other = wb.semi_id
    elif wb.semi_phase == r.semi_phase + 1:
        # that semi-leader already judged our tour and started the next one
        other = wb.semi_prev_id
    elif wb.semi_phase < r.semi_phase:
        agent.pc = SEMI_WAIT
        return STAY
    else:
        raise ModelViolation(f"semi-leader tours out of step: {wb.semi_phase} vs {r.semi_phase}")
    if other < r.semi_id:
        r.is_min = False
    elif other == r.semi_id:
        r.is_unique = False
    agent.pc = SEMI_SEEK
    return MOVE


def _leave_tour_flag(agent: AgentState, wb: Whiteboard) -> Step:
    agent.pc = SEMI_SEEK
    if wb.tour_flag:
        return MOVE
    return Step(move=True, writes={"tour_flag": True})


def _judge(agent: AgentState, ctx: Context) -> Step:
    r = agent.regs
    if r.leader_observe or not r.is_min:
        agent.pc = base.INACTIVE_WAIT
        return Step(writes={"semi_leader_flag": False, "inactive": True}, role=INACTIVE)
    if r.is_unique:
        agent.pc = base.LEADER_MARK_SELF
        return Step(writes={"leader_flag": True}, role=LEADER)
    prev = r.semi_id
    r.semi_phase += 1
    r.semi_id = _draw(ctx)
    _new_tour(r)
    agent.pc = SEMI_SEEK
    return Step(move=True, writes={"semi_phase": r.semi_phase, "semi_prev_id": prev,
                                   "semi_id": r.semi_id})


def semi_leader_transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    r = agent.regs
    pc = agent.pc
    if pc == SEMI_START:
        if wb.tour_flag:
            # another semi-leader already toured past this node
            agent.pc = base.INACTIVE_WAIT
            return _drop_out()
        r.semi_phase = 1
        r.semi_id = _draw(ctx)
        _new_tour(r)
        agent.pc = SEMI_SEEK
        return Step(move=True, writes={"semi_leader_flag": True, "semi_phase": 1,
                                       "semi_id": r.semi_id})
    if pc == SEMI_WAIT:
        if not wb.semi_leader_flag:
            return _leave_tour_flag(agent, wb)
        return _compare(agent, wb)

    if not wb.initial:
        return MOVE
    r.agent_count += 1
    if wb.leader_flag:
        r.leader_observe = True
    if r.agent_count == ctx.k:
        return _judge(agent, ctx)
    if wb.semi_leader_flag:
        return _compare(agent, wb)
    return _leave_tour_flag(agent, wb)


def transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    role = agent.role
    if role == ACTIVE:
        return random_active_transition(agent, wb, ctx)
    if role == SEMI_LEADER:
        return semi_leader_transition(agent, wb, ctx)
    return base.SECOND_PART[role](agent, wb, ctx)
