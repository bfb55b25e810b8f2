"""Deterministic partial gathering for agents with distinct IDs.

First part: a Peterson-style election run for ``ceil(log2 g)`` phases.
Each active agent writes ``(phase, id)`` on its node, walks forward to
the next two nodes that started the same phase, and keeps campaigning
only when the middle of the three IDs it saw is the smallest.

Second part: every leader walks to the next leader node, writing
``is_gather`` on each inactive node it passes. Inactive agents wake up
when their node is written and walk forward to the nearest node whose
mark is 1.

Every routine here is compiled to one atomic step per call: a wait in
the original loop becomes a ``STAY`` that is re-evaluated on the next
activation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ring_model import (
    ACTIVE, FINAL, INACTIVE, LEADER, MOVE, MOVING, STAY,
    AgentState, Context, Step, Whiteboard,
)

# program counters
WRITE_AND_ADVANCE = "WriteAndAdvance"
SEEK_FIRST = "SeekFirst"
WAIT_PHASE1 = "WaitPhase1"
SEEK_SECOND = "SeekSecond"
WAIT_PHASE2 = "WaitPhase2"
LEADER_MARK_SELF = "LeaderMarkSelf"
LEADER_SEEK = "LeaderSeek"
LEADER_WAIT_RACE = "LeaderWaitRace"
INACTIVE_WAIT = "InactiveWait"
MOVING_SEEK = "MovingSeek"
DONE = "Done"

SKIP, WAIT, ARRIVE = 0, 1, 2


@dataclass(slots=True)
class DistinctRegisters:
    id: int
    phase: int = 1
    id1: int = 0
    id2: int = 0
    id3: int = 0
    count: int = 0
    passed: bool = False  # first stop already showed a later phase


def initial_registers(agent_id: int) -> DistinctRegisters:
    return DistinctRegisters(id=agent_id, phase=1, id1=agent_id)


def probe_node(phase: int, wb: Whiteboard) -> int:
    """Where an agent in the middle of a forward walk stands w.r.t. ``wb``.

    SKIP: keep walking (no agent started here, or an agent dropped out
    here in an earlier phase). WAIT: we overtook the agent that owns this
    node. ARRIVE: the node started our phase (or a later one).

    An inactive mark on a node of a later phase is not skipped: the mark
    leaves the node's ID untouched, so a straggler reads exactly what it
    would have read had it arrived before the mark was written.
    """
    if not wb.initial or (wb.inactive and wb.phase < phase):
        return SKIP
    if phase > wb.phase:
        return WAIT
    return ARRIVE


def active_transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    r = agent.regs
    pc = agent.pc
    if pc == WRITE_AND_ADVANCE:
        agent.pc = SEEK_FIRST
        return Step(move=True, writes={"phase": r.phase, "id": r.id1})

    first = pc in (SEEK_FIRST, WAIT_PHASE1)
    where = probe_node(r.phase, wb)
    if where == SKIP:
        agent.pc = SEEK_FIRST if first else SEEK_SECOND
        return MOVE
    if where == WAIT:
        agent.pc = WAIT_PHASE1 if first else WAIT_PHASE2
        return STAY

    if first:
        # A later phase here means the agent behind us already campaigned
        # with our ID and moved on; we are redundant for this phase.
        r.passed = wb.phase > r.phase
        if wb.phase == r.phase and wb.id == r.id1:
            # walked all the way round to our own mark: we are the last candidate
            agent.pc = LEADER_MARK_SELF
            return Step(role=LEADER)
        r.id2 = wb.id
        agent.pc = SEEK_SECOND
        return MOVE

    r.id3 = wb.id
    if r.passed or r.id2 >= min(r.id1, r.id3):
        agent.pc = INACTIVE_WAIT
        return Step(writes={"inactive": True}, role=INACTIVE)
    if r.phase == ctx.phases:
        agent.pc = LEADER_MARK_SELF
        return Step(role=LEADER)
    r.phase += 1
    r.id1 = r.id2
    agent.pc = SEEK_FIRST
    return Step(move=True, writes={"phase": r.phase, "id": r.id1})


def leader_transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    r = agent.regs
    if agent.pc == LEADER_MARK_SELF:
        r.count = 1
        agent.pc = LEADER_SEEK
        return Step(move=True, writes={"is_gather": 0})

    if wb.is_gather is not None:
        # reached the next leader node
        agent.pc = MOVING_SEEK
        return Step(role=MOVING)
    if not wb.initial:
        return MOVE
    if not wb.inactive:
        # an agent that started here has not finished its election yet
        agent.pc = LEADER_WAIT_RACE
        return STAY

    if ctx.paper_literal_marking:
        mark = 1 if r.count == 0 else 0
        r.count = (r.count + 1) % ctx.g
    else:
        r.count = (r.count + 1) % ctx.g
        mark = 1 if r.count == 0 else 0
    agent.pc = LEADER_SEEK
    return Step(move=True, writes={"is_gather": mark})


def inactive_transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    if wb.is_gather is None:
        return STAY
    agent.pc = MOVING_SEEK
    return Step(role=MOVING)


def moving_transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    if wb.is_gather == 1:
        agent.pc = DONE
        return Step(role=FINAL)
    if wb.initial and wb.is_gather is None:
        # overtook a leader that has not marked this node yet
        return STAY
    return MOVE


SECOND_PART = {
    LEADER: leader_transition,
    INACTIVE: inactive_transition,
    MOVING: moving_transition,
}


def transition(agent: AgentState, wb: Whiteboard, ctx: Context) -> Step:
    if agent.role == ACTIVE:
        return active_transition(agent, wb, ctx)
    return SECOND_PART[agent.role](agent, wb, ctx)
