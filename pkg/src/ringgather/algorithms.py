"""Per-model initial agent state and transition lookup."""

from . import algo_anon, algo_distinct, algo_random
from .ring_model import ACTIVE, AgentState, InstanceSpec

TRANSITIONS = {
    "distinct": algo_distinct.transition,
    "random": algo_random.transition,
    "anon": algo_anon.transition,
}


def transition_for(model: str):
    return TRANSITIONS[model]


def initial_agent_state(spec: InstanceSpec, index: int, position: int, agent_id) -> AgentState:
    if spec.model == "distinct":
        regs = algo_distinct.initial_registers(agent_id)
        pc = algo_distinct.WRITE_AND_ADVANCE
    elif spec.model == "random":
        regs = algo_random.RandomRegisters()
        pc = algo_distinct.WRITE_AND_ADVANCE
    else:
        regs = algo_anon.AnonRegisters()
        pc = algo_anon.CIRCULATE
    return AgentState(index=index, role=ACTIVE, position=position, pc=pc, regs=regs)
