"""Ring, whiteboards, agent records and the atomic-step engine.

A run is a sequence of atomic steps. In one step an agent reads the
whiteboard of its current node, updates its own registers, optionally
writes whiteboard fields, and either stays or moves one node forward.
Transition functions only ever see the agent's own record and the
whiteboard of its node, so an agent cannot sense co-located agents.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, fields
from typing import Any, Callable, NamedTuple, Optional

MODELS = ("distinct", "random", "anon")

ACTIVE = "active"
INACTIVE = "inactive"
LEADER = "leader"
MOVING = "moving"
SEMI_LEADER = "semi_leader"
FINAL = "final"
ROLES = (ACTIVE, INACTIVE, LEADER, MOVING, SEMI_LEADER, FINAL)


class InvalidInstance(ValueError):
    """Instance violates the ring/agent placement rules."""


class ModelViolation(RuntimeError):
    """A transition asked for something the model forbids."""


def ceil_log2(x: int) -> int:
    """Smallest p with 2**p >= x (0 for x <= 1)."""
    return 0 if x <= 1 else (x - 1).bit_length()


def default_step_limit(n: int, k: int, g: int) -> int:
    return 50 * n * k * (ceil_log2(g) + g)


@dataclass
class InstanceSpec:
    n: int
    model: str
    agents: list  # [(position, id-or-None), ...]
    g: int
    id_bits_override: Optional[int] = None
    seed: int = 0
    scheduler: str = "round_robin"
    step_limit: Optional[int] = None

    def __post_init__(self):
        self.agents = [(int(p), None if i is None else int(i)) for p, i in self.agents]

    @property
    def k(self) -> int:
        return len(self.agents)

    @property
    def positions(self) -> list[int]:
        return [p for p, _ in self.agents]

    @property
    def ids(self) -> list:
        return [i for _, i in self.agents]

    def effective_step_limit(self) -> int:
        if self.step_limit is not None:
            return self.step_limit
        return default_step_limit(self.n, self.k, self.g)

    def validate(self) -> None:
        if self.model not in MODELS:
            raise InvalidInstance(f"unknown model {self.model!r}")
        if self.n < 1:
            raise InvalidInstance("n must be >= 1")
        k = self.k
        if not 1 <= k <= self.n:
            raise InvalidInstance(f"need 1 <= k <= n, got k={k}, n={self.n}")
        pos = self.positions
        if any(not 0 <= p < self.n for p in pos):
            raise InvalidInstance("agent position outside [0, n)")
        if len(set(pos)) != k:
            raise InvalidInstance("two agents share an initial node")
        if not 2 <= self.g <= k:
            raise InvalidInstance(f"g must lie in [2, k], got g={self.g}, k={k}")
        ids = self.ids
        if self.model == "distinct":
            if any(i is None for i in ids):
                raise InvalidInstance("distinct model needs an id for every agent")
            if any(i < 0 for i in ids):
                raise InvalidInstance("ids must be non-negative")
            if len(set(ids)) != k:
                raise InvalidInstance("ids must be distinct")
        elif any(i is not None for i in ids):
            raise InvalidInstance(f"{self.model} agents carry no ids")
        if self.id_bits_override is not None:
            if self.model != "random":
                raise InvalidInstance("id_bits_override applies to the random model only")
            if self.id_bits_override < 1:
                raise InvalidInstance("id_bits_override must be positive")
        if self.step_limit is not None and self.step_limit < 1:
            raise InvalidInstance("step_limit must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidInstance("seed must be a 64-bit unsigned integer")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "model": self.model,
            "agents": [
                {"position": p} if i is None else {"position": p, "id": i}
                for p, i in self.agents
            ],
            "g": self.g,
            "id_bits_override": self.id_bits_override,
            "seed": self.seed,
            "scheduler": self.scheduler,
            "step_limit": self.step_limit,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "InstanceSpec":
        try:
            agents = []
            for a in doc["agents"]:
                if isinstance(a, dict):
                    agents.append((a["position"], a.get("id")))
                else:
                    agents.append((a[0], a[1] if len(a) > 1 else None))
            return cls(
                n=int(doc["n"]),
                model=doc["model"],
                agents=agents,
                g=int(doc["g"]),
                id_bits_override=doc.get("id_bits_override"),
                seed=int(doc.get("seed", 0)),
                scheduler=doc.get("scheduler", "round_robin"),
                step_limit=doc.get("step_limit"),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise InvalidInstance(f"malformed instance document: {exc}") from exc


def instance_from_gaps(gaps, g: int, model: str = "anon", start: int = 0, **kw) -> InstanceSpec:
    """Place agents so consecutive forward gaps equal ``gaps``."""
    if any(d < 1 for d in gaps):
        raise InvalidInstance("gaps must be positive")
    n = sum(gaps)
    pos, p = [], start % n
    for d in gaps:
        pos.append(p)
        p = (p + d) % n
    return InstanceSpec(n=n, model=model, agents=[(q, None) for q in pos], g=g, **kw)


@dataclass(slots=True)
class Whiteboard:
    initial: bool = False
    inactive: bool = False
    phase: int = 0
    id: int = 0
    is_gather: Optional[int] = None  # None is the unset mark
    tour_flag: bool = False
    leader_flag: bool = False
    semi_leader_flag: bool = False
    semi_phase: int = 0
    semi_id: int = 0
    semi_prev_id: int = 0

    def key(self) -> tuple:
        return (self.initial, self.inactive, self.phase, self.id, self.is_gather,
                self.tour_flag, self.leader_flag, self.semi_leader_flag,
                self.semi_phase, self.semi_id, self.semi_prev_id)

    def copy(self) -> "Whiteboard":
        return Whiteboard(*self.key())


WHITEBOARD_FIELDS = frozenset(f.name for f in fields(Whiteboard))


@dataclass(slots=True)
class AgentState:
    index: int
    role: str
    position: int
    pc: str
    regs: Any
    moves_made: int = 0
    moves_by_role: dict = field(default_factory=dict)
    elected: Optional[str] = None  # leader/inactive once the election is over
    election_node: Optional[int] = None

    def copy(self) -> "AgentState":
        return AgentState(self.index, self.role, self.position, self.pc,
                          copy.copy(self.regs), self.moves_made,
                          dict(self.moves_by_role), self.elected, self.election_node)

    def key(self) -> tuple:
        regs = tuple(getattr(self.regs, f.name) for f in fields(self.regs)) if self.regs is not None else ()
        return (self.role, self.position, self.pc, regs)


@dataclass
class Configuration:
    spec: InstanceSpec
    whiteboards: list
    agents: list
    step_count: int = 0

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def k(self) -> int:
        return self.spec.k

    def copy(self) -> "Configuration":
        return Configuration(self.spec, [w.copy() for w in self.whiteboards],
                             [a.copy() for a in self.agents], self.step_count)

    def digest(self) -> tuple:
        """Hashable state identity; excludes counters and the step index."""
        return (tuple(w.key() for w in self.whiteboards),
                tuple(a.key() for a in self.agents))

    def occupancy(self, roles=None) -> dict:
        out: dict[int, int] = {}
        for a in self.agents:
            if roles is None or a.role in roles:
                out[a.position] = out.get(a.position, 0) + 1
        return out


class Event(NamedTuple):
    t: int
    agent: int
    node: int
    role: str
    action: str  # stay / move / write / role_change / terminate
    detail: Optional[dict]


class Step(NamedTuple):
    """What a transition decided for one atomic step."""
    move: bool = False
    writes: Optional[dict] = None
    role: Optional[str] = None


STAY = Step()
MOVE = Step(move=True)


@dataclass
class Context:
    """Per-run knowledge handed to transition functions.

    ``k`` is only meaningful for models whose agents know the agent count.
    """
    model: str
    g: int
    k: int
    phases: int
    id_bits: int
    rng: Any = None
    paper_literal_marking: bool = False


def make_context(spec: InstanceSpec, rng=None, paper_literal_marking: bool = False) -> Context:
    k = spec.k
    bits = spec.id_bits_override or max(1, 3 * ceil_log2(k))
    return Context(spec.model, spec.g, k, max(1, ceil_log2(spec.g)), bits, rng,
                   paper_literal_marking)


def forward_distance(n: int, i: int, j: int) -> int:
    return (j - i) % n


def build_initial_config(spec: InstanceSpec) -> Configuration:
    spec.validate()
    from . import algorithms  # registers per-model state factories

    boards = [Whiteboard() for _ in range(spec.n)]
    for p in spec.positions:
        boards[p].initial = True
    make = algorithms.initial_agent_state
    agents = [make(spec, h, p, i) for h, (p, i) in enumerate(spec.agents)]
    return Configuration(spec, boards, agents, 0)


Transition = Callable[[AgentState, Whiteboard, Context], Step]


def step_in_place(config: Configuration, h: int, transition: Transition, ctx: Context,
                  out: Optional[list] = None) -> list:
    """Execute one atomic step of agent ``h``, mutating ``config``."""
    agent = config.agents[h]
    t = config.step_count
    config.step_count = t + 1
    pos = agent.position
    events = out if out is not None else []
    if agent.role == FINAL:
        events.append(Event(t, h, pos, FINAL, "stay", None))
        return events

    wb = config.whiteboards[pos]
    role = agent.role
    step = transition(agent, wb, ctx)
    if step.move and step.role is not None:
        raise ModelViolation("a single step may not both move and change role")

    acted = False
    if step.writes:
        for name, value in step.writes.items():
            if name not in WHITEBOARD_FIELDS or name == "initial":
                raise ModelViolation(f"illegal whiteboard write {name!r}")
            if name == "is_gather":
                if value not in (0, 1) or wb.is_gather not in (None, value):
                    raise ModelViolation(
                        f"is_gather may only go from unset to 0/1 (node {pos}: {wb.is_gather} -> {value})")
            setattr(wb, name, value)
        events.append(Event(t, h, pos, role, "write", dict(step.writes)))
        acted = True

    if step.role is not None and step.role != role:
        if step.role not in ROLES:
            raise ModelViolation(f"unknown role {step.role!r}")
        if role in (ACTIVE, SEMI_LEADER) and step.role in (LEADER, INACTIVE) and agent.elected is None:
            agent.elected = step.role
            agent.election_node = pos
        agent.role = step.role
        action = "terminate" if step.role == FINAL else "role_change"
        events.append(Event(t, h, pos, role, action, {"role": step.role}))
        acted = True

    if step.move:
        new = pos + 1
        if new == config.spec.n:
            new = 0
        agent.position = new
        agent.moves_made += 1
        mbr = agent.moves_by_role
        mbr[role] = mbr.get(role, 0) + 1
        phase = getattr(agent.regs, "phase", None) if role == ACTIVE else None
        detail = {"to": new} if phase is None else {"to": new, "phase": phase}
        events.append(Event(t, h, pos, role, "move", detail))
        acted = True

    if not acted:
        events.append(Event(t, h, pos, role, "stay", None))
    return events


def apply_atomic_step(config: Configuration, h: int, transition: Transition,
                      ctx: Context) -> tuple[Configuration, list]:
    """Pure variant of :func:`step_in_place`: the input is left untouched."""
    if not 0 <= h < len(config.agents):
        raise IndexError(f"no agent {h}")
    new = config.copy()
    events = step_in_place(new, h, transition, ctx)
    return new, events
