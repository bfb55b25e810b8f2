"""Fair activation schedules, the run driver, traces, and a tiny-instance explorer."""

from __future__ import annotations

import io
import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .algorithms import transition_for
from .ring_model import (
    ACTIVE, FINAL, SEMI_LEADER, Configuration, Context, InstanceSpec, InvalidInstance,
    ModelViolation, Whiteboard, build_initial_config, make_context, step_in_place,
)

STRATEGIES = ("synchronous", "round_robin", "random_subset", "lagger")

TERMINATED = "Terminated"
STEP_LIMIT = "StepLimit"
MODEL_VIOLATION = "ModelViolation"

TRACE_FORMAT = "ring-gather-trace v1"


@dataclass(frozen=True)
class ScheduleStrategy:
    kind: str = "round_robin"
    fairness_bound: Optional[int] = None  # defaults to 4k
    lagger_target: int = 0

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown scheduler {self.kind!r}; choose from {', '.join(STRATEGIES)}")
        if self.fairness_bound is not None and self.fairness_bound < 1:
            raise ValueError("fairness bound must be positive")

    def bound(self, k: int) -> int:
        return self.fairness_bound if self.fairness_bound is not None else 4 * k


class ScheduleHistory:
    """Activation bookkeeping carried between scheduler decisions."""

    def __init__(self, k: int):
        self.last = -1
        self.starved = [0] * k  # decisions since each agent was last scheduled
        self.decisions = 0

    def record(self, chosen: list, live: Iterable[int]) -> None:
        s = self.starved
        for h in live:
            s[h] += 1
        for h in chosen:
            s[h] = 0
        self.last = chosen[-1]
        self.decisions += 1


def _next_in_cycle(live: list, last: int) -> int:
    for h in live:
        if h > last:
            return h
    return live[0]


def next_activation_set(strategy: ScheduleStrategy, rng: random.Random, live: list,
                        history: ScheduleHistory) -> list:
    """Pick the non-empty, ascending set of agents that step next.

    ``live`` must be sorted. The history is updated in place.
    """
    if not live:
        raise ValueError("no live agents to schedule")
    kind = strategy.kind
    if kind == "synchronous":
        chosen = list(live)
    elif kind == "round_robin":
        chosen = [_next_in_cycle(live, history.last)]
    elif kind == "random_subset":
        B = strategy.bound(len(history.starved))
        m = len(live)
        bits = 0
        while bits == 0:
            bits = rng.getrandbits(m)
        chosen = [h for j, h in enumerate(live)
                  if bits >> j & 1 or history.starved[h] >= B - 1]
    else:  # lagger
        B = strategy.bound(len(history.starved))
        target = strategy.lagger_target % len(history.starved)
        others = [h for h in live if h != target]
        if target in live and (not others or history.starved[target] >= B - 1):
            chosen = [target]
        else:
            last = history.last if history.last != target else getattr(history, "last_other", -1)
            chosen = [_next_in_cycle(others, last)]
            history.last_other = chosen[0]
    history.record(chosen, live)
    return chosen


@dataclass
class ExecutionTrace:
    spec: InstanceSpec
    events: list
    scheduler: str = "round_robin"
    paper_literal_marking: bool = False

    def header(self) -> dict:
        return {"format": TRACE_FORMAT, "spec": self.spec.to_json(),
                "scheduler": self.scheduler,
                "paper_literal_marking": self.paper_literal_marking}

    def write_jsonl(self, fh) -> None:
        dumps = json.dumps
        fh.write(dumps(self.header(), separators=(",", ":")) + "\n")
        for e in self.events:
            fh.write(dumps({"t": e[0], "agent": e[1], "node": e[2], "role": e[3],
                            "action": e[4], "detail": e[5]}, separators=(",", ":")) + "\n")

    def to_jsonl(self) -> str:
        buf = io.StringIO()
        self.write_jsonl(buf)
        return buf.getvalue()

    @classmethod
    def read_jsonl(cls, fh) -> "ExecutionTrace":
        from .ring_model import Event
        from .verifier import TraceError

        lines = [ln for ln in fh if ln.strip()]
        if not lines:
            raise TraceError("empty trace file")
        try:
            head = json.loads(lines[0])
            if head.get("format") != TRACE_FORMAT:
                raise TraceError(f"unexpected trace header {head.get('format')!r}")
            spec = InstanceSpec.from_json(head["spec"])
            events = []
            for ln in lines[1:]:
                d = json.loads(ln)
                events.append(Event(d["t"], d["agent"], d["node"], d["role"], d["action"], d["detail"]))
        except (ValueError, KeyError, TypeError) as exc:
            if isinstance(exc, TraceError):
                raise
            raise TraceError(f"malformed trace: {exc}") from exc
        return cls(spec, events, head.get("scheduler", "round_robin"),
                   bool(head.get("paper_literal_marking", False)))


@dataclass
class RunResult:
    outcome: str
    final: Configuration
    trace: ExecutionTrace
    move_breakdown: dict
    election_snapshot: Optional[Configuration] = None
    semi_seen: bool = False
    error: Optional[str] = None

    @property
    def total_moves(self) -> int:
        return sum(a.moves_made for a in self.final.agents)


def _role_totals(config: Configuration) -> dict:
    out: dict[str, int] = {}
    for a in config.agents:
        for role, c in a.moves_by_role.items():
            out[role] = out.get(role, 0) + c
    return out


def run(config: Configuration, strategy: ScheduleStrategy, transition, step_limit: int,
        ctx: Context, rng: Optional[random.Random] = None, record_trace: bool = True) -> RunResult:
    """Drive ``config`` (copied) until every agent is final or ``step_limit`` steps ran."""
    if step_limit < 1:
        raise ValueError("step_limit must be positive")
    cfg = config.copy()
    if rng is None:
        rng = ctx.rng if ctx.rng is not None else random.Random(cfg.spec.seed)
    agents = cfg.agents
    k = len(agents)
    history = ScheduleHistory(k)
    events: list = []
    sink = events if record_trace else None
    live = [h for h in range(k) if agents[h].role != FINAL]
    electing = cfg.spec.model != "anon"
    campaigning = sum(1 for a in agents if a.role in (ACTIVE, SEMI_LEADER)) if electing else -1
    snapshot = None
    semi_seen = any(a.role == SEMI_LEADER for a in agents)
    outcome, error = TERMINATED, None
    try:
        while live:
            if cfg.step_count >= step_limit:
                outcome = STEP_LIMIT
                break
            chosen = next_activation_set(strategy, rng, live, history)
            finished = False
            for h in chosen:
                if cfg.step_count >= step_limit:
                    break
                a = agents[h]
                before = a.role
                step_in_place(cfg, h, transition, ctx, sink if sink is not None else [])
                after = a.role
                if after != before:
                    if after == FINAL:
                        finished = True
                    if after == SEMI_LEADER:
                        semi_seen = True
                    if electing and before in (ACTIVE, SEMI_LEADER) and after not in (ACTIVE, SEMI_LEADER):
                        campaigning -= 1
                        if campaigning == 0 and snapshot is None:
                            snapshot = cfg.copy()
            if finished:
                live = [h for h in live if agents[h].role != FINAL]
    except ModelViolation as exc:
        outcome, error = MODEL_VIOLATION, str(exc)
    trace = ExecutionTrace(cfg.spec, events, strategy.kind, ctx.paper_literal_marking)
    return RunResult(outcome, cfg, trace, _role_totals(cfg), snapshot, semi_seen, error)


def simulate(spec: InstanceSpec, scheduler: Optional[str] = None, paper_literal_marking: bool = False,
             record_trace: bool = True, fairness_bound: Optional[int] = None,
             lagger_target: int = 0) -> RunResult:
    """Build, schedule and run one instance; the whole run is a function of its arguments."""
    config = build_initial_config(spec)
    rng = random.Random(spec.seed)
    ctx = make_context(spec, rng, paper_literal_marking)
    strategy = ScheduleStrategy(scheduler or spec.scheduler, fairness_bound, lagger_target)
    return run(config, strategy, transition_for(spec.model), spec.effective_step_limit(), ctx, rng,
               record_trace)


def replay(trace: ExecutionTrace) -> tuple[list, list, list]:
    """Rebuild (whiteboards, positions, roles) by applying the trace's events."""
    cfg = build_initial_config(trace.spec)
    boards = cfg.whiteboards
    pos = [a.position for a in cfg.agents]
    roles = [a.role for a in cfg.agents]
    for e in trace.events:
        action = e[4]
        if action == "write":
            for name, value in e[5].items():
                setattr(boards[e[2]], name, value)
        elif action == "move":
            pos[e[1]] = e[5]["to"]
        elif action in ("role_change", "terminate"):
            roles[e[1]] = e[5]["role"]
    return boards, pos, roles


# -- bounded exhaustive exploration -------------------------------------------------


class CapExceeded(RuntimeError):
    pass


@dataclass
class ExploreReport:
    outcomes: set = field(default_factory=set)   # {(label, digest)}
    counterexamples: dict = field(default_factory=dict)  # label -> schedule (list of agent tuples)
    states: int = 0
    cap_exceeded: bool = False

    @property
    def labels(self) -> set:
        return {label for label, _ in self.outcomes}

    @property
    def violations(self) -> set:
        return self.labels - {"Gathered", "Unsolvable"}


def explore_bounded(spec: InstanceSpec, branch_cap: int = 10_000, state_cap: int = 200_000,
                    paper_literal_marking: bool = False) -> ExploreReport:
    """Enumerate every singleton and all-agents activation choice from the initial state.

    Terminal states are judged with the verifier. A strongly connected set of
    non-terminal states whose internal edges activate every live agent is a
    fair execution that never terminates; it is reported as ``NonTermination``.
    ``branch_cap`` bounds the schedule length, ``state_cap`` the visited states.
    """
    import networkx as nx

    from .verifier import check_partial_gathering

    if spec.model == "random":
        raise InvalidInstance("the explorer handles the deterministic models only")
    root = build_initial_config(spec)
    if branch_cap < 1 or state_cap < 1:
        raise ValueError("caps must be positive")
    trans = transition_for(spec.model)
    ctx = make_context(spec, None, paper_literal_marking)
    report = ExploreReport()
    graph = nx.DiGraph()
    parent: dict = {}
    labels_on: dict = {}
    root_key = root.digest()
    parent[root_key] = None
    queue = deque([(root, root_key, 0)])
    graph.add_node(root_key)
    terminals = {}
    while queue:
        cfg, key, depth = queue.popleft()
        live = [h for h, a in enumerate(cfg.agents) if a.role != FINAL]
        if not live:
            terminals[key] = cfg
            continue
        if depth >= branch_cap:
            report.cap_exceeded = True
            continue
        choices = [(h,) for h in live]
        if len(live) > 1:
            choices.append(tuple(live))
        for choice in choices:
            nxt = cfg.copy()
            try:
                for h in choice:
                    step_in_place(nxt, h, trans, ctx)
            except ModelViolation:
                report.outcomes.add(("ModelViolation", key))
                report.counterexamples.setdefault("ModelViolation", _path(parent, key) + [choice])
                continue
            nkey = nxt.digest()
            if graph.has_edge(key, nkey):
                labels_on[(key, nkey)] |= set(choice)
            else:
                graph.add_edge(key, nkey)
                labels_on[(key, nkey)] = set(choice)
            if nkey not in parent:
                if len(parent) >= state_cap:
                    report.cap_exceeded = True
                    continue
                parent[nkey] = (key, choice)
                queue.append((nxt, nkey, depth + 1))
    report.states = len(parent)

    for key, cfg in terminals.items():
        verdict = check_partial_gathering(cfg, spec.g)
        report.outcomes.add((verdict.kind, key))
        if verdict.kind == "Violation":
            report.counterexamples.setdefault("Violation", _path(parent, key))

    for comp in nx.strongly_connected_components(graph):
        if len(comp) == 1:
            (only,) = comp
            if not graph.has_edge(only, only):
                continue
        if any(node in terminals for node in comp):
            continue
        activated: set = set()
        for u in comp:
            for v in graph.successors(u):
                if v in comp:
                    activated |= labels_on[(u, v)]
        rep = min(comp)
        live = {h for h, a in enumerate(rep[1]) if a[0] != FINAL}
        if live <= activated:
            report.outcomes.add(("NonTermination", rep))
            report.counterexamples.setdefault("NonTermination", _path(parent, rep))
    return report


def _path(parent: dict, key) -> list:
    out = []
    while parent.get(key) is not None:
        key, choice = parent[key]
        out.append(choice)
    return out[::-1]
