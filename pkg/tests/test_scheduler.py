import io
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringgather.algorithms import transition_for
from ringgather.instances import random_instance
from ringgather.ring_model import (
    FINAL, InstanceSpec, InvalidInstance, Step, build_initial_config, instance_from_gaps,
    make_context,
)
from ringgather.scheduler import (
    MODEL_VIOLATION, STEP_LIMIT, STRATEGIES, TERMINATED, ExecutionTrace, ScheduleHistory,
    ScheduleStrategy, explore_bounded, next_activation_set, replay, run, simulate,
)
from ringgather.verifier import TraceError


def test_unknown_strategy_rejected():
    with pytest.raises(ValueError):
        ScheduleStrategy("chaotic")


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(STRATEGIES), st.integers(1, 9), st.integers(0, 2**32), st.integers(0, 8))
def test_no_live_agent_starves(kind, k, seed, target):
    """Over a prefix where agents retire at random, nobody waits more than B decisions."""
    strategy = ScheduleStrategy(kind, lagger_target=target)
    B = strategy.bound(k)
    rng = random.Random(seed)
    history = ScheduleHistory(k)
    live = list(range(k))
    waited = [0] * k
    for _ in range(40 * k):
        chosen = next_activation_set(strategy, rng, live, history)
        assert chosen and chosen == sorted(set(chosen)) and set(chosen) <= set(live)
        for h in live:
            waited[h] = 0 if h in chosen else waited[h] + 1
            assert waited[h] <= B
        if len(live) > 1 and rng.random() < 0.02:
            live.remove(rng.choice(live))


def test_synchronous_and_round_robin_shapes():
    rng = random.Random(0)
    h = ScheduleHistory(4)
    assert next_activation_set(ScheduleStrategy("synchronous"), rng, [0, 2, 3], h) == [0, 2, 3]
    h = ScheduleHistory(4)
    rr = ScheduleStrategy("round_robin")
    assert [next_activation_set(rr, rng, [0, 2, 3], h) for _ in range(4)] == [[0], [2], [3], [0]]


def test_lagger_starves_target_as_long_as_allowed():
    strategy = ScheduleStrategy("lagger", fairness_bound=5)
    h = ScheduleHistory(3)
    picks = [next_activation_set(strategy, random.Random(0), [0, 1, 2], h)[0] for _ in range(10)]
    assert picks == [1, 2, 1, 2, 0, 1, 2, 1, 2, 0]


def small_spec(**kw):
    return InstanceSpec(n=8, model="distinct", agents=[(0, 7), (2, 1), (3, 8), (6, 3)], g=2, **kw)


@pytest.mark.parametrize("kind", STRATEGIES)
def test_runs_terminate_with_every_strategy(kind):
    result = simulate(small_spec(scheduler=kind))
    assert result.outcome == TERMINATED
    assert all(a.role == FINAL for a in result.final.agents)
    assert result.election_snapshot is not None


def test_step_limit_is_reported():
    result = simulate(small_spec(step_limit=5))
    assert result.outcome == STEP_LIMIT and result.final.step_count == 5


def test_model_violation_is_reported():
    spec = small_spec()
    bad = lambda agent, wb, ctx: Step(move=True, role=FINAL)  # noqa: E731
    result = run(build_initial_config(spec), ScheduleStrategy(), bad, 100, make_context(spec))
    assert result.outcome == MODEL_VIOLATION and "move" in result.error


def test_run_does_not_mutate_its_input():
    spec = small_spec()
    cfg = build_initial_config(spec)
    before = cfg.digest()
    run(cfg, ScheduleStrategy(), transition_for("distinct"), 1000, make_context(spec, random.Random(0)))
    assert cfg.digest() == before


def test_move_counters_agree_with_trace():
    result = simulate(random_instance("random", 32, 8, 3, 5, "random_subset"))
    moves = sum(1 for e in result.trace.events if e.action == "move")
    assert moves == result.total_moves == sum(result.move_breakdown.values())


@pytest.mark.parametrize("model", ["distinct", "random", "anon"])
def test_trace_round_trip_and_replay(model):
    spec = random_instance(model, 24, 6, 3, 11, "random_subset")
    result = simulate(spec)
    text = result.trace.to_jsonl()
    again = ExecutionTrace.read_jsonl(io.StringIO(text))
    assert again.events == result.trace.events and again.spec == spec
    boards, positions, roles = replay(again)
    assert [w.key() for w in boards] == [w.key() for w in result.final.whiteboards]
    assert positions == [a.position for a in result.final.agents]
    assert roles == [a.role for a in result.final.agents]


@pytest.mark.parametrize("text", ["", '{"format": "other"}\n', '{"format": "ring-gather-trace v1"}\n'])
def test_bad_trace_headers(text):
    with pytest.raises(TraceError):
        ExecutionTrace.read_jsonl(io.StringIO(text))


@pytest.mark.parametrize("model", ["distinct", "random", "anon"])
def test_same_inputs_same_trace(model):
    spec = random_instance(model, 20, 5, 2, 3, "random_subset")
    texts = {simulate(spec).trace.to_jsonl() for _ in range(3)}
    assert len(texts) == 1


def test_different_seeds_differ():
    a = simulate(random_instance("random", 20, 5, 2, 3, "random_subset")).trace.to_jsonl()
    b = simulate(random_instance("random", 20, 5, 2, 4, "random_subset")).trace.to_jsonl()
    assert a != b


def test_explorer_every_small_distinct_instance_gathers():
    for pos in itertools.combinations(range(5), 3):
        if pos[0] != 0:
            continue
        for ids in itertools.permutations((1, 2, 3)):
            for g in (2, 3):
                spec = InstanceSpec(n=5, model="distinct", agents=list(zip(pos, ids)), g=g)
                report = explore_bounded(spec)
                assert report.labels == {"Gathered"} and not report.cap_exceeded


def test_explorer_finds_literal_marking_livelock():
    spec = InstanceSpec(n=4, model="distinct", agents=[(0, 1), (2, 2)], g=2)
    report = explore_bounded(spec, paper_literal_marking=True)
    assert "NonTermination" in report.labels
    assert report.counterexamples["NonTermination"]


def test_explorer_unsolvable_anon():
    report = explore_bounded(instance_from_gaps((2, 2), 2))
    assert report.labels == {"Unsolvable"}


def test_explorer_caps():
    spec = InstanceSpec(n=4, model="distinct", agents=[(0, 1), (2, 2)], g=2)
    assert explore_bounded(spec, state_cap=5).cap_exceeded
    assert explore_bounded(spec, branch_cap=3).cap_exceeded


def test_explorer_rejects_random_model():
    spec = InstanceSpec(n=4, model="random", agents=[(0, None), (2, None)], g=2)
    with pytest.raises(InvalidInstance):
        explore_bounded(spec)
