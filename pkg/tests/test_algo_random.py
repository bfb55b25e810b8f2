import random
from dataclasses import replace

import pytest

from ringgather import algo_distinct as ad
from ringgather import algo_random as ar
from ringgather.instances import random_instance
from ringgather.ring_model import (
    ACTIVE, INACTIVE, LEADER, SEMI_LEADER, AgentState, Context, ModelViolation,
    Whiteboard,
)
from ringgather.scheduler import STRATEGIES, simulate
from ringgather.verifier import check_partial_gathering, semi_circulations


def ctx(k=8, g=4, seed=0, bits=9):
    return Context("random", g, k, max(1, (g - 1).bit_length()), bits, random.Random(seed))


def agent(pc, role=ACTIVE, **regs):
    return AgentState(index=0, role=role, position=0, pc=pc, regs=ar.RandomRegisters(**regs))


def board(**kw):
    return replace(Whiteboard(initial=True), **kw)


def test_id_length():
    assert ar.id_bits(8) == 9 and ar.id_bits(2) == 3 and ar.id_bits(8, 1) == 1


def test_draws_stay_in_range_and_repeat_per_seed():
    a = [ar.draw_random_id(8, random.Random(5)) for _ in range(50)]
    assert all(0 <= x < 512 for x in a)
    assert {ar.draw_random_id(8, random.Random(s), 1) for s in range(40)} == {0, 1}
    r1, r2 = random.Random(9), random.Random(9)
    assert [ar.draw_random_id(8, r1) for _ in range(5)] == [ar.draw_random_id(8, r2) for _ in range(5)]


def decide(id1, id2, id3, phase=1):
    a = agent(ad.SEEK_SECOND, phase=phase, id1=id1, id2=id2)
    return a, ar.random_active_transition(a, board(phase=phase, id=id3), ctx())


def test_distinct_middle_minimum_stays_active():
    a, step = decide(2, 1, 2)
    assert a.role == ACTIVE and a.regs.phase == 2 and step.move


def test_larger_middle_drops_out():
    _, step = decide(3, 4, 3)
    assert step.role == INACTIVE


@pytest.mark.parametrize("ids", [(5, 5, 2), (2, 5, 5)])
def test_same_phase_tie_makes_semi_leader(ids):
    _, step = decide(*ids)
    assert step.role == SEMI_LEADER


def test_seen_tour_flag_forces_drop_out():
    a = agent(ad.SEEK_SECOND, phase=1, id1=9, id2=1, semi_observe=True)
    assert ar.random_active_transition(a, board(phase=1, id=8), ctx()).role == INACTIVE


def test_lone_candidate_detects_itself_after_k_nodes():
    a = agent(ad.SEEK_FIRST, phase=1, id1=3, visits=3, arrived=True)
    step = ar.random_active_transition(a, board(phase=1, id=3), ctx(k=4))
    assert step.role == LEADER and step.writes == {"leader_flag": True}


def test_equal_id_before_k_nodes_is_not_a_self_match():
    a = agent(ad.SEEK_FIRST, phase=1, id1=3, visits=0, arrived=True)
    step = ar.random_active_transition(a, board(phase=1, id=3), ctx(k=4))
    assert step.role is None and a.regs.id2 == 3


def test_wait_at_semi_leader_node_is_skipped():
    a = agent(ad.SEEK_FIRST, phase=2, id1=3)
    assert ar.random_active_transition(a, board(phase=1, semi_leader_flag=True), ctx()).move
    assert ar.random_active_transition(a, board(phase=1), ctx()).move is False


def semi(k=3, **regs):
    regs = {"semi_phase": 1, "semi_id": 4, **regs}
    return agent(ar.SEMI_SEEK, role=SEMI_LEADER, **regs), ctx(k=k)


def test_judgement_unique_minimum_wins():
    a, c = semi(agent_count=2)
    step = ar.semi_leader_transition(a, board(semi_leader_flag=True), c)
    assert step.role == LEADER and step.writes == {"leader_flag": True}


def test_judgement_leader_flag_seen_drops_out_and_clears_flag():
    a, c = semi(agent_count=1)
    ar.semi_leader_transition(a, board(leader_flag=True), c)
    step = ar.semi_leader_transition(a, board(semi_leader_flag=True), c)
    assert step.role == INACTIVE and step.writes["semi_leader_flag"] is False


def test_judgement_tie_starts_another_tour():
    a, c = semi(agent_count=2, is_unique=False)
    step = ar.semi_leader_transition(a, board(semi_leader_flag=True), c)
    assert step.move and step.writes["semi_phase"] == 2 and step.writes["semi_prev_id"] == 4
    assert a.regs.is_unique and a.regs.agent_count == 0


@pytest.mark.parametrize("other, field", [(4, "is_unique"), (1, "is_min")])
def test_compare_same_tour(other, field):
    a, c = semi(agent_count=0)
    ar.semi_leader_transition(a, board(semi_leader_flag=True, semi_phase=1, semi_id=other), c)
    assert getattr(a.regs, field) is False


def test_compare_against_node_one_tour_ahead_uses_previous_id():
    a, c = semi(agent_count=0)
    ar.semi_leader_transition(
        a, board(semi_leader_flag=True, semi_phase=2, semi_id=0, semi_prev_id=9), c)
    assert a.regs.is_min and a.regs.is_unique


def test_compare_waits_for_slower_semi_leader():
    a, c = semi(semi_phase=2)
    step = ar.semi_leader_transition(a, board(semi_leader_flag=True, semi_phase=1), c)
    assert not step.move and a.pc == ar.SEMI_WAIT


def test_compare_too_far_ahead_is_a_model_violation():
    a, c = semi()
    with pytest.raises(ModelViolation):
        ar.semi_leader_transition(a, board(semi_leader_flag=True, semi_phase=3), c)


def test_semi_leader_leaves_tour_flags():
    a, c = semi()
    step = ar.semi_leader_transition(a, board(), c)
    assert step.writes == {"tour_flag": True} and step.move
    assert ar.semi_leader_transition(a, Whiteboard(), c).move


def test_every_semi_leader_tour_is_one_lap():
    laps = []
    for seed in range(120):
        spec = random_instance("random", 8, 2 + seed % 3, 2, seed, STRATEGIES[seed % 4],
                               id_bits_override=3)
        result = simulate(spec, record_trace=False)
        assert check_partial_gathering(result.final, 2, result.outcome).kind == "Gathered"
        tours = semi_circulations(result.final)
        assert result.move_breakdown.get(SEMI_LEADER, 0) == tours * spec.n
        laps.append(tours)
    assert max(laps) >= 2


def test_forced_collisions_recirculate_until_distinct():
    tours = set()
    for seed in range(80):
        spec = random_instance("random", 8, 4, 4, seed, STRATEGIES[seed % 4], id_bits_override=1)
        result = simulate(spec, record_trace=False)
        assert check_partial_gathering(result.final, 4, result.outcome).kind == "Gathered"
        assert sum(a.elected == LEADER for a in result.final.agents) == 1
        tours.add(max(a.regs.semi_phase for a in result.final.agents))
    assert max(tours) >= 2


def test_forced_collisions_with_small_g_still_gather():
    for seed in range(40):
        spec = random_instance("random", 8, 4, 2, seed, STRATEGIES[seed % 4], id_bits_override=1)
        result = simulate(spec, record_trace=False)
        assert check_partial_gathering(result.final, 2, result.outcome).kind == "Gathered"
        # at most one leader comes out of the semi-leader path
        via_semi = sum(1 for a in result.final.agents
                       if a.elected == LEADER and a.regs.semi_phase > 0)
        assert via_semi <= 1
