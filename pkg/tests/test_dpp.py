import itertools

import pytest
from hypothesis import given, settings, strategies as st

from src.agent.dpp import (
    action_delta,
    choose_action,
    drift_penalty_objective,
    rank_candidates,
)
from src.agent.queues import drift_bound_b, queue_step, update_virtual_queues
from src.models.action import Action, CandidateKind
from src.models.errors import InfeasibleActionError
from src.models.params import DppConfig, UserParams
from src.models.state import PacketBuffer, SchedulerState, UserState, UserView, VirtualQueueState
from src.system.dynamics import validate_action


def single(age, queue, packet_age=None) -> SchedulerState:
    return SchedulerState(slot=0, users=(UserView(age=age, queue=queue, packet_age=packet_age),))


P06 = [UserParams(p=0.6, a_max=5)]


def test_idle_delta_is_zero():
    assert action_delta(single(4, 10.0), P06, CandidateKind.IDLE_ALL, None, DppConfig(v=50)) == 0.0


def test_sample_delta_example():
    delta = action_delta(single(4, 10.0), P06, CandidateKind.SAMPLE_AND_TRANSMIT, 0, DppConfig(v=50))
    assert delta == pytest.approx(76.0)


def test_retransmit_delta_example():
    delta = action_delta(single(4, 10.0, packet_age=2), P06, CandidateKind.RETRANSMIT, 0, DppConfig(v=50))
    assert delta == pytest.approx(38.0)


def test_retransmit_without_packet_is_infeasible():
    with pytest.raises(InfeasibleActionError):
        action_delta(single(4, 10.0), P06, CandidateKind.RETRANSMIT, 0, DppConfig(v=50))


def test_deltas_match_full_objective_difference():
    state = single(4, 10.0, packet_age=2)
    config = DppConfig(v=50)
    idle = drift_penalty_objective(state, P06, Action.idle(1), config)
    sample = drift_penalty_objective(state, P06, Action.sample(1, 0), config)
    retx = drift_penalty_objective(state, P06, Action.retransmit(1, 0), config)
    assert sample - idle == pytest.approx(76.0)
    assert retx - idle == pytest.approx(38.0)


def test_zero_queues_idle():
    state = SchedulerState(slot=0, users=(UserView(5, 0.0), UserView(9, 0.0, 3)))
    params = [UserParams(p=0.6, a_max=5), UserParams(p=0.9, a_max=5)]
    assert choose_action(state, params, DppConfig(v=1)) == Action.idle(2)


def test_single_user_example_idles():
    assert choose_action(single(4, 10.0), P06, DppConfig(v=50)) == Action.idle(1)


def test_large_backlog_samples():
    assert choose_action(single(10, 100.0), P06, DppConfig(v=50)) == Action.sample(1, 0)


def test_rank_candidates_scan_order():
    state = SchedulerState(slot=0, users=(UserView(3, 1.0, 1), UserView(2, 1.0)))
    params = [UserParams(p=0.5, a_max=5), UserParams(p=0.5, a_max=5)]
    kinds = [(c.kind, c.user) for c in rank_candidates(state, params, DppConfig(v=1))]
    assert kinds == [
        (CandidateKind.IDLE_ALL, None),
        (CandidateKind.RETRANSMIT, 0),
        (CandidateKind.SAMPLE_AND_TRANSMIT, 0),
        (CandidateKind.SAMPLE_AND_TRANSMIT, 1),
    ]


def test_exact_tie_prefers_idle():
    # sample delta: -X p A + V (c_s + c_tr) = -4 * 0.5 * 2 + 2 * 2 = 0
    state = single(2, 4.0)
    params = [UserParams(p=0.5, a_max=5)]
    assert choose_action(state, params, DppConfig(v=2)) == Action.idle(1)


def brute_force(state: SchedulerState, params, config) -> Action:
    """Minimize the full objective over every raw (s, mu) vector; scan order breaks ties."""
    n = state.n_users
    user_states = [
        UserState(age=v.age) if v.packet_age is None else _pending(v)
        for v in state.users
    ]
    feasible = []
    for flags in itertools.product([(0, 0), (0, 1), (1, 0), (1, 1)], repeat=n):
        action = Action(s=tuple(f[0] for f in flags), mu=tuple(f[1] for f in flags))
        if validate_action(action, user_states):
            feasible.append(action)

    def scan_key(action: Action):
        user = action.active_user
        if user is None:
            return (0, 0, 0)
        return (1, user, 1 if action.s[user] else 0)

    feasible.sort(key=scan_key)
    best, best_value = None, None
    for action in feasible:
        value = drift_penalty_objective(state, params, action, config)
        if best_value is None or value < best_value:
            best, best_value = action, value
    return best


def _pending(view: UserView) -> UserState:
    return UserState(age=view.age, buffer=PacketBuffer(sample_slot=0))


@st.composite
def scheduler_states(draw):
    """Integer queues, dyadic probabilities and integer weights keep the arithmetic exact."""
    n = draw(st.integers(min_value=1, max_value=3))
    views, params = [], []
    for _ in range(n):
        age = draw(st.integers(min_value=1, max_value=40))
        queue = float(draw(st.integers(min_value=0, max_value=200)))
        packet_age = draw(st.one_of(st.none(), st.integers(min_value=0, max_value=age - 1)))
        views.append(UserView(age=age, queue=queue, packet_age=packet_age))
        params.append(UserParams(
            p=draw(st.integers(min_value=0, max_value=8)) / 8,
            a_max=float(draw(st.integers(min_value=1, max_value=10))),
            c_sample=float(draw(st.integers(min_value=0, max_value=3))),
            c_transmit=float(draw(st.integers(min_value=0, max_value=3))),
        ))
    v = float(draw(st.integers(min_value=0, max_value=100)))
    return SchedulerState(slot=0, users=tuple(views)), params, DppConfig(v=v)


@settings(max_examples=2000, deadline=None)
@given(scheduler_states())
def test_choose_action_matches_brute_force(case):
    state, params, config = case
    chosen = choose_action(state, params, config)
    expected = brute_force(state, params, config)
    assert drift_penalty_objective(state, params, chosen, config) == drift_penalty_objective(
        state, params, expected, config
    )
    assert chosen == expected


@settings(max_examples=300, deadline=None)
@given(scheduler_states(), st.sampled_from([2.0, 4.0, 0.5]))
def test_scaling_queues_and_weight_keeps_the_choice(case, k):
    state, params, config = case
    scaled = SchedulerState(
        slot=state.slot,
        users=tuple(UserView(v.age, v.queue * k, v.packet_age) for v in state.users),
    )
    assert choose_action(scaled, params, DppConfig(v=config.v * k)) == choose_action(state, params, config)


def test_queue_update_examples():
    assert queue_step(7.0, 5.0, 2) == 4.0
    assert queue_step(0.0, 5.0, 1) == 1.0
    assert queue_step(3.0, 10.0, 6) == 6.0


def test_update_virtual_queues_elementwise():
    params = [UserParams(p=0.5, a_max=5), UserParams(p=0.5, a_max=10)]
    updated = update_virtual_queues(VirtualQueueState(x=(7.0, 3.0)), [2, 6], params)
    assert updated.x == (4.0, 6.0)


@settings(max_examples=1000, deadline=None)
@given(
    x=st.integers(min_value=0, max_value=10_000),
    a_max=st.integers(min_value=1, max_value=50),
    age=st.integers(min_value=1, max_value=10_000),
)
def test_queue_recursion(x, a_max, age):
    updated = queue_step(float(x), float(a_max), age)
    assert updated == max(x - a_max, 0) + age
    assert updated >= age


def test_drift_bound_examples():
    one = SchedulerState(slot=0, users=(UserView(1, 0.0),))
    assert drift_bound_b(one, [UserParams(p=0.5, a_max=5)]) == pytest.approx(14.5)

    two = SchedulerState(slot=0, users=(UserView(1, 0.0), UserView(1, 0.0)))
    assert drift_bound_b(two, [UserParams(p=0.5, a_max=5)] * 2) == pytest.approx(29.0)

    three = SchedulerState(slot=0, users=(UserView(3, 0.0),))
    assert drift_bound_b(three, [UserParams(p=0.5, a_max=5)]) == pytest.approx(20.5)


@pytest.mark.slow
@settings(max_examples=10_000, deadline=None)
@given(scheduler_states())
def test_choose_action_matches_brute_force_at_scale(case):
    state, params, config = case
    assert choose_action(state, params, config) == brute_force(state, params, config)


@settings(max_examples=1000, deadline=None)
@given(scheduler_states(), st.data())
def test_raising_a_queue_never_turns_action_into_idle(case, data):
    state, params, config = case
    chosen = choose_action(state, params, config)
    i = chosen.active_user
    if i is None:
        return
    extra = float(data.draw(st.integers(min_value=1, max_value=500)))
    raised = SchedulerState(
        slot=state.slot,
        users=tuple(
            UserView(v.age, v.queue + extra, v.packet_age) if j == i else v
            for j, v in enumerate(state.users)
        ),
    )
    assert choose_action(raised, params, config).active_user is not None


@settings(max_examples=1000, deadline=None)
@given(scheduler_states())
def test_retransmit_beats_sample_below_the_threshold(case):
    state, params, config = case
    for i, view in enumerate(state.users):
        if view.packet_age is None:
            continue
        retransmit = action_delta(state, params, CandidateKind.RETRANSMIT, i, config)
        sample = action_delta(state, params, CandidateKind.SAMPLE_AND_TRANSMIT, i, config)
        below = view.queue * params[i].p * view.packet_age < config.v * params[i].c_sample
        assert (retransmit < sample) == below


def test_retransmit_sample_threshold_examples():
    # X p A^p = 10 * 0.5 * 2 = 10 against V c_s
    state = single(4, 10.0, packet_age=2)
    params = [UserParams(p=0.5, a_max=5)]
    for v, retransmit_wins in [(11.0, True), (10.0, False), (9.0, False)]:
        config = DppConfig(v=v)
        retransmit = action_delta(state, params, CandidateKind.RETRANSMIT, 0, config)
        sample = action_delta(state, params, CandidateKind.SAMPLE_AND_TRANSMIT, 0, config)
        assert (retransmit < sample) is retransmit_wins
