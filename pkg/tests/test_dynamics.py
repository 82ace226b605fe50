import math

import pytest
from hypothesis import given, settings, strategies as st

from src.models.action import Action
from src.models.errors import InconsistentStateError
from src.models.params import UserParams
from src.models.state import PacketBuffer, UserState
from src.system.channel import realize_delivery
from src.system.dynamics import (
    age_step,
    cost_of_action,
    expected_delivery,
    packet_age,
    take_sample,
    validate_action,
)
from src.system.rng import SlotRng


def test_idle_action_is_always_feasible():
    states = [UserState(), UserState(age=4, buffer=PacketBuffer(sample_slot=2))]
    assert validate_action(Action.idle(2), states)


def test_two_transmitters_violate_interference():
    states = [UserState(buffer=PacketBuffer(0)), UserState(buffer=PacketBuffer(0))]
    assert not validate_action(Action(s=(0, 0), mu=(1, 1)), states)


def test_retransmit_needs_pending_packet():
    assert not validate_action(Action.retransmit(1, 0), [UserState()])
    delivered = UserState(age=2, buffer=PacketBuffer(sample_slot=0, delivered=True))
    assert not validate_action(Action.retransmit(1, 0), [delivered])
    assert validate_action(Action.retransmit(1, 0), [UserState(age=3, buffer=PacketBuffer(1))])


def test_sampling_without_transmitting_is_infeasible():
    assert not validate_action(Action(s=(1,), mu=(0,)), [UserState()])


def test_packet_age():
    assert packet_age(UserState(age=2, buffer=PacketBuffer(sample_slot=10)), 10) == 0
    assert packet_age(UserState(age=5, buffer=PacketBuffer(sample_slot=10)), 13) == 3


def test_sample_slot_must_be_nonnegative():
    with pytest.raises(ValueError):
        PacketBuffer(sample_slot=-1)


def test_packet_age_errors():
    with pytest.raises(InconsistentStateError):
        packet_age(UserState(age=2, buffer=PacketBuffer(sample_slot=5)), 4)
    with pytest.raises(InconsistentStateError):
        packet_age(UserState(), 4)


def test_age_step_examples():
    fresh = take_sample(UserState(age=3), 20)
    assert age_step(fresh, 1, 20).age == 1

    assert age_step(UserState(age=7), 0, 3).age == 8

    stale = UserState(age=9, buffer=PacketBuffer(sample_slot=16))
    after = age_step(stale, 1, 20)
    assert after.age == 5
    assert not after.has_pending


def test_age_step_rejects_delivery_without_packet():
    with pytest.raises(InconsistentStateError):
        age_step(UserState(age=4), 1, 10)
    delivered = UserState(age=2, buffer=PacketBuffer(sample_slot=8, delivered=True))
    with pytest.raises(InconsistentStateError):
        age_step(delivered, 1, 10)


def test_cost_of_action():
    params = [UserParams(p=0.5, a_max=5, c_sample=2, c_transmit=3)]
    assert cost_of_action(Action.idle(1), params) == 0
    assert cost_of_action(Action.sample(1, 0), params) == 5
    assert cost_of_action(Action.retransmit(1, 0), params) == 3


def test_expected_delivery_examples():
    assert expected_delivery(0, 0, 0.9) == 0
    assert expected_delivery(1, 1, 0.6) == pytest.approx(0.6)
    assert expected_delivery(0, 1, 0.6) == pytest.approx(0.6)


@pytest.mark.parametrize("k", range(100))
def test_expected_delivery_reduces_to_p_mu(k):
    p = k / 99
    for s, mu in [(0, 0), (0, 1), (1, 1)]:
        assert expected_delivery(s, mu, p) == pytest.approx(p * mu)


@settings(max_examples=2000, deadline=None)
@given(
    age=st.integers(min_value=1, max_value=10_000),
    now=st.integers(min_value=0, max_value=10_000),
    lag=st.integers(min_value=0, max_value=10_000),
    has_packet=st.booleans(),
    delivered=st.integers(min_value=0, max_value=1),
)
def test_age_recursion(age, now, lag, has_packet, delivered):
    """A(t+1) = (A^p + 1) d + (A + 1)(1 - d)."""
    buffer = PacketBuffer(sample_slot=now) if has_packet else None
    state = UserState(age=age, buffer=buffer)
    if delivered and not has_packet:
        with pytest.raises(InconsistentStateError):
            age_step(state, delivered, now + lag)
        return

    after = age_step(state, delivered, now + lag)
    pa = lag if has_packet else 0
    assert after.age == (pa + 1) * delivered + (age + 1) * (1 - delivered)
    assert after.age >= 1


def test_delivery_never_when_idle():
    rng = SlotRng.for_stream(0)
    params = [UserParams(p=1.0, a_max=5), UserParams(p=1.0, a_max=5)]
    for _ in range(100):
        assert realize_delivery(Action.idle(2), params, rng).d == (0, 0)
    assert rng.draws == 0


def test_certain_success():
    rng = SlotRng.for_stream(0)
    params = [UserParams(p=1.0, a_max=5), UserParams(p=0.0, a_max=5)]
    assert realize_delivery(Action.sample(2, 0), params, rng).d == (1, 0)
    assert realize_delivery(Action.retransmit(2, 1), params, rng).d == (0, 0)


@pytest.mark.parametrize("p", [0.1, 0.6, 0.9])
def test_delivery_frequency_matches_p(p):
    n = 1_000_000
    rng = SlotRng.for_stream(2024, point=1)
    params = [UserParams(p=p, a_max=5)]
    action = Action.sample(1, 0)
    hits = sum(realize_delivery(action, params, rng).d[0] for _ in range(n))
    assert abs(hits / n - p) <= 3 * math.sqrt(p * (1 - p) / n)


@pytest.mark.slow
@settings(max_examples=100_000, deadline=None)
@given(
    age=st.integers(min_value=1, max_value=10**6),
    lag=st.integers(min_value=0, max_value=10**6),
    delivered=st.integers(min_value=0, max_value=1),
)
def test_age_recursion_at_scale(age, lag, delivered):
    now = 7
    after = age_step(UserState(age=age, buffer=PacketBuffer(sample_slot=now)), delivered, now + lag)
    assert after.age == (lag + 1) * delivered + (age + 1) * (1 - delivered)
