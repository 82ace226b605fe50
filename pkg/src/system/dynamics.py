"""
System dynamics: action feasibility, packet and receiver age, slot cost.

Slot order used throughout the simulator:
observe state -> choose action -> sample (if s=1) -> transmit ->
realize delivery -> update age -> update virtual queues -> metrics.
"""

from src.models.action import Action
from src.models.errors import InconsistentStateError
from src.models.params import UserParams
from src.models.state import PacketBuffer, UserState


def validate_action(action: Action, states: list[UserState]) -> bool:
    """
    Check an action against the interference and buffer rules.

    - at most one transmitting user
    - sampling implies transmitting
    - a retransmission needs a pending (undelivered) packet
    """
    if len(action.s) != len(states) or len(action.mu) != len(states):
        return False

    transmitters = 0
    for s_i, mu_i, state in zip(action.s, action.mu, states):
        if s_i not in (0, 1) or mu_i not in (0, 1):
            return False
        if s_i > mu_i:
            return False
        if mu_i and not s_i and not state.has_pending:
            return False
        transmitters += mu_i

    return transmitters <= 1


def packet_age(state: UserState, now: int) -> int:
    """Slots since the buffered packet was sampled (0 in its sampling slot)."""
    if state.buffer is None:
        raise InconsistentStateError("packet_age queried on an empty buffer")
    age = now - state.buffer.sample_slot
    if age < 0:
        raise InconsistentStateError(
            f"packet sampled at slot {state.buffer.sample_slot} is in the future of slot {now}"
        )
    return age


def take_sample(state: UserState, now: int) -> UserState:
    """Sample a fresh packet at the start of `now`, overwriting any stale one."""
    return UserState(age=state.age, buffer=PacketBuffer(sample_slot=now))


def age_step(state: UserState, delivered: int, now: int) -> UserState:
    """
    Advance the receiver age of one user by one slot.

    On delivery the age becomes packet_age + 1 and the packet is marked
    delivered; otherwise the age grows by one and the buffer is untouched.
    """
    if not delivered:
        return UserState(age=state.age + 1, buffer=state.buffer)

    if state.buffer is None:
        raise InconsistentStateError("delivery reported for a user with an empty buffer")
    if state.buffer.delivered:
        raise InconsistentStateError("delivery reported for an already delivered packet")

    new_age = packet_age(state, now) + 1
    return UserState(
        age=new_age,
        buffer=PacketBuffer(sample_slot=state.buffer.sample_slot, delivered=True),
    )


def cost_of_action(action: Action, params: list[UserParams]) -> float:
    """Slot cost: c_transmit per transmission plus c_sample per sample."""
    total = 0.0
    for s_i, mu_i, user in zip(action.s, action.mu, params):
        total += mu_i * user.c_transmit + s_i * user.c_sample
    return total


def expected_delivery(s: int, mu: int, p: float) -> float:
    """Conditional delivery probability p*mu + p*s - p*s*mu (= p*mu when s <= mu)."""
    return p * mu + p * s - p * s * mu
