"""
Unreliable channel: i.i.d. Bernoulli delivery with instantaneous ACK.
"""

from src.models.action import Action, ChannelOutcome
from src.models.params import UserParams
from src.system.rng import SlotRng


def realize_delivery(action: Action, params: list[UserParams], rng: SlotRng) -> ChannelOutcome:
    """
    Draw the delivery indicators for one slot.

    Only the transmitting user can succeed, with probability p; a uniform
    is consumed only when someone transmits.
    """
    user = action.active_user
    n = len(action.mu)
    if user is None:
        return ChannelOutcome.none(n)

    success = rng.bernoulli(params[user].p)
    return ChannelOutcome(d=tuple(success if i == user else 0 for i in range(n)))
