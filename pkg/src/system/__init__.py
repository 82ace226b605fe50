"""System model: dynamics, channel and random streams."""

from src.system.channel import realize_delivery
from src.system.dynamics import (
    age_step,
    cost_of_action,
    expected_delivery,
    packet_age,
    take_sample,
    validate_action,
)
from src.system.rng import SlotRng, stream_seed

__all__ = [
    "SlotRng",
    "age_step",
    "cost_of_action",
    "expected_delivery",
    "packet_age",
    "realize_delivery",
    "stream_seed",
    "take_sample",
    "validate_action",
]
