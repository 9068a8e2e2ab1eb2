"""
Agent decision rules.

Humans accept an offer when it, scaled by their time-of-day availability,
covers their minimum offer. Robots accept whenever they are idle.
"""

import math
from typing import Iterable, Optional, Union

from rapsim.models import CLOCK_HOURS, Demand, HumanAssistant, ProviderClass, Robot

AVAILABILITY_FLOOR = 1e-6

Agent = Union[HumanAssistant, Robot]


def clock_distance(a: float, b: float) -> float:
    """Distance between two times of day on the 24-hour circle."""
    d = abs(a - b) % CLOCK_HOURS
    return min(d, CLOCK_HOURS - d)


def availability(h: HumanAssistant, t: float) -> float:
    d = clock_distance(t, h.peak_time)
    return max(math.exp(-(d * d) / (2.0 * h.sigma * h.sigma)), AVAILABILITY_FLOOR)


def incentive_accepted(offer: float, min_offer: float, avail: float) -> bool:
    return offer * avail >= min_offer


def human_accepts(h: HumanAssistant, offer: float, t: float) -> bool:
    return incentive_accepted(offer, h.min_offer, availability(h, t))


def effective_min_offer(h: HumanAssistant, t: float) -> float:
    """Smallest offer ``h`` accepts at time ``t``."""
    return h.min_offer / availability(h, t)


def robot_accepts(r: Robot) -> bool:
    return not r.busy


def provider_class(agent: Agent) -> ProviderClass:
    return ProviderClass.HUMAN if isinstance(agent, HumanAssistant) else ProviderClass.ROBOT


def can_serve(agent: Agent, demand: Demand) -> bool:
    return demand.provider == provider_class(agent) and demand.resource in agent.resources


def accepts(agent: Agent, offer: float, t: float) -> bool:
    if isinstance(agent, HumanAssistant):
        return human_accepts(agent, offer, t)
    return robot_accepts(agent)


def first_servable(agent: Agent, demands: Iterable[Demand]) -> Optional[int]:
    """Index of the first demand in ``demands`` that ``agent`` can serve."""
    for i, demand in enumerate(demands):
        if can_serve(agent, demand):
            return i
    return None
