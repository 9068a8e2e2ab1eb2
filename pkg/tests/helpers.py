"""
Builders for small hand-made worlds.
"""

from typing import Iterable, Tuple

from rapsim.core.world import generate_store_map
from rapsim.models import (
    Customer,
    HumanAssistant,
    Position,
    RadioConfig,
    Request,
    Robot,
    Roster,
)


def pos(x: int, y: int) -> Position:
    return Position(x=x, y=y)


def open_grid(width: int, height: int):
    return generate_store_map(width, height, 0)


def customer_at(x: int, y: int, budget: float = 10, initial_offer: float = 10, increment: float = 5, **kw) -> Customer:
    return Customer(pos=pos(x, y), budget=budget, initial_offer=initial_offer, offer_increment=increment, **kw)


def human(agent_id: str, x: int, y: int, min_offer: float = 5.0, peak_time: float = 12.0, sigma: float = 2.0, **kw):
    return HumanAssistant(id=agent_id, pos=pos(x, y), min_offer=min_offer, peak_time=peak_time, sigma=sigma, **kw)


def robot(agent_id: str, x: int, y: int, busy: bool = False, **kw) -> Robot:
    return Robot(id=agent_id, pos=pos(x, y), busy=busy, **kw)


def roster(customer: Customer, humans: Iterable = (), robots: Iterable = ()) -> Roster:
    return Roster(humans=tuple(humans), robots=tuple(robots), customer=customer)


def request(c_h: int, c_r: int, issued_at: float = 12.0, request_id: int = 0) -> Request:
    return Request.of_counts(c_h, c_r, issued_at=issued_at, request_id=request_id)


def radio(r: float) -> RadioConfig:
    return RadioConfig(range=r)


def line_world() -> Tuple:
    """Customer, non-matching human and idle robot in a row, each only in range of its neighbour."""
    grid = open_grid(7, 1)
    c = customer_at(0, 0)
    a1 = human("a1", 3, 0)
    a2 = robot("a2", 6, 0)
    return grid, radio(3.0), roster(c, [a1], [a2])
