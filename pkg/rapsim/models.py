"""
Pydantic models for the RAP assistance-network simulator.
"""

import math
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

GENERIC_RESOURCE = "assist"
CLOCK_HOURS = 24.0


class ProviderClass(str, Enum):
    HUMAN = "human"
    ROBOT = "robot"


class Method(str, Enum):
    DD = "DD"
    HFI = "HFI"
    OPT = "OPT"


class Frozen(BaseModel):
    """Base for immutable, hashable records."""
    model_config = ConfigDict(frozen=True)


# --- world -----------------------------------------------------------------

class Position(Frozen):
    x: int = Field(ge=0)
    y: int = Field(ge=0)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.x, self.y)


class Grid(Frozen):
    """Occupancy map. One string per row, '.' = free, '#' = wall."""
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    rows: Tuple[str, ...]

    @model_validator(mode="after")
    def _check_shape(self) -> "Grid":
        if len(self.rows) != self.height:
            raise ValueError(f"expected {self.height} rows, got {len(self.rows)}")
        for y, row in enumerate(self.rows):
            if len(row) != self.width:
                raise ValueError(f"row {y} has width {len(row)}, expected {self.width}")
            bad = set(row) - {".", "#"}
            if bad:
                raise ValueError(f"row {y} contains invalid cells: {sorted(bad)}")
        return self

    def contains(self, pos: Position) -> bool:
        return pos.x < self.width and pos.y < self.height

    def is_free(self, pos: Position) -> bool:
        return self.contains(pos) and self.rows[pos.y][pos.x] == "."

    def free_cells(self) -> List[Position]:
        """Free cells in row-major order."""
        return [
            Position(x=x, y=y)
            for y, row in enumerate(self.rows)
            for x, cell in enumerate(row)
            if cell == "."
        ]

    def without_walls(self) -> "Grid":
        return Grid(width=self.width, height=self.height, rows=tuple("." * self.width for _ in self.rows))


class RadioConfig(Frozen):
    range: float = Field(default=5.0, ge=0)


# --- behavior ----------------------------------------------------------------

class Demand(Frozen):
    """One unit of demanded assistance."""
    resource: str = GENERIC_RESOURCE
    provider: ProviderClass


class HumanAssistant(Frozen):
    id: str
    pos: Position
    min_offer: float = Field(ge=0)
    peak_time: float = Field(ge=0, lt=CLOCK_HOURS)
    sigma: float = Field(default=2.0, gt=0)
    resources: FrozenSet[str] = frozenset({GENERIC_RESOURCE})


class Robot(Frozen):
    id: str
    pos: Position
    busy: bool = False
    resources: FrozenSet[str] = frozenset({GENERIC_RESOURCE})


class HistoryEntry(Frozen):
    agent_id: str
    success_count: int = Field(default=1, ge=1)
    last_success_round: int = 0
    # offer the agent last accepted; it is not contacted directly below this level
    accepted_offer: float = Field(default=0.0, ge=0)


class History(Frozen):
    """A customer's record of previously successful assistants."""
    customer_id: str
    entries: Tuple[HistoryEntry, ...] = ()

    @field_validator("entries")
    @classmethod
    def _no_duplicates(cls, entries: Tuple[HistoryEntry, ...]) -> Tuple[HistoryEntry, ...]:
        ids = [e.agent_id for e in entries]
        if len(ids) != len(set(ids)):
            raise ValueError("history contains duplicate agent ids")
        return entries

    def contact_order(self) -> List[HistoryEntry]:
        """Most successes first, then most recent, then agent id."""
        return sorted(self.entries, key=lambda e: (-e.success_count, -e.last_success_round, e.agent_id))

    def record_success(self, agent_ids, stamp: int, offers: Optional[Mapping[str, float]] = None) -> "History":
        """
        Insert or promote every agent in ``agent_ids``. ``offers`` maps agent ids
        to the offer they accepted; agents missing from it keep their old value.
        """
        offers = offers or {}
        by_id: Dict[str, HistoryEntry] = {e.agent_id: e for e in self.entries}
        for agent_id in sorted(agent_ids):
            old = by_id.get(agent_id)
            count = old.success_count + 1 if old else 1
            offer = offers.get(agent_id, old.accepted_offer if old else 0.0)
            by_id[agent_id] = HistoryEntry(
                agent_id=agent_id, success_count=count, last_success_round=stamp, accepted_offer=offer,
            )
        entries = tuple(by_id.values())
        return History(customer_id=self.customer_id, entries=entries)

    def __len__(self) -> int:
        return len(self.entries)


class Customer(Frozen):
    id: str = "c"
    pos: Position
    budget: float = Field(ge=0)
    initial_offer: float = Field(ge=0)
    offer_increment: float = Field(gt=0)
    history: Tuple[HistoryEntry, ...] = ()

    @model_validator(mode="after")
    def _offer_within_budget(self) -> "Customer":
        if self.initial_offer > self.budget:
            raise ValueError("initial_offer exceeds budget")
        ids = [e.agent_id for e in self.history]
        if len(ids) != len(set(ids)):
            raise ValueError("customer history contains duplicate agent ids")
        return self

    def initial_history(self) -> History:
        return History(customer_id=self.id, entries=self.history)


class Roster(Frozen):
    humans: Tuple[HumanAssistant, ...] = ()
    robots: Tuple[Robot, ...] = ()
    customer: Optional[Customer] = None

    @model_validator(mode="after")
    def _unique_ids(self) -> "Roster":
        ids = [a.id for a in self.humans] + [r.id for r in self.robots]
        if self.customer is not None:
            ids.append(self.customer.id)
        if len(ids) != len(set(ids)):
            raise ValueError("agent ids must be unique across the roster")
        return self

    def positions(self) -> Dict[str, Position]:
        """Every agent's position, customer included, keyed by id."""
        out = {h.id: h.pos for h in self.humans}
        out.update({r.id: r.pos for r in self.robots})
        if self.customer is not None:
            out[self.customer.id] = self.customer.pos
        return out

    def with_busy(self, busy_ids: FrozenSet[str]) -> "Roster":
        robots = tuple(r.model_copy(update={"busy": r.id in busy_ids}) for r in self.robots)
        return self.model_copy(update={"robots": robots})


class Request(Frozen):
    request_id: int = 0
    demands: Tuple[Demand, ...] = ()
    issued_at: float = Field(default=0.0, ge=0, lt=CLOCK_HOURS)
    # Robots occupied with other tasks while this request is open.
    busy_robots: FrozenSet[str] = frozenset()

    @property
    def c_h(self) -> int:
        return sum(1 for d in self.demands if d.provider == ProviderClass.HUMAN)

    @property
    def c_r(self) -> int:
        return sum(1 for d in self.demands if d.provider == ProviderClass.ROBOT)

    @classmethod
    def of_counts(cls, c_h: int, c_r: int, **kwargs) -> "Request":
        demands = tuple(
            [Demand(provider=ProviderClass.HUMAN)] * c_h + [Demand(provider=ProviderClass.ROBOT)] * c_r
        )
        return cls(demands=demands, **kwargs)


# --- protocol ------------------------------------------------------------------

class InterestMessage(Frozen):
    message_id: str
    origin: str
    remaining_demands: Tuple[Demand, ...]
    offer: float = Field(ge=0)
    hop_count: int = Field(default=0, ge=0)


class Assignment(Frozen):
    agent_id: str
    demand: Demand
    offer: float = 0.0


class ProtocolOutcome(Frozen):
    method: Method
    fulfilled: bool
    assignments: Tuple[Assignment, ...] = ()
    final_offer: float = 0.0
    messages: int = Field(default=0, ge=0)
    movement_cost: int = Field(default=0, ge=0)
    reward_paid: float = Field(default=0.0, ge=0)
    escalation_rounds: int = Field(default=0, ge=0)

    @property
    def selected(self) -> FrozenSet[str]:
        return frozenset(a.agent_id for a in self.assignments)

    @property
    def selected_humans(self) -> Tuple[str, ...]:
        return tuple(sorted(a.agent_id for a in self.assignments if a.demand.provider == ProviderClass.HUMAN))

    @property
    def selected_robots(self) -> Tuple[str, ...]:
        return tuple(sorted(a.agent_id for a in self.assignments if a.demand.provider == ProviderClass.ROBOT))


class CostWeights(Frozen):
    alpha: float = Field(default=1.0, ge=0)
    beta: float = Field(default=1.0, ge=0)


# --- allocator -------------------------------------------------------------------

class OfferSchedule(Frozen):
    levels: Tuple[float, ...]

    @classmethod
    def for_customer(cls, customer: Customer) -> "OfferSchedule":
        steps = int(math.floor((customer.budget - customer.initial_offer) / customer.offer_increment + 1e-9))
        levels = tuple(customer.initial_offer + k * customer.offer_increment for k in range(steps + 1))
        return cls(levels=tuple(level for level in levels if level <= customer.budget + 1e-9))


class Allocation(Frozen):
    selected_humans: Tuple[str, ...] = ()
    selected_robots: Tuple[str, ...] = ()
    offer_level: float = 0.0
    cost: float = Field(default=0.0, ge=0)
    movement: int = 0

    def sort_key(self):
        return (self.cost, self.offer_level, self.selected_humans, self.selected_robots)


# --- experiment ------------------------------------------------------------------

class ScenarioParams(BaseModel):
    """Everything needed to generate one scenario. Defaults form the default parameter point."""
    map_file: Optional[str] = None
    map_width: int = Field(default=24, ge=1)
    map_height: int = Field(default=16, ge=1)
    aisle_spacing: int = Field(default=4, ge=0)
    num_humans: int = Field(default=15, ge=0)
    num_robots: int = Field(default=10, ge=0)
    radio_range: float = Field(default=10.0, ge=0)
    budget: float = Field(default=400.0, ge=0)
    initial_offer: float = Field(default=150.0, ge=0)
    offer_increment: float = Field(default=25.0, gt=0)
    min_offer_lo: float = Field(default=15.0, ge=0)
    min_offer_hi: float = Field(default=45.0, ge=0)
    sigma: float = Field(default=2.0, gt=0)
    busy_probability: float = Field(default=0.2, ge=0, le=1)
    requests_per_scenario: int = Field(default=5, ge=1)
    humans_per_request: int = Field(default=2, ge=0)
    robots_per_request: int = Field(default=1, ge=0)
    start_time: float = Field(default=9.0, ge=0, lt=CLOCK_HOURS)
    time_step: float = Field(default=0.25, ge=0)
    alpha: float = Field(default=1.0, ge=0)
    beta: float = Field(default=1.0, ge=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "ScenarioParams":
        if self.min_offer_lo > self.min_offer_hi:
            raise ValueError("min_offer_lo must not exceed min_offer_hi")
        if self.initial_offer > self.budget:
            raise ValueError("initial_offer must not exceed budget")
        return self

    @property
    def weights(self) -> CostWeights:
        return CostWeights(alpha=self.alpha, beta=self.beta)

    @property
    def radio(self) -> RadioConfig:
        return RadioConfig(range=self.radio_range)


class Scenario(Frozen):
    params: ScenarioParams
    grid: Grid
    radio: RadioConfig
    roster: Roster
    requests: Tuple[Request, ...]
    weights: CostWeights = CostWeights()

    def roster_for(self, request: Request) -> Roster:
        return self.roster.with_busy(request.busy_robots)


class RequestRow(BaseModel):
    """Cost of one method on one request."""
    request_id: int
    method: Method
    fulfilled: bool
    messages: int = 0
    movement: int = 0
    reward: float = 0.0
    total: float = 0.0
    escalation_rounds: int = 0
    offer: float = 0.0


class MethodTotals(BaseModel):
    method: Method
    requests: int = 0
    fulfilled: int = 0
    messages: int = 0
    movement: int = 0
    reward: float = 0.0
    total: float = 0.0
    escalation_rounds: int = 0

    @property
    def fulfilment_rate(self) -> float:
        return self.fulfilled / self.requests if self.requests else 0.0

    @property
    def mean_escalation_rounds(self) -> float:
        return self.escalation_rounds / self.requests if self.requests else 0.0


class ScenarioResult(BaseModel):
    seed: int
    rows: List[RequestRow] = []
    totals: Dict[Method, MethodTotals] = {}
    bound_violations: int = 0


class TTestResult(BaseModel):
    t: float
    df: int = Field(ge=1)
    p_two_tailed: float = Field(ge=0, le=1)
    mean_diff: float


class SweepRow(BaseModel):
    """One line of the sweep CSV."""
    param_point: str
    scenario_index: int
    seed: int
    method: Method
    requests: int
    fulfilled: int
    messages: int
    movement: int
    reward: float
    total: float


class SummaryRow(BaseModel):
    param_point: str
    method: Method
    mean_total: float
    sd_total: float
    t_vs_dd: Optional[float] = None
    p_vs_dd: Optional[float] = None
    t_vs_opt: Optional[float] = None
    p_vs_opt: Optional[float] = None


class SweepReport(BaseModel):
    rows: List[SweepRow] = []
    summary: List[SummaryRow] = []


# --- API payloads ------------------------------------------------------------------

class SweepRequest(BaseModel):
    """Body of the sweep endpoint."""
    params: ScenarioParams = ScenarioParams()
    repetitions: int = Field(default=20, ge=1)
    grid: Dict[str, List[float]] = {}


class MapRequest(BaseModel):
    width: int = Field(default=24, ge=1)
    height: int = Field(default=16, ge=1)
    aisle_spacing: int = Field(default=4, ge=0)


class MapResponse(BaseModel):
    width: int
    height: int
    text: str
    free_cells: int
