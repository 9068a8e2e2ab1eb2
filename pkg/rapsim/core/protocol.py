"""
Decentralized request fulfilment: Directed Diffusion flooding and
History-based Financial Incentive (HFI) routing.

Message accounting: one broadcast by one node costs 1 whatever the number of
receivers; a unicast over h hops costs h.
"""

import logging
from typing import Dict, List, Optional, Set, Tuple

from rapsim.core.allocator import coverable
from rapsim.core.behavior import Agent, accepts, first_servable
from rapsim.core.errors import ConfigurationError, PreconditionError
from rapsim.core.trace import BROADCAST, MessageTrace
from rapsim.core.world import comm_graph, flood_tree, movement_distances_from, path_to
from rapsim.models import (
    Assignment,
    CostWeights,
    Demand,
    Grid,
    History,
    InterestMessage,
    Method,
    OfferSchedule,
    ProtocolOutcome,
    ProviderClass,
    RadioConfig,
    Request,
    Roster,
)

logger = logging.getLogger(__name__)


class ProtocolRunner:
    """Runs one request through the escalation loop and keeps the cost ledger."""

    def __init__(
        self,
        grid: Grid,
        radio: RadioConfig,
        roster: Roster,
        request: Request,
        weights: CostWeights,
        trace: Optional[MessageTrace] = None,
    ):
        if roster.customer is None:
            raise ConfigurationError("roster has no customer")
        self.grid = grid
        self.request = request
        self.weights = weights
        self.trace = trace
        self.customer = roster.customer

        for agent_id, pos in roster.positions().items():
            if not grid.is_free(pos):
                raise PreconditionError(f"agent {agent_id} is not on a free cell")

        self.agents: Dict[str, Agent] = {h.id: h for h in roster.humans}
        self.agents.update({r.id: r for r in roster.robots})

        self.graph = comm_graph(radio, roster.positions())
        self.hops, self.parents = flood_tree(self.graph, self.customer.id)
        self.paths = movement_distances_from(grid, self.customer.pos)
        self.schedule = OfferSchedule.for_customer(self.customer).levels

        self.remaining: List[Demand] = list(request.demands)
        self.assignments: List[Assignment] = []
        self.messages = 0
        self.rounds = 0
        self.contacted: Set[str] = set()
        self.offer = self.schedule[0] if self.schedule else self.customer.initial_offer

    # --- helpers -----------------------------------------------------------------

    def movement_of(self, agent_id: str) -> Optional[int]:
        return self.paths.get(self.agents[agent_id].pos.as_tuple())

    def is_selected(self, agent_id: str) -> bool:
        return any(a.agent_id == agent_id for a in self.assignments)

    def _transmit(self, rnd: int, path: List[str], kind: str, message_id: str):
        for i in range(len(path) - 1):
            if self.trace is not None:
                self.trace.record(rnd, path[i], path[i + 1], kind, message_id, i + 1)
        self.messages += len(path) - 1

    def _assign(self, agent_id: str, idx: int):
        demand = self.remaining.pop(idx)
        self.assignments.append(Assignment(agent_id=agent_id, demand=demand, offer=self.offer))

    def _message(self, rnd: int) -> InterestMessage:
        return InterestMessage(
            message_id=f"{self.request.request_id}:{rnd}",
            origin=self.customer.id,
            remaining_demands=tuple(self.remaining),
            offer=self.offer,
        )

    # --- phases ------------------------------------------------------------------

    def history_candidates(self, history: History) -> List[Agent]:
        """History agents worth a direct interest at the current offer, in contact order."""
        candidates = []
        for entry in history.contact_order():
            agent = self.agents.get(entry.agent_id)
            if agent is None or agent.id in self.contacted or self.is_selected(agent.id):
                continue
            if entry.accepted_offer > self.offer + 1e-9:
                continue
            if first_servable(agent, self.remaining) is None:
                continue
            if agent.id not in self.hops:
                logger.debug("History agent %s unreachable by radio, skipping", agent.id)
                continue
            candidates.append(agent)
        return candidates

    def contact_history(self, rnd: int, history: History):
        """
        Unicast the interest to previously successful assistants. Each agent is
        asked at most once per request, no lower than the offer it last accepted,
        and only while the candidates could close the request in no more hops than
        a flood round transmits.
        """
        candidates = self.history_candidates(history)
        if not candidates or not coverable(candidates, self.remaining):
            return
        if sum(self.hops[a.id] for a in candidates) > len(self.hops):
            logger.debug("Request %d: flooding is cheaper than %d unicasts", self.request.request_id, len(candidates))
            return

        for agent in candidates:
            if not self.remaining:
                return
            if first_servable(agent, self.remaining) is None:
                continue
            self.contacted.add(agent.id)
            message_id = f"{self.request.request_id}:{rnd}:{agent.id}"
            path = path_to(self.parents, self.customer.id, agent.id)
            self._transmit(rnd, path, "interest", message_id)
            if accepts(agent, self.offer, self.request.issued_at) and self.movement_of(agent.id) is not None:
                self._transmit(rnd, path[::-1], "reply", message_id)
                self._assign(agent.id, first_servable(agent, self.remaining))
                self._transmit(rnd, path, "confirm", message_id)
                logger.debug("History agent %s accepted offer %.2f", agent.id, self.offer)
            else:
                self._transmit(rnd, path[::-1], "decline", message_id)

    def flood(self, rnd: int):
        """Flood the interest, collect replies on reverse paths, confirm the closest."""
        message = self._message(rnd)
        component = sorted(self.hops, key=lambda node: (self.hops[node], node))

        # every node in the customer's component transmits the message exactly once
        for node in component:
            if self.trace is not None:
                self.trace.record(rnd, node, BROADCAST, "interest", message.message_id, self.hops[node])
            self.messages += 1

        candidates = []
        for node in component:
            agent = self.agents.get(node)
            if agent is None or self.is_selected(node):
                continue
            if not accepts(agent, message.offer, self.request.issued_at):
                continue
            if first_servable(agent, message.remaining_demands) is None:
                continue
            path = path_to(self.parents, self.customer.id, node)
            self._transmit(rnd, path[::-1], "reply", message.message_id)
            candidates.append(node)

        for node in sorted(candidates, key=lambda n: (self.hops[n], n)):
            if not self.remaining:
                break
            idx = first_servable(self.agents[node], self.remaining)
            if idx is None:
                continue
            if self.movement_of(node) is None:
                logger.debug("Agent %s has no movement path to the customer, skipping", node)
                continue
            self._assign(node, idx)
            self._transmit(rnd, path_to(self.parents, self.customer.id, node), "confirm", message.message_id)

    # --- loop ----------------------------------------------------------------------

    def run(self, method: Method, history: Optional[History] = None) -> ProtocolOutcome:
        if self.remaining:
            for rnd, offer in enumerate(self.schedule):
                self.offer = offer
                self.rounds += 1
                if history is not None and len(history):
                    self.contact_history(rnd, history)
                if self.remaining:
                    self.flood(rnd)
                if not self.remaining:
                    break
                logger.debug(
                    "Request %d: %d demands open after offer %.2f",
                    self.request.request_id, len(self.remaining), offer,
                )
        return self.outcome(method)

    def outcome(self, method: Method) -> ProtocolOutcome:
        humans = sum(1 for a in self.assignments if a.demand.provider == ProviderClass.HUMAN)
        return ProtocolOutcome(
            method=method,
            fulfilled=not self.remaining,
            assignments=tuple(self.assignments),
            final_offer=self.offer,
            messages=self.messages,
            movement_cost=sum(self.movement_of(a.agent_id) for a in self.assignments),
            reward_paid=self.offer * humans,
            escalation_rounds=self.rounds,
        )


def run_directed_diffusion(
    grid: Grid,
    radio: RadioConfig,
    roster: Roster,
    request: Request,
    weights: CostWeights,
    trace: Optional[MessageTrace] = None,
) -> ProtocolOutcome:
    """Fulfil ``request`` by flooding interests and escalating the offer until met or out of budget."""
    return ProtocolRunner(grid, radio, roster, request, weights, trace).run(Method.DD)


def run_hfi(
    grid: Grid,
    radio: RadioConfig,
    roster: Roster,
    request: Request,
    history: History,
    weights: CostWeights,
    trace: Optional[MessageTrace] = None,
) -> Tuple[ProtocolOutcome, History]:
    """
    Fulfil ``request`` by unicasting to agents in ``history`` once the offer
    reaches what they accepted before, flooding for whatever is left. A
    fulfilled request promotes every selected agent in the returned history and
    records the offer of the round in which it was assigned.
    """
    outcome = ProtocolRunner(grid, radio, roster, request, weights, trace).run(Method.HFI, history)
    if outcome.fulfilled and outcome.assignments:
        offers = {a.agent_id: a.offer for a in outcome.assignments}
        history = history.record_success(outcome.selected, stamp=request.request_id, offers=offers)
    return outcome, history


def total_cost(outcome: ProtocolOutcome, weights: CostWeights) -> float:
    return weights.alpha * outcome.messages + weights.beta * outcome.movement_cost + outcome.reward_paid
