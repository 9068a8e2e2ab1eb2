"""
Centralized optimal allocation.

The objective is a sum of independent per-agent terms, so for a fixed offer
level picking the cheapest eligible agents of each class is exact. The
brute-force allocator enumerates every (level, subset) pair and serves as the
oracle for the exact one.
"""

import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from rapsim.core.behavior import Agent, can_serve, human_accepts, robot_accepts
from rapsim.core.errors import ConfigurationError, InfeasibleSelectionError, OracleLimitError
from rapsim.core.world import movement_distances_from
from rapsim.models import (
    Allocation,
    CostWeights,
    Demand,
    Grid,
    OfferSchedule,
    ProviderClass,
    Request,
    Roster,
)

logger = logging.getLogger(__name__)

ORACLE_MAX_AGENTS = 20


def _customer(roster: Roster):
    if roster.customer is None:
        raise ConfigurationError("roster has no customer")
    return roster.customer


def _paths(grid: Grid, roster: Roster) -> Dict[str, Optional[int]]:
    """Movement distance from every human and robot to the customer."""
    dist = movement_distances_from(grid, _customer(roster).pos)
    agents = list(roster.humans) + list(roster.robots)
    return {a.id: dist.get(a.pos.as_tuple()) for a in agents}


def _objective(path_lengths: Dict[str, int], humans: Sequence[str], robots: Sequence[str],
               offer_level: float, weights: CostWeights) -> float:
    # summed in id order so equal selections always give bit-identical costs
    cost = 0.0
    for agent_id in sorted(list(humans) + list(robots)):
        cost += weights.beta * path_lengths[agent_id]
    return cost + offer_level * len(humans)


def allocation_cost(
    selection: Tuple[Sequence[str], Sequence[str]],
    offer_level: float,
    grid: Grid,
    roster: Roster,
    weights: CostWeights,
) -> float:
    """Objective value of the ``(humans, robots)`` selection at ``offer_level``."""
    humans, robots = selection
    paths = _paths(grid, roster)
    for agent_id in list(humans) + list(robots):
        if paths.get(agent_id) is None:
            raise InfeasibleSelectionError(f"agent {agent_id} cannot reach the customer")
    return _objective(paths, humans, robots, offer_level, weights)


def matching_size(agents: Sequence[Agent], demands: Sequence[Demand]) -> int:
    """Size of a maximum matching between ``agents`` and the demands they can serve."""
    if not agents or not demands:
        return 0
    if len({(d.resource, d.provider) for d in demands}) == 1:
        return min(len(demands), sum(1 for a in agents if can_serve(a, demands[0])))

    graph = nx.Graph()
    top = [("agent", i) for i in range(len(agents))]
    graph.add_nodes_from(top)
    graph.add_nodes_from(("demand", j) for j in range(len(demands)))
    for i, agent in enumerate(agents):
        for j, demand in enumerate(demands):
            if can_serve(agent, demand):
                graph.add_edge(("agent", i), ("demand", j))
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
    return len(matching) // 2


def covers(agents: Sequence[Agent], demands: Sequence[Demand]) -> bool:
    """True if ``agents`` can be matched one-to-one onto ``demands``."""
    return len(agents) == len(demands) and matching_size(agents, demands) == len(demands)


def coverable(agents: Sequence[Agent], demands: Sequence[Demand]) -> bool:
    """True if some subset of ``agents`` can take every demand."""
    return matching_size(agents, demands) == len(demands)


class _Instance:
    """Eligibility and costs of one request, shared by both allocators."""

    def __init__(self, grid: Grid, roster: Roster, request: Request, weights: CostWeights):
        self.customer = _customer(roster)
        self.request = request
        self.weights = weights
        self.paths = _paths(grid, roster)
        self.levels = OfferSchedule.for_customer(self.customer).levels
        if not self.levels:
            raise ConfigurationError("offer schedule is empty")
        self.human_demands = [d for d in request.demands if d.provider == ProviderClass.HUMAN]
        self.robot_demands = [d for d in request.demands if d.provider == ProviderClass.ROBOT]

    def reachable(self, agent: Agent) -> bool:
        return self.paths[agent.id] is not None

    def idle_robots(self, roster: Roster) -> List[Agent]:
        return [r for r in roster.robots if robot_accepts(r) and self.reachable(r)]

    def willing_humans(self, roster: Roster, level: float) -> List[Agent]:
        return [
            h for h in roster.humans
            if self.reachable(h) and human_accepts(h, level, self.request.issued_at)
        ]

    def path_cost(self, agent: Agent) -> float:
        return self.weights.beta * self.paths[agent.id]

    def allocation(self, humans: Sequence[Agent], robots: Sequence[Agent], level: float) -> Allocation:
        human_ids = tuple(sorted(h.id for h in humans))
        robot_ids = tuple(sorted(r.id for r in robots))
        return Allocation(
            selected_humans=human_ids,
            selected_robots=robot_ids,
            offer_level=level,
            cost=_objective(self.paths, human_ids, robot_ids, level, self.weights),
            movement=sum(self.paths[i] for i in human_ids + robot_ids),
        )

    def cheapest(self, pool: List[Agent], demands: List[Demand]) -> Optional[List[Agent]]:
        """Cheapest subset of ``pool`` covering ``demands``; ties go to the smallest ids."""
        pool = [a for a in pool if any(can_serve(a, d) for d in demands)]
        if len(pool) < len(demands):
            return None
        ranked = sorted(pool, key=lambda a: (self.path_cost(a), a.id))
        if len({(d.resource, d.provider) for d in demands}) <= 1:
            return ranked[:len(demands)]

        best = None
        for subset in itertools.combinations(ranked, len(demands)):
            if not covers(subset, demands):
                continue
            key = (sum(self.path_cost(a) for a in subset), tuple(sorted(a.id for a in subset)))
            if best is None or key < best[0]:
                best = (key, list(subset))
        return best[1] if best else None


def optimal_allocation(grid: Grid, roster: Roster, request: Request, weights: CostWeights) -> Optional[Allocation]:
    """Minimum-cost allocation over every offer level, or None when infeasible."""
    inst = _Instance(grid, roster, request, weights)
    robots = inst.cheapest(inst.idle_robots(roster), inst.robot_demands)
    if robots is None:
        logger.debug("Request %d: not enough idle reachable robots", request.request_id)
        return None

    best: Optional[Allocation] = None
    for level in inst.levels:
        humans = inst.cheapest(inst.willing_humans(roster, level), inst.human_demands)
        if humans is None:
            continue
        candidate = inst.allocation(humans, robots, level)
        if best is None or candidate.sort_key() < best.sort_key():
            best = candidate
    if best is None:
        logger.debug("Request %d: infeasible at every offer level", request.request_id)
    return best


def brute_force_allocation(grid: Grid, roster: Roster, request: Request, weights: CostWeights) -> Optional[Allocation]:
    """Exhaustive reference for :func:`optimal_allocation` on small rosters."""
    if len(roster.humans) + len(roster.robots) > ORACLE_MAX_AGENTS:
        raise OracleLimitError(f"brute force is limited to {ORACLE_MAX_AGENTS} agents")
    inst = _Instance(grid, roster, request, weights)

    best: Optional[Allocation] = None
    for level in inst.levels:
        for humans in itertools.combinations(roster.humans, len(inst.human_demands)):
            if not all(inst.reachable(h) and human_accepts(h, level, request.issued_at) for h in humans):
                continue
            if not covers(humans, inst.human_demands):
                continue
            for robots in itertools.combinations(roster.robots, len(inst.robot_demands)):
                if not all(robot_accepts(r) and inst.reachable(r) for r in robots):
                    continue
                if not covers(robots, inst.robot_demands):
                    continue
                candidate = inst.allocation(humans, robots, level)
                if best is None or candidate.sort_key() < best.sort_key():
                    best = candidate
    return best
