import time

import numpy as np
import pytest

from helpers import customer_at, human, open_grid, pos, request, robot, roster
from rapsim.core.allocator import allocation_cost, brute_force_allocation, optimal_allocation
from rapsim.core.behavior import human_accepts, robot_accepts
from rapsim.core.errors import InfeasibleSelectionError, OracleLimitError
from rapsim.core.experiment import generate_scenario
from rapsim.core.protocol import run_directed_diffusion, run_hfi
from rapsim.core.world import movement_distance, parse_map
from rapsim.models import (
    CostWeights,
    Demand,
    Grid,
    History,
    HumanAssistant,
    OfferSchedule,
    ProviderClass,
    Request,
    Robot,
)


def random_instance(rng):
    """Small random world: up to 10 agents, up to 5 offer levels, some walls."""
    width, height = 6, 5
    rows = ["".join("#" if rng.random() < 0.15 else "." for _ in range(width)) for _ in range(height)]
    rows[0] = "." + rows[0][1:]
    grid = Grid(width=width, height=height, rows=tuple(rows))
    free = [p for p in grid.free_cells() if p != pos(0, 0)]

    n_humans = int(rng.integers(0, 6))
    n_robots = int(rng.integers(0, 11 - n_humans))
    n_humans, n_robots = min(n_humans, len(free)), min(n_robots, max(0, len(free) - n_humans))
    cells = [free[i] for i in rng.choice(len(free), size=n_humans + n_robots, replace=False)]

    t = float(rng.uniform(0, 24))
    humans = [
        HumanAssistant(
            id=f"h{i}", pos=cells[i],
            min_offer=float(rng.integers(1, 12)),
            peak_time=float(rng.uniform(0, 24)),
            sigma=float(rng.uniform(1, 6)),
        )
        for i in range(n_humans)
    ]
    robots = [Robot(id=f"r{i}", pos=cells[n_humans + i], busy=bool(rng.random() < 0.3)) for i in range(n_robots)]

    initial = float(rng.integers(1, 10))
    increment = float(rng.integers(1, 5))
    levels = int(rng.integers(1, 6))
    customer = customer_at(0, 0, budget=initial + increment * (levels - 1), initial_offer=initial, increment=increment)

    req = Request.of_counts(int(rng.integers(0, 3)), int(rng.integers(0, 3)), issued_at=t)
    weights = CostWeights(beta=float(rng.choice([0.0, 1.0, 2.5])))
    return grid, roster(customer, humans, robots), req, weights


class TestAllocationCost:
    def test_empty(self, weights):
        r = roster(customer_at(0, 0))
        assert allocation_cost(((), ()), 5, open_grid(3, 3), r, weights) == 0

    def test_single_robot(self, weights):
        r = roster(customer_at(0, 0), robots=[robot("r", 3, 0)])
        assert allocation_cost(((), ("r",)), 5, open_grid(4, 1), r, weights) == 3

    def test_single_human(self, weights):
        r = roster(customer_at(0, 0), humans=[human("h", 2, 0)])
        assert allocation_cost((("h",), ()), 5, open_grid(4, 1), r, weights) == 7

    def test_unreachable_agent(self, weights):
        grid = parse_map(".#.\n")
        r = roster(customer_at(0, 0), robots=[robot("r", 2, 0)])
        with pytest.raises(InfeasibleSelectionError):
            allocation_cost(((), ("r",)), 5, grid, r, weights)


class TestOptimalAllocation:
    def test_empty_request(self, weights):
        c = customer_at(0, 0, budget=20, initial_offer=5, increment=5)
        alloc = optimal_allocation(open_grid(3, 3), roster(c), request(0, 0), weights)
        assert alloc.cost == 0
        assert alloc.offer_level == 5
        assert alloc.selected_humans == () and alloc.selected_robots == ()

    def test_cheapest_robots(self, weights):
        r = roster(customer_at(0, 0), robots=[robot("r7", 7, 0), robot("r2", 2, 0), robot("r5", 5, 0)])
        alloc = optimal_allocation(open_grid(8, 1), r, request(0, 2), weights)
        assert alloc.cost == 7
        assert alloc.selected_robots == ("r2", "r5")

    def test_offer_level_search(self, weights):
        c = customer_at(1, 0, budget=10, initial_offer=5, increment=5)
        humans = [human("ha", 0, 0, min_offer=4, peak_time=12.0), human("hb", 2, 0, min_offer=8, peak_time=12.0)]
        alloc = optimal_allocation(open_grid(3, 1), roster(c, humans), request(2, 0, issued_at=12.0), weights)
        assert alloc.offer_level == 10
        assert alloc.cost == 22
        assert alloc.selected_humans == ("ha", "hb")

    def test_infeasible(self, weights):
        c = customer_at(0, 0, budget=10, initial_offer=5, increment=5)
        r = roster(c, humans=[human("h", 1, 0, min_offer=50)], robots=[robot("r", 2, 0, busy=True)])
        grid = open_grid(3, 1)
        assert optimal_allocation(grid, r, request(1, 0), weights) is None
        assert optimal_allocation(grid, r, request(0, 1), weights) is None

    def test_busy_and_unreachable_robots_excluded(self, weights):
        grid = parse_map("..#.\n....\n")
        r = roster(customer_at(0, 0), robots=[robot("busy", 1, 0, busy=True), robot("far", 3, 0), robot("ok", 0, 1)])
        alloc = optimal_allocation(grid, r, request(0, 2), weights)
        assert alloc.selected_robots == ("far", "ok")
        assert optimal_allocation(grid, r, request(0, 3), weights) is None

    def test_mixed_resource_types(self, weights):
        grid = open_grid(6, 1)
        robots = [
            robot("r1", 1, 0, resources=frozenset({"assist"})),
            robot("r2", 2, 0, resources=frozenset({"assist"})),
            robot("r5", 5, 0, resources=frozenset({"carry", "assist"})),
        ]
        req = Request(demands=(
            Demand(provider=ProviderClass.ROBOT, resource="assist"),
            Demand(provider=ProviderClass.ROBOT, resource="carry"),
        ))
        r = roster(customer_at(0, 0), robots=robots)
        alloc = optimal_allocation(grid, r, req, weights)
        assert alloc.selected_robots == ("r1", "r5")
        assert alloc == brute_force_allocation(grid, r, req, weights)


class TestBruteForceOracle:
    def test_empty_request(self, weights):
        alloc = brute_force_allocation(open_grid(3, 3), roster(customer_at(0, 0)), request(0, 0), weights)
        assert alloc.cost == 0

    def test_refuses_large_rosters(self, weights):
        robots = [robot(f"r{i}", i % 7, i // 7) for i in range(1, 22)]
        with pytest.raises(OracleLimitError):
            brute_force_allocation(open_grid(7, 4), roster(customer_at(0, 0), robots=robots), request(0, 1), weights)

    def test_agrees_with_optimal_on_random_instances(self):
        rng = np.random.default_rng(2024)
        start = time.perf_counter()
        for _ in range(200):
            grid, r, req, w = random_instance(rng)
            assert optimal_allocation(grid, r, req, w) == brute_force_allocation(grid, r, req, w)
        assert time.perf_counter() - start < 10


class TestAllocatorProperties:
    def test_larger_budget_never_costs_more(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            grid, r, req, w = random_instance(rng)
            c = r.customer
            bigger = r.model_copy(update={"customer": c.model_copy(update={"budget": c.budget + 3 * c.offer_increment})})
            small, large = optimal_allocation(grid, r, req, w), optimal_allocation(grid, bigger, req, w)
            if small is not None:
                assert large is not None and large.cost <= small.cost

    def test_infeasible_iff_too_few_at_max_level(self):
        rng = np.random.default_rng(5)
        for _ in range(150):
            grid, r, req, w = random_instance(rng)
            c = r.customer
            top = OfferSchedule.for_customer(c).levels[-1]

            def reachable(agent):
                return movement_distance(grid, agent.pos, c.pos) is not None

            humans = sum(1 for h in r.humans if reachable(h) and human_accepts(h, top, req.issued_at))
            robots = sum(1 for rb in r.robots if reachable(rb) and robot_accepts(rb))
            infeasible = optimal_allocation(grid, r, req, w) is None
            assert infeasible == (humans < req.c_h or robots < req.c_r)

    def test_selection_respects_constraints(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            grid, r, req, w = random_instance(rng)
            alloc = optimal_allocation(grid, r, req, w)
            if alloc is None:
                continue
            assert len(alloc.selected_humans) == req.c_h
            assert len(alloc.selected_robots) == req.c_r
            humans = {h.id: h for h in r.humans}
            robots = {rb.id: rb for rb in r.robots}
            assert all(human_accepts(humans[i], alloc.offer_level, req.issued_at) for i in alloc.selected_humans)
            assert all(not robots[i].busy for i in alloc.selected_robots)
            assert alloc.cost == pytest.approx(
                allocation_cost((alloc.selected_humans, alloc.selected_robots), alloc.offer_level, grid, r, w)
            )

    def test_lower_bound_on_protocol_outcomes(self, small_params, weights):
        for seed in range(40):
            scenario = generate_scenario(small_params.model_copy(update={"seed": seed}))
            history = History(customer_id="c")
            for req in scenario.requests:
                ros = scenario.roster_for(req)
                dd = run_directed_diffusion(scenario.grid, scenario.radio, ros, req, weights)
                hfi, history = run_hfi(scenario.grid, scenario.radio, ros, req, history, weights)
                opt = optimal_allocation(scenario.grid, ros, req, weights)
                for outcome in (dd, hfi):
                    if outcome.fulfilled:
                        assert opt is not None
                        assert opt.cost <= weights.beta * outcome.movement_cost + outcome.reward_paid + 1e-9
