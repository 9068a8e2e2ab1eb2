"""
Scenario generation, multi-request runs, sweeps and CSV output.

Every result is a pure function of the ScenarioParams and the seed.
"""

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from rapsim.core.allocator import optimal_allocation
from rapsim.core.config import build_params
from rapsim.core.errors import GenerationError
from rapsim.core.protocol import run_directed_diffusion, run_hfi, total_cost
from rapsim.core.stats import mean_and_sd, paired_t_test
from rapsim.core.trace import MessageTrace
from rapsim.core.world import generate_store_map, load_map
from rapsim.models import (
    CLOCK_HOURS,
    Customer,
    HumanAssistant,
    Method,
    MethodTotals,
    ProtocolOutcome,
    Request,
    RequestRow,
    Robot,
    Roster,
    Scenario,
    ScenarioParams,
    ScenarioResult,
    SummaryRow,
    SweepReport,
    SweepRow,
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "param_point", "scenario_index", "seed", "method", "requests",
    "fulfilled", "messages", "movement", "reward", "total",
]
SUMMARY_COLUMNS = [
    "param_point", "method", "mean_total", "sd_total",
    "t_vs_dd", "p_vs_dd", "t_vs_opt", "p_vs_opt",
]
METHODS = (Method.DD, Method.HFI, Method.OPT)


def generate_scenario(params: ScenarioParams) -> Scenario:
    """Place the customer, humans and robots on distinct free cells and draw the request stream."""
    rng = np.random.default_rng(params.seed)
    if params.map_file:
        grid = load_map(params.map_file)
    else:
        grid = generate_store_map(params.map_width, params.map_height, params.aisle_spacing)

    free = grid.free_cells()
    needed = 1 + params.num_humans + params.num_robots
    if needed > len(free):
        raise GenerationError(f"{needed} agents do not fit on {len(free)} free cells")
    cells = [free[i] for i in rng.choice(len(free), size=needed, replace=False)]

    peaks = rng.uniform(0.0, CLOCK_HOURS, size=params.num_humans)
    min_offers = rng.uniform(params.min_offer_lo, params.min_offer_hi, size=params.num_humans)
    busy = rng.random((params.requests_per_scenario, params.num_robots)) < params.busy_probability

    customer = Customer(
        id="c",
        pos=cells[0],
        budget=params.budget,
        initial_offer=params.initial_offer,
        offer_increment=params.offer_increment,
    )
    humans = tuple(
        HumanAssistant(
            id=f"h{i:03d}",
            pos=cells[1 + i],
            min_offer=float(min_offers[i]),
            # uniform draws can round up to exactly 24.0
            peak_time=float(peaks[i]) % CLOCK_HOURS,
            sigma=params.sigma,
        )
        for i in range(params.num_humans)
    )
    robots = tuple(
        Robot(id=f"r{i:03d}", pos=cells[1 + params.num_humans + i])
        for i in range(params.num_robots)
    )
    requests = tuple(
        Request.of_counts(
            params.humans_per_request,
            params.robots_per_request,
            request_id=k,
            issued_at=(params.start_time + k * params.time_step) % CLOCK_HOURS,
            busy_robots=frozenset(r.id for r, flag in zip(robots, busy[k]) if flag),
        )
        for k in range(params.requests_per_scenario)
    )
    return Scenario(
        params=params,
        grid=grid,
        radio=params.radio,
        roster=Roster(humans=humans, robots=robots, customer=customer),
        requests=requests,
        weights=params.weights,
    )


def _protocol_row(request: Request, outcome: ProtocolOutcome, scenario: Scenario) -> RequestRow:
    return RequestRow(
        request_id=request.request_id,
        method=outcome.method,
        fulfilled=outcome.fulfilled,
        messages=outcome.messages,
        movement=outcome.movement_cost,
        reward=outcome.reward_paid,
        total=total_cost(outcome, scenario.weights),
        escalation_rounds=outcome.escalation_rounds,
        offer=outcome.final_offer,
    )


def _lower_bound_violated(opt: Optional[RequestRow], outcome: ProtocolOutcome, scenario: Scenario) -> bool:
    if not outcome.fulfilled:
        return False
    bound = scenario.weights.beta * outcome.movement_cost + outcome.reward_paid
    return opt is None or not opt.fulfilled or opt.total > bound + 1e-9


def run_scenario(
    scenario: Scenario,
    dd_trace: Optional[MessageTrace] = None,
    hfi_trace: Optional[MessageTrace] = None,
) -> ScenarioResult:
    """Run DD, HFI and OPT on every request. HFI carries its history from request to request."""
    history = scenario.roster.customer.initial_history()
    result = ScenarioResult(seed=scenario.params.seed)

    for request in scenario.requests:
        roster = scenario.roster_for(request)
        dd = run_directed_diffusion(scenario.grid, scenario.radio, roster, request, scenario.weights, dd_trace)
        hfi, history = run_hfi(scenario.grid, scenario.radio, roster, request, history, scenario.weights, hfi_trace)
        allocation = optimal_allocation(scenario.grid, roster, request, scenario.weights)

        if allocation is None:
            opt = RequestRow(request_id=request.request_id, method=Method.OPT, fulfilled=False)
        else:
            opt = RequestRow(
                request_id=request.request_id,
                method=Method.OPT,
                fulfilled=True,
                movement=allocation.movement,
                reward=allocation.offer_level * len(allocation.selected_humans),
                total=allocation.cost,
                offer=allocation.offer_level,
            )

        for outcome in (dd, hfi):
            if _lower_bound_violated(opt, outcome, scenario):
                result.bound_violations += 1
                logger.warning(
                    "Seed %d request %d: optimal cost exceeds %s cost",
                    scenario.params.seed, request.request_id, outcome.method.value,
                )
        result.rows.extend([_protocol_row(request, dd, scenario), _protocol_row(request, hfi, scenario), opt])

    result.totals = {m: aggregate(result.rows, m) for m in METHODS}
    return result


def aggregate(rows: Iterable[RequestRow], method: Method, skip_requests: int = 0) -> MethodTotals:
    """Fold the per-request rows of ``method``, ignoring the first ``skip_requests`` requests."""
    totals = MethodTotals(method=method)
    for row in rows:
        if row.method != method or row.request_id < skip_requests:
            continue
        totals.requests += 1
        totals.fulfilled += int(row.fulfilled)
        totals.messages += row.messages
        totals.movement += row.movement
        totals.reward += row.reward
        totals.total += row.total
        totals.escalation_rounds += row.escalation_rounds
    return totals


def _run_one(job: Tuple[str, int, ScenarioParams]) -> Tuple[str, int, ScenarioResult]:
    label, index, params = job
    return label, index, run_scenario(generate_scenario(params))


def run_sweep(
    points: Sequence[Tuple[str, ScenarioParams]],
    repetitions: int,
    workers: int = 1,
) -> SweepReport:
    """
    Run ``repetitions`` scenarios per parameter point (seed = base seed + index)
    and summarise them with paired t-tests against DD and OPT.
    """
    jobs = [
        (label, i, build_params({"seed": params.seed + i}, params))
        for label, params in points
        for i in range(repetitions)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]

    report = SweepReport()
    per_point: Dict[str, Dict[Method, List[float]]] = {}
    for (label, index, result), (_, _, params) in zip(results, jobs):
        logger.info("%s scenario %d (seed %d) done", label, index, params.seed)
        for method in METHODS:
            t = result.totals[method]
            report.rows.append(SweepRow(
                param_point=label,
                scenario_index=index,
                seed=params.seed,
                method=method,
                requests=t.requests,
                fulfilled=t.fulfilled,
                messages=t.messages,
                movement=t.movement,
                reward=t.reward,
                total=t.total,
            ))
            per_point.setdefault(label, {m: [] for m in METHODS})[method].append(t.total)

    for label, _ in points:
        report.summary.extend(summarize(label, per_point[label]))
    return report


def summarize(label: str, totals: Dict[Method, List[float]]) -> List[SummaryRow]:
    rows = []
    for method in METHODS:
        mean, sd = mean_and_sd(totals[method])
        row = SummaryRow(param_point=label, method=method, mean_total=mean, sd_total=sd)
        if len(totals[method]) >= 2:
            if method != Method.DD:
                vs_dd = paired_t_test(totals[method], totals[Method.DD])
                row.t_vs_dd, row.p_vs_dd = vs_dd.t, vs_dd.p_two_tailed
            if method != Method.OPT:
                vs_opt = paired_t_test(totals[method], totals[Method.OPT])
                row.t_vs_opt, row.p_vs_opt = vs_opt.t, vs_opt.p_two_tailed
        rows.append(row)
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Method):
        return value.value
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _to_csv(columns: List[str], records: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_cell(getattr(record, c)) for c in columns])
    return buf.getvalue()


def sweep_csv(report: SweepReport) -> str:
    return _to_csv(SWEEP_COLUMNS, report.rows)


def summary_csv(report: SweepReport) -> str:
    return _to_csv(SUMMARY_COLUMNS, report.summary)


def write_report(report: SweepReport, out: Union[str, Path], summary_out: Optional[Union[str, Path]] = None) -> List[Path]:
    """Write the sweep CSV and its companion summary (default: ``<out>.summary.csv``)."""
    out = Path(out)
    summary_path = Path(summary_out) if summary_out else out.with_name(out.stem + ".summary.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(sweep_csv(report))
    summary_path.write_text(summary_csv(report))
    return [out, summary_path]


def request_table(result: ScenarioResult) -> str:
    """Human-readable per-request table for the ``run`` command."""
    header = f"{'req':>3}  {'method':<6} {'ok':<3} {'rounds':>6} {'offer':>8} {'msgs':>6} {'move':>6} {'reward':>9} {'total':>9}"
    lines = [header, "-" * len(header)]
    for row in result.rows:
        lines.append(
            f"{row.request_id:>3}  {row.method.value:<6} {'yes' if row.fulfilled else 'no':<3} "
            f"{row.escalation_rounds:>6} {row.offer:>8.2f} {row.messages:>6} {row.movement:>6} "
            f"{row.reward:>9.2f} {row.total:>9.2f}"
        )
    lines.append("-" * len(header))
    for method in METHODS:
        t = result.totals[method]
        lines.append(
            f"{'all':>3}  {method.value:<6} {t.fulfilled}/{t.requests:<1} {t.mean_escalation_rounds:>6.2f} "
            f"{'':>8} {t.messages:>6} {t.movement:>6} {t.reward:>9.2f} {t.total:>9.2f}"
        )
    return "\n".join(lines)
