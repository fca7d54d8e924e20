"""Metrics, budget matching, and budget sweeps.

Rates are exact fractions internally; rendering rounds to one decimal
place (percent) / three places (rates). Budget matching picks the largest
truncation cap whose resulting average states-explored stays at or below
the target.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction

from .controller import HybridController
from .domains import validate_plan
from .hybrid import EnginesConfig, greedy_plan, solve_hybrid
from .search import TraceConfig, run_engine, truncate_run


@dataclass(frozen=True)
class ScoredRun:
    """Planner-agnostic view of one solved problem."""

    problem: object
    plan: tuple | None
    states_explored: int

    @property
    def valid(self):
        if self.plan is None:
            return False
        ok, _ = validate_plan(self.problem, self.plan)
        return ok

    @property
    def optimal(self):
        if self.problem.optimal_length is None:
            raise ValueError(f"problem {self.problem.problem_id!r} has no oracle length")
        return self.valid and len(self.plan) == self.problem.optimal_length


@dataclass(frozen=True)
class BudgetRow:
    budget: object  # numeric target or "default"
    avg_se: Fraction
    validity: Fraction
    optimality: Fraction
    n: int
    bias: float | None = None  # set when reached via test-time control


@dataclass(frozen=True)
class BudgetReport:
    planner: str
    rows: tuple


@dataclass(frozen=True)
class PlannerConfig:
    kind: str  # "sys1" | "sys2" | "hybrid"
    engine: str = "astar"
    trace: TraceConfig = TraceConfig()
    controller: HybridController | None = None  # fitted; hybrid only

    def label(self):
        if self.kind == "sys1":
            return "sys1-greedy"
        if self.kind == "sys2":
            return self.engine
        cfg = self.controller.config
        return f"hybrid-x{cfg.x:g}-{self.engine}"


def plan_validity_rate(runs):
    if not runs:
        raise ValueError("validity rate of an empty run set is undefined")
    return Fraction(sum(1 for r in runs if r.valid), len(runs))


def plan_optimality_rate(runs):
    if not runs:
        raise ValueError("optimality rate of an empty run set is undefined")
    return Fraction(sum(1 for r in runs if r.optimal), len(runs))


def average_se(runs):
    if not runs:
        raise ValueError("average states-explored of an empty run set is undefined")
    return Fraction(sum(r.states_explored for r in runs), len(runs))


def match_budget_cap(sizes, target):
    """Largest integer cap c with mean(min(size, c)) <= target; 1 when
    even the smallest cap overshoots."""
    if target < 1:
        raise ValueError("target budget must be >= 1")
    sizes = list(sizes)
    if not sizes:
        raise ValueError("no trace sizes to match against")
    total_target = target * len(sizes)
    best = 1
    for cap in range(1, max(sizes) + 1):
        if sum(min(s, cap) for s in sizes) <= total_target:
            best = cap
        else:
            break
    return best


def solve_one(problem, config, budget=None):
    """Run the configured planner on one problem; returns a ScoredRun."""
    if config.kind == "sys1":
        outcome = greedy_plan(problem)
        plan, se = outcome.plan, outcome.states_explored
        if budget is not None and se > budget:
            plan = plan[:budget]
            se = len(plan)
        return ScoredRun(problem, plan, se)
    if config.kind == "sys2":
        run = run_engine(config.engine, problem, config.trace)
        if budget is not None:
            run = truncate_run(run, budget)
        return ScoredRun(problem, run.plan, run.states_explored)
    meta = config.controller.decompose(problem)
    engines = EnginesConfig(sys2=config.engine, trace=config.trace, budget=budget)
    run = solve_hybrid(problem, meta, engines)
    return ScoredRun(problem, run.plan, run.states_explored)


def run_planner(problems, config, budget=None, workers=1):
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(solve_one, problems,
                                 [config] * len(problems), [budget] * len(problems),
                                 chunksize=max(1, len(problems) // (4 * workers))))
    return [solve_one(p, config, budget) for p in problems]


def _row(runs, budget, bias=None):
    return BudgetRow(budget=budget, avg_se=average_se(runs),
                     validity=plan_validity_rate(runs),
                     optimality=plan_optimality_rate(runs),
                     n=len(runs), bias=bias)


BIAS_STEP = 0.05


def budget_sweep(problems, config, budgets, workers=1):
    """One report row per target budget plus the planner's default row.

    Targets below the default average are reached by truncation via
    match_budget_cap; for hybrid planners, targets above the default are
    reached by sweeping the controller bias upward in steps of 0.05 and
    keeping the largest bias whose average stays within the target.
    """
    budgets = sorted(budgets)
    default_runs = run_planner(problems, config, workers=workers)
    default_avg = average_se(default_runs)
    rows = []
    if config.kind == "sys1":
        return BudgetReport(config.label(), (_row(default_runs, "default"),))
    sizes = [r.states_explored for r in default_runs]
    for target in budgets:
        if target < default_avg:
            cap = match_budget_cap(sizes, target)
            runs = run_planner(problems, config, budget=cap, workers=workers)
            rows.append(_row(runs, target))
        elif config.kind == "hybrid":
            best = (default_runs, None)
            steps = int(round(1.0 / BIAS_STEP))
            base_bias = config.controller.config.bias
            for i in range(1, steps + 1):
                bias = min(1.0, base_bias + i * BIAS_STEP)
                biased = PlannerConfig(kind="hybrid", engine=config.engine,
                                       trace=config.trace,
                                       controller=config.controller.with_bias(bias))
                runs = run_planner(problems, biased, workers=workers)
                if average_se(runs) <= target:
                    best = (runs, bias)
                if bias >= 1.0:
                    break
            rows.append(_row(best[0], target, bias=best[1]))
        else:
            rows.append(_row(default_runs, target))
    rows.append(_row(default_runs, "default"))
    return BudgetReport(config.label(), tuple(rows))


def report_to_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["planner", "budget", "avg_se", "validity", "optimality", "n"])
    for row in report.rows:
        writer.writerow([
            report.planner, row.budget, f"{float(row.avg_se):.1f}",
            f"{float(row.validity):.3f}", f"{float(row.optimality):.3f}", row.n,
        ])
    return buf.getvalue()


def report_to_markdown(report):
    lines = [
        f"| planner | budget | avg SE | validity | optimality | n |",
        f"|---|---|---|---|---|---|",
    ]
    for row in report.rows:
        lines.append(
            f"| {report.planner} | {row.budget} | {float(row.avg_se):.1f} "
            f"| {100 * float(row.validity):.1f} | {100 * float(row.optimality):.1f} | {row.n} |"
        )
    return "\n".join(lines) + "\n"


def report_to_plot_data(reports):
    """One series per planner, for external plotting."""
    series = []
    for report in reports:
        points = [
            {"budget": (None if row.budget == "default" else row.budget),
             "avg_se": float(row.avg_se), "validity": float(row.validity),
             "optimality": float(row.optimality)}
            for row in report.rows
        ]
        series.append({"planner": report.planner, "points": points})
    return json.dumps({"series": series}, indent=2) + "\n"
