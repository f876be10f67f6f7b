"""Repeated-trial benchmarks: ratios against the oracle, CIs, CSV emission.

A trial plan names a scenario template, the customer counts to sweep, how
many trials per count, which algorithms to run and which yardstick (the
exhaustive optimum, the LP relaxation bound, or none).  Every trial's
instance seed is derived from (plan seed, n, trial index), so any trial can
be regenerated in isolation and results never depend on execution order or
on thread count.

Ratios are oriented so that 1.0 means optimal for both objectives: achieved
over optimal when maximising valuation, optimal over achieved when
minimising compensation.  They are computed per trial and then averaged;
confidence intervals use the normal approximation 1.96 * s / sqrt(t).

Wall-clock timings are inherently non-reproducible, so plans only include
elapsed columns when ``measure_time`` is set; with it off (the default) the
emitted CSV is byte-identical across runs and worker counts.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .cmin import cmin_gda, cmin_gma, cmin_gra, cmin_gva
from .greedy import gda, gma, gra, gva
from .gsa import GsaConfig, gsa
from .model import FormatError, Instance, Solution
from .oracle import OracleBudget, brute_force_cmin, brute_force_vmax, lp_upper_bound
from .scenario import ScenarioSpec, generate, spec_from_acronym

VMAX_ALGORITHMS: Mapping[str, Callable[[Instance], Solution]] = {
    "gva": gva,
    "gma": gma,
    "gra": gra,
    "gda": gda,
}
CMIN_ALGORITHMS: Mapping[str, Callable[[Instance], Solution]] = {
    "gva": cmin_gva,
    "gma": cmin_gma,
    "gra": cmin_gra,
    "gda": cmin_gda,
}

CSV_COLUMNS = (
    "scenario",
    "n",
    "algorithm",
    "mean_objective",
    "mean_ratio_vs_oracle",
    "ci95_halfwidth",
    "worst_ratio",
    "mean_elapsed",
    "ci95_elapsed",
)


@dataclass(frozen=True)
class TrialPlan:
    """A benchmark to run; see the module docstring for the semantics."""

    scenario: ScenarioSpec
    n_values: tuple[int, ...]
    trials_per_n: int = 30
    algorithms: tuple[str, ...] = ("gda",)
    objective: str = "vmax"
    oracle: str = "brute_force"
    gsa_epsilon: float = 0.25
    measure_time: bool = False
    budget: OracleBudget = OracleBudget()

    def __post_init__(self):
        if self.trials_per_n < 30:
            raise ValueError("trials_per_n must be >= 30 for stable confidence intervals")
        if self.objective not in ("vmax", "cmin"):
            raise ValueError(f"objective must be vmax or cmin, got {self.objective!r}")
        if self.oracle not in ("brute_force", "lp_bound", "none"):
            raise ValueError(f"oracle must be brute_force, lp_bound or none, got {self.oracle!r}")
        if self.oracle == "lp_bound" and self.objective != "vmax":
            raise ValueError("the lp_bound yardstick only applies to the vmax objective")
        known = set(VMAX_ALGORITHMS) | {"gsa"}
        if self.objective == "cmin":
            known = set(CMIN_ALGORITHMS)
        unknown = set(self.algorithms) - known
        if unknown:
            raise ValueError(f"unknown algorithms for {self.objective}: {sorted(unknown)}")
        if self.oracle == "brute_force":
            over = [n for n in self.n_values if n > self.budget.max_n]
            if over:
                raise ValueError(
                    f"n values {over} exceed the oracle budget max_n={self.budget.max_n}; "
                    f"raise the budget or drop the oracle"
                )


@dataclass(frozen=True)
class BenchRow:
    scenario: str
    n: int
    algorithm: str
    mean_objective: float
    mean_ratio_vs_oracle: float | None
    ci95_halfwidth: float | None
    worst_ratio: float | None
    mean_elapsed: float | None
    ci95_elapsed: float | None


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[BenchRow, ...]


def trial_seed(plan: TrialPlan, n: int, trial: int) -> int:
    """Instance seed for one trial, independent of any other trial."""
    seq = np.random.SeedSequence((plan.scenario.seed, n, trial))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def instance_for_trial(plan: TrialPlan, n: int, trial: int) -> Instance:
    spec = replace(plan.scenario, n=n, seed=trial_seed(plan, n, trial))
    return generate(spec)


def _solve(plan: TrialPlan, tag: str, instance: Instance) -> Solution:
    if plan.objective == "cmin":
        return CMIN_ALGORITHMS[tag](instance)
    if tag == "gsa":
        return gsa(instance, GsaConfig(plan.gsa_epsilon))
    return VMAX_ALGORITHMS[tag](instance)


def _yardstick(plan: TrialPlan, instance: Instance) -> float | None:
    if plan.oracle == "none":
        return None
    if plan.oracle == "lp_bound":
        return lp_upper_bound(instance)
    if plan.objective == "cmin":
        return brute_force_cmin(instance, plan.budget).objective
    return brute_force_vmax(instance, plan.budget).objective


def _ratio(plan: TrialPlan, achieved: float, optimal: float) -> float:
    # Oriented so 1.0 is optimal for both objectives.
    if plan.objective == "cmin":
        if achieved == 0.0:
            return 1.0
        return optimal / achieved
    if optimal == 0.0:
        return 1.0
    return achieved / optimal


def _run_trial(plan: TrialPlan, n: int, trial: int) -> dict[str, tuple[float, float | None, float]]:
    """One trial: {algorithm: (objective, ratio, elapsed)}."""
    instance = instance_for_trial(plan, n, trial)
    optimal = _yardstick(plan, instance)
    out = {}
    for tag in plan.algorithms:
        solution = _solve(plan, tag, instance)
        ratio = None if optimal is None else _ratio(plan, solution.objective, optimal)
        out[tag] = (solution.objective, ratio, solution.elapsed)
    return out


def _mean_ci(values: Sequence[float]) -> tuple[float, float]:
    mean = sum(values) / len(values)
    if len(values) < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, 1.96 * math.sqrt(var) / math.sqrt(len(values))


def run_benchmark(plan: TrialPlan, threads: int = 1) -> BenchmarkReport:
    """Execute the plan. ``threads`` only changes wall time, never results."""
    tasks = [(n, t) for n in plan.n_values for t in range(plan.trials_per_n)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = dict(zip(tasks, pool.map(lambda nt: _run_trial(plan, *nt), tasks)))
    else:
        outcomes = {nt: _run_trial(plan, *nt) for nt in tasks}

    rows = []
    for n in sorted(set(plan.n_values)):
        for tag in sorted(set(plan.algorithms)):
            trials = [outcomes[(n, t)][tag] for t in range(plan.trials_per_n)]
            objectives = [t[0] for t in trials]
            ratios = [t[1] for t in trials]
            elapsed = [t[2] for t in trials]
            mean_obj, _ = _mean_ci(objectives)
            if ratios[0] is None:
                mean_ratio = ci_ratio = worst = None
            else:
                mean_ratio, ci_ratio = _mean_ci(ratios)
                worst = min(ratios)
            if plan.measure_time:
                mean_el, ci_el = _mean_ci(elapsed)
            else:
                mean_el = ci_el = None
            rows.append(
                BenchRow(
                    scenario=plan.scenario.acronym,
                    n=n,
                    algorithm=tag,
                    mean_objective=mean_obj,
                    mean_ratio_vs_oracle=mean_ratio,
                    ci95_halfwidth=ci_ratio,
                    worst_ratio=worst,
                    mean_elapsed=mean_el,
                    ci95_elapsed=ci_el,
                )
            )
    rows.sort(key=lambda r: (r.scenario, r.n, r.algorithm))
    return BenchmarkReport(rows=tuple(rows))


def emit_csv(report: BenchmarkReport, path: str) -> None:
    """Write the report as RFC 4180 CSV with a fixed column order."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in report.rows:
                writer.writerow(
                    [
                        row.scenario,
                        row.n,
                        row.algorithm,
                        repr(row.mean_objective),
                        "" if row.mean_ratio_vs_oracle is None else repr(row.mean_ratio_vs_oracle),
                        "" if row.ci95_halfwidth is None else repr(row.ci95_halfwidth),
                        "" if row.worst_ratio is None else repr(row.worst_ratio),
                        "" if row.mean_elapsed is None else repr(row.mean_elapsed),
                        "" if row.ci95_elapsed is None else repr(row.ci95_elapsed),
                    ]
                )
    except OSError as exc:
        raise OSError(f"could not write benchmark CSV to {path}: {exc}") from exc


_PLAN_KEYS = {
    "scenario", "n_values", "trials_per_n", "algorithms", "objective",
    "oracle", "gsa_epsilon", "measure_time", "oracle_max_n",
}
_PLAN_SCENARIO_KEYS = {
    "acronym", "capacity", "seed", "max_theta", "phase_anchor", "industrial_fraction",
}


def plan_from_dict(doc: Mapping) -> TrialPlan:
    """Build a TrialPlan from parsed plan JSON. Unknown keys are errors."""
    if not isinstance(doc, Mapping):
        raise FormatError("plan document must be a JSON object")
    unknown = set(doc) - _PLAN_KEYS
    if unknown:
        raise FormatError(f"unknown plan fields: {sorted(unknown)}")
    try:
        sc = doc["scenario"]
        unknown = set(sc) - _PLAN_SCENARIO_KEYS
        if unknown:
            raise FormatError(f"unknown scenario fields: {sorted(unknown)}")
        scenario = spec_from_acronym(
            sc["acronym"],
            n=0,
            capacity=float(sc["capacity"]),
            seed=int(sc["seed"]),
            **{
                key: sc[key]
                for key in ("max_theta", "phase_anchor", "industrial_fraction")
                if key in sc
            },
        )
        budget = OracleBudget(max_n=int(doc.get("oracle_max_n", 20)))
        return TrialPlan(
            scenario=scenario,
            n_values=tuple(int(n) for n in doc["n_values"]),
            trials_per_n=int(doc.get("trials_per_n", 30)),
            algorithms=tuple(doc.get("algorithms", ["gda"])),
            objective=doc.get("objective", "vmax"),
            oracle=doc.get("oracle", "brute_force"),
            gsa_epsilon=float(doc.get("gsa_epsilon", 0.25)),
            measure_time=bool(doc.get("measure_time", False)),
            budget=budget,
        )
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed benchmark plan: {exc}") from exc


# --- dynamic generation capacity ---------------------------------------------


@dataclass(frozen=True)
class TracePoint:
    time_s: float
    capacity: float
    objective: float
    retained_count: int


def run_dynamic_capacity(
    scenario: ScenarioSpec,
    horizon: float = 10_000.0,
    event_rate: float = 0.005,
    fail_prob: float = 0.65,
    drop_range: tuple[float, float] = (0.05, 0.35),
    algorithm: str = "gda",
    seed: int = 0,
    full_capacity: float = 2_000_000.0,
    floor_capacity: float = 100_000.0,
    gsa_epsilon: float = 0.25,
) -> list[TracePoint]:
    """Re-solve a fixed customer set while generation capacity jumps around.

    Events arrive with exponential inter-arrival times at ``event_rate`` per
    second.  Each event is a failure with probability ``fail_prob`` (capacity
    drops by a uniform fraction from ``drop_range``, floored at
    ``floor_capacity``) and a full resumption otherwise.  The trace starts
    with one point at t=0 at full capacity and gains a point per event.

    Customers whose lone demand exceeds the current capacity are excluded
    from that re-solve; they could never be part of a feasible supply set.
    """
    if not 0.0 <= fail_prob <= 1.0:
        raise ValueError("fail_prob must be within [0, 1]")
    lo, hi = drop_range
    if not 0.0 < lo <= hi < 1.0:
        raise ValueError("drop_range must satisfy 0 < lo <= hi < 1")
    if horizon <= 0 or event_rate <= 0:
        raise ValueError("horizon and event_rate must be > 0")
    if algorithm not in set(VMAX_ALGORITHMS) | {"gsa"}:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    base = generate(replace(scenario, capacity=full_capacity))
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xD1)))

    def solve_at(capacity: float) -> tuple[float, int]:
        # construction guarantees every remaining demand fits the capacity
        reduced = Instance(
            [c for c in base.customers if c.demand.magnitude() <= capacity], capacity
        )
        if algorithm == "gsa":
            sol = gsa(reduced, GsaConfig(gsa_epsilon))
        else:
            sol = VMAX_ALGORITHMS[algorithm](reduced)
        return sol.objective, len(sol.retained_ids)

    capacity = full_capacity
    objective, retained = solve_at(capacity)
    trace = [TracePoint(0.0, capacity, objective, retained)]
    t = 0.0
    while True:
        t += float(rng.exponential(1.0 / event_rate))
        if t > horizon:
            break
        if rng.random() < fail_prob:
            capacity = max(floor_capacity, capacity * (1.0 - rng.uniform(lo, hi)))
        else:
            capacity = full_capacity
        objective, retained = solve_at(capacity)
        trace.append(TracePoint(t, capacity, objective, retained))
    return trace


def write_trace_csv(trace: Sequence[TracePoint], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("t_seconds", "capacity_va", "objective", "retained_count"))
        for point in trace:
            writer.writerow(
                [repr(point.time_s), repr(point.capacity), repr(point.objective), point.retained_count]
            )
