"""Reverse-greedy solvers for compensation-minimising curtailment.

Start from the full customer set and shed customers one by one, in an order
chosen by each heuristic, stopping at the first state whose aggregate demand
fits the capacity.  The objective is the total compensation paid to the shed
customers.  Since demands sit in the first quadrant, every removal shrinks
both components of the aggregate, so the first feasible state is well
defined and the loop always terminates (the empty set is feasible).

Removal orders mirror the valuation-maximising greedy family:

* ``cmin_gva`` - compensation ascending (shed the cheapest-to-pay first)
* ``cmin_gma`` - demand magnitude descending (shed the largest loads first)
* ``cmin_gra`` - compensation per VA ascending; zero-magnitude customers are
  never shed (removing them frees no capacity)
* ``cmin_gda`` - the cheaper of the ``cmin_gva`` and ``cmin_gra`` answers

No worst-case guarantee is claimed for these adaptations; benchmarks track
their gap to the exhaustive optimum instead.
"""

from __future__ import annotations

import time

import numpy as np

from .model import (
    CAPACITY_REL_TOL,
    Instance,
    Solution,
    aggregate_demand,
    curtailed_compensation,
)


def _removal_solve(instance: Instance, order: list[int], tag: str, rel_tol: float) -> Solution:
    """Shed customers in ``order`` (storage indices) until the rest fit."""
    start = time.perf_counter()
    cols = instance.columns
    limit_sq = instance.capacity_limit_sq(rel_tol)

    agg = aggregate_demand(instance, instance.ids)
    p, q = agg.active_p, agg.reactive_q
    removed = 0
    while p * p + q * q > limit_sq:
        i = order[removed]
        p -= cols.p_list[i]
        q -= cols.q_list[i]
        removed += 1
        if removed == len(order):
            break
    retained = instance.ids - frozenset(int(cols.id[i]) for i in order[:removed])

    # Running subtraction can drift near the boundary; re-check canonically
    # and keep shedding in the rare case the drift flipped the verdict.
    agg = aggregate_demand(instance, retained)
    while agg.active_p ** 2 + agg.reactive_q ** 2 > limit_sq and removed < len(order):
        i = order[removed]
        removed += 1
        retained = retained - {int(cols.id[i])}
        agg = aggregate_demand(instance, retained)

    return Solution(
        retained_ids=retained,
        objective=curtailed_compensation(instance, retained),
        aggregate_demand=agg,
        algorithm=tag,
        elapsed=time.perf_counter() - start,
    )


def _order(instance: Instance, primary: np.ndarray) -> list[int]:
    return np.lexsort((instance.columns.id, primary)).tolist()


def cmin_gva(instance: Instance, rel_tol: float = CAPACITY_REL_TOL) -> Solution:
    """Shed customers in ascending order of compensation."""
    return _removal_solve(
        instance, _order(instance, instance.columns.compensation), "cmin_gva", rel_tol
    )


def cmin_gma(instance: Instance, rel_tol: float = CAPACITY_REL_TOL) -> Solution:
    """Shed customers in descending order of demand magnitude."""
    return _removal_solve(instance, _order(instance, -instance.columns.mag), "cmin_gma", rel_tol)


def cmin_gra(instance: Instance, rel_tol: float = CAPACITY_REL_TOL) -> Solution:
    """Shed customers in ascending order of compensation per VA of demand."""
    cols = instance.columns
    with np.errstate(divide="ignore", invalid="ignore"):
        eff = np.where(cols.mag == 0.0, np.inf, cols.compensation / cols.mag)
    return _removal_solve(instance, _order(instance, eff), "cmin_gra", rel_tol)


def cmin_gda(instance: Instance, rel_tol: float = CAPACITY_REL_TOL) -> Solution:
    """Cheaper of the compensation-greedy and efficiency-greedy sheddings.

    On equal objectives the efficiency variant's retained set is returned.
    """
    start = time.perf_counter()
    ratio = cmin_gra(instance, rel_tol)
    value = cmin_gva(instance, rel_tol)
    best = ratio if ratio.objective <= value.objective else value
    return Solution(
        retained_ids=best.retained_ids,
        objective=best.objective,
        aggregate_demand=best.aggregate_demand,
        algorithm="cmin_gda",
        elapsed=time.perf_counter() - start,
    )
