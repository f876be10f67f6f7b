"""Single-pass greedy solvers for valuation-maximising curtailment.

Four O(n log n) heuristics over one shared scan: sort the customers by some
key, then walk the order adding every customer whose demand still fits the
remaining apparent-power capacity.

* ``gva``  - valuation descending ("supply the biggest payers first")
* ``gma``  - demand magnitude ascending ("supply the smallest loads first")
* ``gra``  - efficiency (valuation per VA) descending
* ``gda``  - better of ``gra`` and ``gva``; guarantees at least
  ``alignment_factor(theta) / 2`` of the optimum when the pairwise phase
  spread theta is at most pi/2.

Ties are broken by ascending customer id so runs are reproducible; pass a
seeded generator as ``tie_break_rng`` to randomise tie order instead.
"""

from __future__ import annotations

import enum
import time
from typing import Iterable, Sequence

import numpy as np

from .model import (
    CAPACITY_REL_TOL,
    Instance,
    Solution,
    UnknownCustomerError,
    aggregate_demand,
    retained_valuation,
)


class SortKey(enum.Enum):
    """Greedy scan orders. Zero-magnitude demands rank first under EFFICIENCY_DESC
    (they consume no capacity, so taking them can only help)."""

    VALUATION_DESC = "valuation_desc"
    MAGNITUDE_ASC = "magnitude_asc"
    EFFICIENCY_DESC = "efficiency_desc"


def _primary_key(instance: Instance, key: SortKey, subset: np.ndarray | None) -> np.ndarray:
    cols = instance.columns
    if subset is None:
        u, mag = cols.valuation, cols.mag
    else:
        u, mag = cols.valuation[subset], cols.mag[subset]
    if key is SortKey.VALUATION_DESC:
        return -u
    if key is SortKey.MAGNITUDE_ASC:
        return mag
    with np.errstate(divide="ignore", invalid="ignore"):
        eff = np.where(mag == 0.0, np.inf, u / mag)
    return -eff  # -inf first: zero-magnitude customers lead the order


def scan_order(
    instance: Instance,
    key: SortKey,
    subset: np.ndarray | None = None,
    tie_break_rng: np.random.Generator | None = None,
) -> list[int]:
    """Storage indices in greedy order; ties by id, or randomised via rng."""
    cols = instance.columns
    primary = _primary_key(instance, key, subset)
    ids = cols.id if subset is None else cols.id[subset]
    if tie_break_rng is not None:
        secondary = tie_break_rng.permutation(len(ids))
    else:
        secondary = ids
    order = np.lexsort((secondary, primary))
    if subset is not None:
        order = subset[order]
    return order.tolist()


def _greedy_scan(
    instance: Instance,
    order: Sequence[int],
    base_p: float,
    base_q: float,
    limit_sq: float,
) -> list[int]:
    """Walk ``order`` (storage indices), keeping every customer that still fits."""
    cols = instance.columns
    order_arr = np.asarray(order, dtype=np.int64)
    # gather into scan order once; the loop then touches memory sequentially
    p_ord = cols.p[order_arr].tolist()
    q_ord = cols.q[order_arr].tolist()
    acc_p, acc_q = base_p, base_q
    taken: list[int] = []
    for i, pv, qv in zip(order, p_ord, q_ord):
        np_ = acc_p + pv
        nq = acc_q + qv
        if np_ * np_ + nq * nq <= limit_sq:
            acc_p, acc_q = np_, nq
            taken.append(i)
    return taken


def _solution_from_indices(
    instance: Instance, indices: Iterable[int], tag: str, elapsed: float
) -> Solution:
    ids = frozenset(int(instance.columns.id[i]) for i in indices)
    return Solution(
        retained_ids=ids,
        objective=retained_valuation(instance, ids),
        aggregate_demand=aggregate_demand(instance, ids),
        algorithm=tag,
        elapsed=elapsed,
    )


def _single_order_solve(
    instance: Instance,
    key: SortKey,
    tag: str,
    rel_tol: float,
    tie_break_rng: np.random.Generator | None,
) -> Solution:
    start = time.perf_counter()
    order = scan_order(instance, key, tie_break_rng=tie_break_rng)
    taken = _greedy_scan(instance, order, 0.0, 0.0, instance.capacity_limit_sq(rel_tol))
    return _solution_from_indices(instance, taken, tag, time.perf_counter() - start)


def gva(
    instance: Instance,
    rel_tol: float = CAPACITY_REL_TOL,
    tie_break_rng: np.random.Generator | None = None,
) -> Solution:
    """Greedy by descending valuation."""
    return _single_order_solve(instance, SortKey.VALUATION_DESC, "gva", rel_tol, tie_break_rng)


def gma(
    instance: Instance,
    rel_tol: float = CAPACITY_REL_TOL,
    tie_break_rng: np.random.Generator | None = None,
) -> Solution:
    """Greedy by ascending demand magnitude."""
    return _single_order_solve(instance, SortKey.MAGNITUDE_ASC, "gma", rel_tol, tie_break_rng)


def gra(
    instance: Instance,
    rel_tol: float = CAPACITY_REL_TOL,
    tie_break_rng: np.random.Generator | None = None,
) -> Solution:
    """Greedy by descending efficiency (valuation per VA of demand)."""
    return _single_order_solve(instance, SortKey.EFFICIENCY_DESC, "gra", rel_tol, tie_break_rng)


def gda(
    instance: Instance,
    rel_tol: float = CAPACITY_REL_TOL,
    tie_break_rng: np.random.Generator | None = None,
) -> Solution:
    """Better of the efficiency-greedy and valuation-greedy solutions.

    The valuation branch always retains the single highest-valuation customer
    (singletons are feasible by instance construction), so the objective is
    never below the largest single valuation.  On equal objectives the
    efficiency branch's set is returned.
    """
    start = time.perf_counter()
    ratio = gra(instance, rel_tol, tie_break_rng)
    value = gva(instance, rel_tol, tie_break_rng)
    best = ratio if ratio.objective >= value.objective else value
    return Solution(
        retained_ids=best.retained_ids,
        objective=best.objective,
        aggregate_demand=best.aggregate_demand,
        algorithm="gda",
        elapsed=time.perf_counter() - start,
    )


def gda_forced(
    instance: Instance,
    forced: Iterable[int],
    pool: Iterable[int],
    rel_tol: float = CAPACITY_REL_TOL,
    tie_break_rng: np.random.Generator | None = None,
) -> Solution:
    """``gda`` restricted to ``pool``, with ``forced`` customers pre-retained.

    Both greedy branches scan only the pool, starting from the aggregate
    demand of the forced set; the forced customers appear in every returned
    solution and their valuations count toward the objective.  ``forced`` and
    ``pool`` must be disjoint, and the forced set must fit the capacity on
    its own.
    """
    start = time.perf_counter()
    forced = frozenset(forced)
    pool = frozenset(pool)
    unknown = (forced | pool) - instance.ids
    if unknown:
        raise UnknownCustomerError(f"unknown customer ids: {sorted(unknown)}")
    if forced & pool:
        raise ValueError(f"forced and pool overlap: {sorted(forced & pool)}")

    limit_sq = instance.capacity_limit_sq(rel_tol)
    base = aggregate_demand(instance, forced)
    if base.active_p ** 2 + base.reactive_q ** 2 > limit_sq:
        raise ValueError("forced set is infeasible on its own")

    index_of = instance.index_of
    forced_idx = [index_of[i] for i in forced]
    pool_idx = np.fromiter(sorted(index_of[i] for i in pool), dtype=np.int64, count=len(pool))

    best_taken: list[int] | None = None
    best_objective = -np.inf
    for key in (SortKey.EFFICIENCY_DESC, SortKey.VALUATION_DESC):
        order = scan_order(instance, key, subset=pool_idx, tie_break_rng=tie_break_rng)
        taken = _greedy_scan(instance, order, base.active_p, base.reactive_q, limit_sq)
        ids = frozenset(int(instance.columns.id[i]) for i in taken) | forced
        objective = retained_valuation(instance, ids)
        if objective > best_objective:
            best_objective = objective
            best_taken = taken
    assert best_taken is not None
    retained = frozenset(int(instance.columns.id[i]) for i in best_taken) | forced
    return Solution(
        retained_ids=retained,
        objective=retained_valuation(instance, retained),
        aggregate_demand=aggregate_demand(instance, retained),
        algorithm="gda",
        elapsed=time.perf_counter() - start,
    )
