"""Ground-truth optima by exhaustive enumeration, plus the LP relaxation bound.

The enumeration evaluates all 2^n selections with O(2^n) total arithmetic:
subset sums are built by prefix doubling over numpy arrays (each bit extends
the table for all masks below it), so n = 20 stays routine on a laptop.
Budgets keep accidental 2^30-subset runs from happening.

``lp_upper_bound`` solves the magnitude-relaxed fractional problem exactly by
the efficiency-greedy rule: it upper-bounds the alignment-scaled optimum from
above and the sum of the two greedy branch objectives bounds it in turn.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .greedy import SortKey, scan_order
from .model import (
    CAPACITY_REL_TOL,
    CurtailError,
    Instance,
    Solution,
    aggregate_demand,
    curtailed_compensation,
    retained_valuation,
)

MAX_ORACLE_N = 30  # 2^30 subsets; hard ceiling, not a suggestion


class OracleBudgetError(CurtailError):
    """The instance is too large for exhaustive enumeration under this budget."""


@dataclass(frozen=True)
class OracleBudget:
    """Size limits for exhaustive enumeration."""

    max_n: int = 20
    max_subsets: int = 1 << 20

    def __post_init__(self):
        if self.max_n > MAX_ORACLE_N:
            raise ValueError(f"max_n must be <= {MAX_ORACLE_N}, got {self.max_n}")
        if self.max_n < 0 or self.max_subsets < 1:
            raise ValueError("budget limits must be non-negative")

    def check(self, n: int) -> None:
        if n > self.max_n:
            raise OracleBudgetError(
                f"instance has {n} customers; enumeration budget allows max_n={self.max_n}"
            )
        if (1 << n) > self.max_subsets:
            raise OracleBudgetError(
                f"instance needs 2^{n} subsets; budget allows {self.max_subsets}"
            )


def subset_sums(values: np.ndarray) -> np.ndarray:
    """out[mask] = sum of values[j] over set bits j, added in ascending-bit order.

    The addition order matches a plain left-to-right walk of the customers in
    storage order, so these sums are bit-identical to the canonical
    accumulation helpers in the model module.
    """
    n = len(values)
    out = np.zeros(1 << n, dtype=np.float64)
    for j in range(n):
        size = 1 << j
        out[size : size << 1] = out[:size] + values[j]
    return out


def _mask_ids(instance: Instance, mask: int) -> list[int]:
    ids = []
    j = 0
    while mask:
        if mask & 1:
            ids.append(int(instance.columns.id[j]))
        mask >>= 1
        j += 1
    return ids


def _best_feasible_mask(
    instance: Instance, weights: np.ndarray, rel_tol: float
) -> int:
    """Mask of the feasible selection maximising the weight sum.

    Ties are broken toward the lexicographically smallest sorted id list.
    """
    psum = subset_sums(instance.columns.p)
    qsum = subset_sums(instance.columns.q)
    feasible = psum * psum + qsum * qsum <= instance.capacity_limit_sq(rel_tol)
    wsum = subset_sums(weights)
    wsum[~feasible] = -np.inf
    best_value = wsum.max()  # the empty mask is always feasible, so > -inf
    candidates = np.flatnonzero(wsum == best_value)
    if len(candidates) == 1:
        return int(candidates[0])
    return min(
        (int(m) for m in candidates),
        key=lambda m: tuple(sorted(_mask_ids(instance, m))),
    )


def brute_force_vmax(
    instance: Instance,
    budget: OracleBudget = OracleBudget(),
    rel_tol: float = CAPACITY_REL_TOL,
) -> Solution:
    """Exact valuation-maximising selection via exhaustive enumeration."""
    budget.check(len(instance))
    start = time.perf_counter()
    mask = _best_feasible_mask(instance, instance.columns.valuation, rel_tol)
    ids = frozenset(_mask_ids(instance, mask))
    return Solution(
        retained_ids=ids,
        objective=retained_valuation(instance, ids),
        aggregate_demand=aggregate_demand(instance, ids),
        algorithm="oracle",
        elapsed=time.perf_counter() - start,
    )


def brute_force_cmin(
    instance: Instance,
    budget: OracleBudget = OracleBudget(),
    rel_tol: float = CAPACITY_REL_TOL,
) -> Solution:
    """Exact compensation-minimising curtailment via exhaustive enumeration.

    Minimising the compensation paid to curtailed customers is the same as
    maximising the compensation kept in the retained set; the empty retained
    set is always feasible, so an optimum always exists.
    """
    budget.check(len(instance))
    start = time.perf_counter()
    mask = _best_feasible_mask(instance, instance.columns.compensation, rel_tol)
    ids = frozenset(_mask_ids(instance, mask))
    return Solution(
        retained_ids=ids,
        objective=curtailed_compensation(instance, ids),
        aggregate_demand=aggregate_demand(instance, ids),
        algorithm="cmin_oracle",
        elapsed=time.perf_counter() - start,
    )


def lp_upper_bound(instance: Instance) -> float:
    """Optimum of the magnitude-relaxed fractional problem.

    Walk customers by descending efficiency, accumulating demand magnitudes;
    the first customer that would overflow the capacity is included
    fractionally and the walk stops.  If everything fits the bound is simply
    the total valuation.
    """
    cols = instance.columns
    order = scan_order(instance, SortKey.EFFICIENCY_DESC)
    capacity = instance.capacity
    taken_mag = 0.0
    value = 0.0
    for i in order:
        m = cols.mag_list[i]
        if taken_mag + m <= capacity:
            taken_mag += m
            value += cols.valuation_list[i]
        else:
            # break customer: m > 0 here since zero-magnitude demands always fit
            return value + (capacity - taken_mag) * cols.valuation_list[i] / m
    return value
