"""Subset-enumeration booster over the greedy pair, tunable by epsilon.

For a precision parameter epsilon in (0, 1) the solver derives a subset size
m = min(ceil(1/epsilon) - 2, n) and runs two phases:

* Phase 1 keeps the best total valuation among all feasible subsets smaller
  than m (including the empty one).
* Phase 2 walks every feasible subset S of size exactly m, forces it into
  the solution, and lets the greedy pair fill up from the customers whose
  valuation does not exceed the smallest valuation in S.

The best candidate across both phases is returned.  The objective is at
least ``(1 - epsilon) * alignment_factor(theta)`` times the optimum, at the
cost of examining O(n^m) subsets; small epsilon buys accuracy with runtime.

With epsilon >= 1/2 the derived m is 0 and the enumeration degenerates; the
solver then falls back to a single unforced greedy-pair run, whose 1/2
guarantee already dominates 1 - epsilon.

Determinism: subsets are enumerated lexicographically by customer id;
a Phase 2 candidate replaces the incumbent on ties only if the incumbent
came from Phase 1, so equal-objective winners resolve to the
lexicographically smallest Phase 2 seed regardless of evaluation order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .greedy import gda, gda_forced
from .model import CAPACITY_REL_TOL, Instance, Solution, aggregate_demand


@dataclass(frozen=True)
class GsaConfig:
    """Precision knob for the enumeration booster."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")

    def max_subset_size(self, n: int) -> int:
        """m = min(ceil(1/epsilon) - 2, n), clamped to >= 0.

        The ceiling is guarded against float noise so that e.g. an epsilon
        of 1/3 (whose reciprocal lands just above 3.0) still yields m = 1.
        """
        m = math.ceil(1.0 / self.epsilon - 1e-9) - 2
        return max(0, min(m, n))


def gsa_subset_count(n: int, epsilon: float) -> int:
    """Number of subsets the solver will examine: sum of C(n, s) for s <= m.

    Python integers do not overflow, so the count is exact at any size; the
    CLI uses it to warn before runs that would take hours.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    m = GsaConfig(epsilon).max_subset_size(n)
    return sum(math.comb(n, s) for s in range(m + 1))


def _subset_fits(p_list, q_list, idxs, limit_sq: float) -> bool:
    p = 0.0
    q = 0.0
    for i in idxs:
        p += p_list[i]
        q += q_list[i]
    return p * p + q * q <= limit_sq


def _search(
    instance: Instance,
    config: GsaConfig,
    rel_tol: float,
) -> tuple[frozenset[int], float, tuple[int, ...] | None]:
    """Best retained set, its objective, and the winning Phase 2 seed (if any)."""
    cols = instance.columns
    n = len(instance)
    m = config.max_subset_size(n)
    limit_sq = instance.capacity_limit_sq(rel_tol)
    p_list, q_list, u_list = cols.p_list, cols.q_list, cols.valuation_list

    # positions in ascending id order, so combinations() is id-lexicographic
    by_id = np.lexsort((cols.id,)).tolist()

    best_ids: frozenset[int] = frozenset()
    best_objective = 0.0
    best_seed: tuple[int, ...] | None = None

    # Phase 1: plain best valuation over feasible subsets smaller than m.
    for size in range(m):
        for combo in combinations(by_id, size):
            idxs = sorted(combo)
            if not _subset_fits(p_list, q_list, idxs, limit_sq):
                continue
            value = 0.0
            for i in idxs:
                value += u_list[i]
            if value > best_objective:
                best_objective = value
                best_ids = frozenset(int(cols.id[i]) for i in idxs)

    # Phase 2: force each feasible size-m subset, fill up with the greedy
    # pair over the customers it dominates by valuation.
    for combo in combinations(by_id, m) if m > 0 else ():
        idxs = sorted(combo)
        if not _subset_fits(p_list, q_list, idxs, limit_sq):
            continue
        forced = frozenset(int(cols.id[i]) for i in idxs)
        floor = min(u_list[i] for i in idxs)
        pool = frozenset(
            int(cols.id[j]) for j in range(n) if u_list[j] <= floor
        ) - forced
        candidate = gda_forced(instance, forced, pool, rel_tol)
        better = candidate.objective > best_objective or (
            candidate.objective == best_objective and best_seed is None
        )
        if better:
            best_objective = candidate.objective
            best_ids = candidate.retained_ids
            best_seed = tuple(sorted(forced))

    return best_ids, best_objective, best_seed


def gsa(
    instance: Instance,
    config: GsaConfig,
    rel_tol: float = CAPACITY_REL_TOL,
) -> Solution:
    """Enumeration-boosted valuation maximiser; see the module docstring."""
    start = time.perf_counter()
    if config.max_subset_size(len(instance)) == 0:
        base = gda(instance, rel_tol)
        return Solution(
            retained_ids=base.retained_ids,
            objective=base.objective,
            aggregate_demand=base.aggregate_demand,
            algorithm="gsa",
            elapsed=time.perf_counter() - start,
        )
    ids, objective, _seed = _search(instance, config, rel_tol)
    return Solution(
        retained_ids=ids,
        objective=objective,
        aggregate_demand=aggregate_demand(instance, ids),
        algorithm="gsa",
        elapsed=time.perf_counter() - start,
    )
