"""Shared fixtures and independent reference implementations.

The reference solvers here deliberately use different arithmetic and data
structures from the package (itertools enumeration with math.hypot, a
table-based knapsack DP) so they can serve as independent oracles.
"""

from __future__ import annotations

import math
import sys
from itertools import combinations

import numpy as np
import pytest

from curtail import ComplexDemand, Customer, Instance


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance criterion lines after the run, capture or not."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def build_instance(rows, capacity) -> Instance:
    """rows: (id, p, q, valuation[, compensation]) tuples."""
    customers = []
    for row in rows:
        if len(row) == 4:
            cid, p, q, u = row
            c = u
        else:
            cid, p, q, u, c = row
        customers.append(Customer(cid, ComplexDemand(p, q), u, c))
    return Instance(customers, capacity)


@pytest.fixture
def magnitude_trap() -> Instance:
    """Two customers, C=100: a tiny cheap one and a capacity-filling rich one.

    Magnitude-ascending greedy takes the tiny one and blocks the optimum.
    """
    return build_instance([(1, 1.0, 0.0, 1.0), (2, 100.0, 0.0, 100.0)], 100.0)


@pytest.fixture
def valuation_trap() -> Instance:
    """Five customers, C=10: one valuation-10 load that fills the capacity,
    four valuation-9 loads of magnitude 2 that jointly beat it."""
    rows = [(1, 10.0, 0.0, 10.0)] + [(k, 2.0, 0.0, 9.0) for k in range(2, 6)]
    return build_instance(rows, 10.0)


def reference_best_vmax(instance: Instance, rel_tol: float = 1e-9):
    """Exhaustive reference optimum via itertools; independent arithmetic.

    Returns (best_value, list of best retained-id tuples).
    """
    ids = sorted(c.id for c in instance.customers)
    by_id = {c.id: c for c in instance.customers}
    limit = instance.capacity * (1.0 + rel_tol)
    best = 0.0
    winners = [()]
    for r in range(1, len(ids) + 1):
        for combo in combinations(ids, r):
            p = sum(by_id[i].demand.active_p for i in combo)
            q = sum(by_id[i].demand.reactive_q for i in combo)
            if math.hypot(p, q) > limit:
                continue
            value = sum(by_id[i].valuation for i in combo)
            if value > best + 1e-12 * max(1.0, abs(best)):
                best = value
                winners = [combo]
            elif abs(value - best) <= 1e-12 * max(1.0, abs(best)):
                winners.append(combo)
    return best, winners


def knapsack_dp(weights: list[int], values: list[float], capacity: int) -> float:
    """Classic 0-1 knapsack over integer weights; independent DP oracle."""
    dp = [0.0] * (capacity + 1)
    for w, v in zip(weights, values):
        for cap in range(capacity, w - 1, -1):
            cand = dp[cap - w] + v
            if cand > dp[cap]:
                dp[cap] = cand
    return dp[capacity]


def random_instance(
    rng: np.random.Generator,
    n: int,
    max_theta: float = math.radians(36.0),
    magnitude_range=(0.5, 8.0),
    value_range=(0.1, 100.0),
    capacity_fraction=(0.15, 0.75),
    equal_compensation: bool = True,
) -> Instance:
    """Small synthetic instance with a binding capacity."""
    mags = rng.uniform(*magnitude_range, n)
    phases = rng.uniform(0.0, max_theta, n)
    p = mags * np.cos(phases)
    q = mags * np.sin(phases)
    u = rng.uniform(*value_range, n)
    comp = u if equal_compensation else rng.uniform(*value_range, n)
    # per-customer magnitudes via math.hypot, matching the Instance validator
    actual_max = max(math.hypot(float(p[k]), float(q[k])) for k in range(n))
    capacity = max(actual_max, float(rng.uniform(*capacity_fraction)) * float(mags.sum()))
    customers = [
        Customer(k, ComplexDemand(float(p[k]), float(q[k])), float(u[k]), float(comp[k]))
        for k in range(n)
    ]
    return Instance(customers, capacity)
