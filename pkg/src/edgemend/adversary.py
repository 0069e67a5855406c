"""Opinion attacks: pick nodes and pin their opinions to an extreme value.

The damage of pinning set S to value 1 is sum_{i in S} pi_i (1 - x_i),
the shift it forces on the asymptotic consensus. The budgeted attacker
maximizes that damage under per-node costs with a 0-1 knapsack.
"""
from __future__ import annotations

import numpy as np

from .spectral import _vec


def attack_random(x, n_targets: int, value: float = 1.0,
                  seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Pin ``n_targets`` uniformly chosen nodes to ``value``.

    Returns (x_tilde, targets); n_targets = 0 returns x unchanged.
    """
    x = np.asarray(x, dtype=np.float64)
    if not 0 <= n_targets <= x.size:
        raise ValueError(
            f"n_targets must lie in [0, {x.size}], got {n_targets}")
    rng = np.random.default_rng(seed)
    targets = np.sort(rng.choice(x.size, size=n_targets, replace=False))
    x_tilde = x.copy()
    x_tilde[targets] = value
    return x_tilde, targets


def attack_knapsack(pi, x, budget: int, costs=None, value: float = 1.0
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Most damaging attack under a cost budget (0-1 knapsack, exact).

    Node i contributes damage pi_i * (value - x_i) when pinned; nodes with
    zero damage are never selected. Among maximum-damage sets the cheapest
    is returned, and among those the lexicographically smallest, which
    makes the result reproducible and lets an exhaustive search match it
    exactly.

    Parameters
    ----------
    budget : int
        Non-negative total cost allowed.
    costs : array of int, optional
        Per-node positive integer costs, default all ones. Runtime is
        O(n * budget).

    Returns
    -------
    (x_tilde, chosen)
        Attacked opinions and the sorted array of pinned nodes.
    """
    p = _vec(pi)
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if budget < 0:
        raise ValueError("budget must be non-negative")
    if costs is None:
        costs = np.ones(n, dtype=np.int64)
    else:
        costs = np.asarray(costs, dtype=np.int64)
        if costs.shape != (n,):
            raise ValueError("costs must have one entry per node")
        if costs.min() <= 0:
            raise ValueError("costs must be positive integers")
    damage = p * (value - x)

    items = [i for i in range(n) if damage[i] > 0.0 and costs[i] <= budget]
    chosen = _knapsack_lex(damage, costs, budget, items)
    x_tilde = x.copy()
    x_tilde[chosen] = value
    return x_tilde, chosen


def _knapsack_lex(damage, costs, budget, items) -> np.ndarray:
    """0-1 knapsack returning the canonical optimum: maximum value, then
    minimum cost, then lexicographically smallest item set."""
    b = int(budget)
    ni = len(items)
    # best[t][rem] = (value, -cost) achievable with items[t:] and budget rem
    best_val = np.zeros((ni + 1, b + 1))
    best_cost = np.zeros((ni + 1, b + 1), dtype=np.int64)
    for t in range(ni - 1, -1, -1):
        i = items[t]
        v, c = damage[i], int(costs[i])
        best_val[t] = best_val[t + 1]
        best_cost[t] = best_cost[t + 1]
        for rem in range(c, b + 1):
            tv = v + best_val[t + 1][rem - c]
            tc = c + best_cost[t + 1][rem - c]
            if tv > best_val[t][rem] or (tv == best_val[t][rem]
                                         and tc < best_cost[t][rem]):
                best_val[t][rem] = tv
                best_cost[t][rem] = tc
    chosen = []
    rem = b
    for t in range(ni):
        i = items[t]
        v, c = damage[i], int(costs[i])
        if c <= rem:
            tv = v + best_val[t + 1][rem - c]
            tc = c + best_cost[t + 1][rem - c]
            # taking the earliest item whenever it stays optimal gives the
            # lexicographically smallest optimal set
            if tv == best_val[t][rem] and tc == best_cost[t][rem]:
                chosen.append(i)
                rem -= c
    return np.asarray(sorted(chosen), dtype=np.int64)
