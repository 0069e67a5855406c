"""Random and budgeted opinion attacks."""

import itertools

import numpy as np
import pytest

from edgemend import attack_knapsack, attack_random, eigencentrality

from conftest import random_selfish_graph


def test_random_attack_pins_targets():
    x = np.linspace(0.0, 0.9, 10)
    x_tilde, targets = attack_random(x, 4, value=1.0, seed=3)
    assert targets.size == 4
    assert np.all(np.diff(targets) > 0)
    assert np.all(x_tilde[targets] == 1.0)
    untouched = np.setdiff1d(np.arange(10), targets)
    np.testing.assert_array_equal(x_tilde[untouched], x[untouched])
    assert x[0] == 0.0  # input not mutated


def test_random_attack_is_deterministic():
    x = np.linspace(0.0, 0.9, 10)
    a = attack_random(x, 4, seed=3)
    b = attack_random(x, 4, seed=3)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_random_attack_edge_counts():
    x = np.full(5, 0.5)
    x_tilde, targets = attack_random(x, 0, seed=1)
    assert targets.size == 0
    np.testing.assert_array_equal(x_tilde, x)
    _, targets = attack_random(x, 5, seed=1)
    assert list(targets) == [0, 1, 2, 3, 4]
    with pytest.raises(ValueError):
        attack_random(x, 6, seed=1)
    with pytest.raises(ValueError):
        attack_random(x, -1, seed=1)


def test_knapsack_unit_costs_take_top_damage():
    pi = np.array([0.4, 0.3, 0.2, 0.1])
    x = np.array([0.5, 0.0, 0.0, 0.0])
    # damage: 0.2, 0.3, 0.2, 0.1; budget 2 -> {1, 0} (0 beats 2 by id)
    _, chosen = attack_knapsack(pi, x, budget=2)
    assert list(chosen) == [0, 1]


def test_knapsack_skips_zero_damage():
    pi = np.full(4, 0.25)
    x = np.array([1.0, 1.0, 0.5, 1.0])
    x_tilde, chosen = attack_knapsack(pi, x, budget=3)
    assert list(chosen) == [2]
    assert x_tilde[2] == 1.0


def test_knapsack_all_ones_chooses_nothing():
    pi = np.full(4, 0.25)
    x = np.ones(4)
    x_tilde, chosen = attack_knapsack(pi, x, budget=4)
    assert chosen.size == 0
    np.testing.assert_array_equal(x_tilde, x)


def test_knapsack_budget_zero():
    pi = np.full(3, 1 / 3)
    _, chosen = attack_knapsack(pi, np.zeros(3), budget=0)
    assert chosen.size == 0


def test_knapsack_input_validation():
    pi = np.full(3, 1 / 3)
    x = np.zeros(3)
    with pytest.raises(ValueError):
        attack_knapsack(pi, x, budget=-1)
    with pytest.raises(ValueError):
        attack_knapsack(pi, x, budget=2, costs=[1, 1])
    with pytest.raises(ValueError):
        attack_knapsack(pi, x, budget=2, costs=[1, 0, 1])


def brute_knapsack(damage, costs, budget):
    """Canonical optimum by enumeration: max damage, min cost, lex."""
    n = len(damage)
    best = (0.0, 0, ())
    for r in range(n + 1):
        for sub in itertools.combinations(range(n), r):
            if any(damage[i] <= 0 for i in sub):
                continue
            cost = sum(costs[i] for i in sub)
            if cost > budget:
                continue
            key = (-sum(damage[i] for i in sub), cost, sub)
            if key < (-best[0], best[1], best[2]):
                best = (-key[0], key[1], sub)
    return list(best[2])


def test_knapsack_matches_enumeration_with_costs():
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = int(rng.integers(4, 10))
        g = random_selfish_graph(rng, n)
        pi = eigencentrality(g).values
        x = rng.random(n)
        costs = rng.integers(1, 4, size=n)
        budget = int(rng.integers(1, 7))
        _, chosen = attack_knapsack(pi, x, budget, costs=costs)
        damage = pi * (1.0 - x)
        assert list(chosen) == brute_knapsack(damage, costs, budget)


def test_knapsack_custom_value():
    pi = np.array([0.5, 0.5])
    x = np.array([0.2, 0.6])
    # pinning to 0.5: node 1 has negative damage, node 0 positive
    _, chosen = attack_knapsack(pi, x, budget=2, value=0.5)
    assert list(chosen) == [0]
