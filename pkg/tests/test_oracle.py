"""Exhaustive edge search and the subset-sum reduction gadget."""

import numpy as np
import pytest

from edgemend import (EdgePerturbation, add_edge_perturbed,
                      brute_force_edges, build_gadget, eigencentrality,
                      subset_sum_exists, validate, verify_gadget)

from conftest import absent_pairs, random_selfish_graph


def test_gadget_structure():
    inst = build_gadget([0.2, 0.3, 0.5], k=2, s=0.5)
    assert inst.n == 3
    assert inst.m == 2 * 9 - 6
    assert inst.graph.n == 6
    # clique on 6 nodes minus the 3 matching pairs, both directions
    assert inst.graph.n_edges == 6 * 5 - 6
    assert inst.candidates == [(0, 1), (2, 3), (4, 5)]
    np.testing.assert_array_equal(inst.x_tilde,
                                  [0.2, 0.2, 0.3, 0.3, 0.5, 0.5])
    np.testing.assert_allclose(inst.x, (0.5 + inst.m * inst.x_tilde)
                               / (inst.m + 2))
    rep = validate(inst.graph)
    assert rep.ok
    assert not rep.rationally_selfish  # uniform rows have no self-loop


def test_gadget_exact_subset_reaches_zero():
    inst = build_gadget([0.2, 0.3, 0.5], k=2, s=0.5)
    lhs, rhs = verify_gadget(inst, [(0, 1), (2, 3)])
    assert rhs == pytest.approx(0.0, abs=1e-15)
    assert lhs == pytest.approx(0.0, abs=1e-12)


def test_gadget_missed_subset_positive():
    inst = build_gadget([0.2, 0.3, 0.5], k=2, s=0.5)
    lhs, rhs = verify_gadget(inst, [0, 2])  # sums to 0.7
    assert rhs == pytest.approx(0.2 / (inst.m + inst.k))
    assert abs(lhs - rhs) <= 1e-12


def test_gadget_single_pair_instances():
    inst = build_gadget([1.0], k=1, s=1.0)
    assert inst.graph is None
    _, rhs = verify_gadget(inst, [0])
    assert rhs == pytest.approx(0.0, abs=1e-15)
    inst = build_gadget([0.9], k=1, s=0.5)
    _, rhs = verify_gadget(inst, [0])
    assert rhs == pytest.approx(0.4)


def test_gadget_identity_on_random_instances():
    rng = np.random.default_rng(77)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        z = rng.random(n)
        k = int(rng.integers(1, n + 1))
        s = float(rng.random())
        inst = build_gadget(z, k, s)
        idx = rng.choice(n, size=k, replace=False)
        lhs, rhs = verify_gadget(inst, [int(i) for i in idx])
        assert abs(lhs - rhs) <= 1e-12


def test_gadget_subset_size_enforced():
    inst = build_gadget([0.2, 0.3, 0.5], k=2, s=0.5)
    with pytest.raises(ValueError):
        verify_gadget(inst, [0])
    with pytest.raises(ValueError):
        verify_gadget(inst, [0, 0])
    with pytest.raises(ValueError):
        verify_gadget(inst, [0, 5])


def test_gadget_input_validation():
    with pytest.raises(ValueError):
        build_gadget([], k=1, s=0.5)
    with pytest.raises(ValueError):
        build_gadget([0.5, 1.2], k=1, s=0.5)
    with pytest.raises(ValueError):
        build_gadget([0.5], k=2, s=0.5)
    with pytest.raises(ValueError):
        build_gadget([0.5], k=1, s=1.5)


def test_subset_sum_exists():
    assert subset_sum_exists([0.2, 0.3, 0.5], 2, 0.5)
    assert not subset_sum_exists([0.2, 0.3, 0.5], 2, 0.6)
    assert subset_sum_exists([0.2, 0.3, 0.5], 1, 0.3)


def test_brute_force_finds_planted_optimum():
    # plant an instance where one candidate closes the gap exactly: use
    # the gadget with an exact subset sum and search over matching edges
    inst = build_gadget([0.25, 0.4, 0.6, 0.1], k=2, s=0.35)
    best, obj = brute_force_edges(inst.graph, 2, inst.x, inst.x_tilde,
                                  inst.candidates, undirected_uniform=True)
    assert sorted(best) == [(0, 1), (6, 7)]  # z_0 + z_3 = 0.35
    assert obj <= 1e-12


def test_brute_force_matches_direct_scan():
    rng = np.random.default_rng(21)
    g = random_selfish_graph(rng, 6)
    x = rng.random(6)
    y = x.copy()
    y[:2] = 1.0
    cand = absent_pairs(g)
    best, obj = brute_force_edges(g, 1, x, y, cand, theta=0.2)
    base = eigencentrality(g).values @ x
    objs = {}
    for (r, c) in cand:
        g2 = add_edge_perturbed(g, EdgePerturbation(r, c, 0.2))
        objs[(r, c)] = abs(eigencentrality(g2).values @ y - base)
    assert obj == pytest.approx(min(objs.values()), abs=1e-12)
    assert objs[tuple(best[0])] == pytest.approx(obj, abs=1e-12)


def test_brute_force_enumeration_cap():
    rng = np.random.default_rng(2)
    g = random_selfish_graph(rng, 30)
    cand = absent_pairs(g)
    with pytest.raises(ValueError):
        brute_force_edges(g, 6, np.zeros(30), np.ones(30), cand)
