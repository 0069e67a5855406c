"""Closed-form centrality updates and edge scores for single insertions."""

import numpy as np
import pytest

from edgemend import (EdgePerturbation, MissingMfptError, add_edge_perturbed,
                      consensus_value, edge_score, eigencentrality, from_dense,
                      mfpt_estimate, mfpt_exact, perturbed_centrality,
                      write_scores_csv)

from conftest import absent_pairs, random_selfish_graph

X_TILDE = np.array([1.0, 0.0, 0.5])


def solve(g):
    pi = eigencentrality(g).values
    return pi, mfpt_exact(g, pi=pi)


def test_perturbed_centrality_matches_power(tri3):
    pi, m = solve(tri3)
    pred = perturbed_centrality(tri3, pi, m, 0, 2, 0.3).values
    g2 = add_edge_perturbed(tri3, EdgePerturbation(0, 2, 0.3))
    ref = eigencentrality(g2).values
    assert np.abs(pred - ref).max() <= 1e-8
    assert pred.sum() == pytest.approx(1.0, abs=1e-10)


def test_perturbed_centrality_random_graphs():
    rng = np.random.default_rng(17)
    for _ in range(10):
        g = random_selfish_graph(rng, int(rng.integers(5, 20)))
        pi, m = solve(g)
        pairs = absent_pairs(g)
        r, c = pairs[rng.integers(len(pairs))]
        theta = float(rng.uniform(0.05, 0.6))
        pred = perturbed_centrality(g, pi, m, r, c, theta).values
        g2 = add_edge_perturbed(g, EdgePerturbation(r, c, theta))
        ref = eigencentrality(g2).values
        assert np.abs(pred - ref).max() <= 1e-8


def test_perturbed_centrality_tiny_theta(tri3):
    pi, m = solve(tri3)
    pred = perturbed_centrality(tri3, pi, m, 0, 2, 1e-15).values
    assert np.abs(pred - pi).max() <= 1e-12


def test_edge_score_matches_consensus_drop(tri3):
    pi, m = solve(tri3)
    e = edge_score(tri3, pi, m, 0, 2, 0.3, X_TILDE)
    g2 = add_edge_perturbed(tri3, EdgePerturbation(0, 2, 0.3))
    pi2 = eigencentrality(g2).values
    drop = consensus_value(pi, X_TILDE) - consensus_value(pi2, X_TILDE)
    assert abs(e.score - drop) <= 1e-10
    assert e.mode == "exact"
    assert e.mfpt_source == "exact"
    assert e.nodes_used == 3


def test_edge_score_zero_on_uniform_opinions(tri3):
    # <pi, 1> = <pi', 1> = 1, so the predicted drop must vanish
    pi, m = solve(tri3)
    e = edge_score(tri3, pi, m, 0, 2, 0.3, np.ones(3))
    assert abs(e.score) <= 1e-9


def test_edge_score_tiny_theta(tri3):
    pi, m = solve(tri3)
    e = edge_score(tri3, pi, m, 0, 2, 1e-15, X_TILDE)
    assert abs(e.score) <= 1e-14


def test_truncated_full_subset_equals_exact(tri3):
    pi, m = solve(tri3)
    full = edge_score(tri3, pi, m, 0, 2, 0.3, X_TILDE)
    trunc = edge_score(tri3, pi, m, 0, 2, 0.3, X_TILDE,
                       node_subset=[0, 1, 2])
    assert trunc.mode == "truncated"
    assert trunc.score == pytest.approx(full.score, abs=1e-15)


def test_truncated_subset_must_contain_endpoints(tri3):
    pi, m = solve(tri3)
    with pytest.raises(ValueError):
        edge_score(tri3, pi, m, 0, 2, 0.3, X_TILDE, node_subset=[0, 1])


def test_existing_edge_rejected(tri3):
    pi, m = solve(tri3)
    with pytest.raises(ValueError):
        perturbed_centrality(tri3, pi, m, 0, 1, 0.3)


def test_non_selfish_row_needs_force():
    g = from_dense([[0.4, 0.6, 0.0],
                    [0.3, 0.5, 0.2],
                    [0.2, 0.2, 0.6]])
    pi, m = solve(g)
    with pytest.raises(ValueError):
        perturbed_centrality(g, pi, m, 0, 2, 0.3)
    out = perturbed_centrality(g, pi, m, 0, 2, 0.3, force=True)
    assert len(out) == 3


def test_walk_table_needs_all_columns(tri3):
    pi = eigencentrality(tri3).values
    t = mfpt_estimate(tri3, targets=[0, 2], walk_len=20_000, seed=3)
    with pytest.raises(MissingMfptError):
        perturbed_centrality(tri3, pi, t, 0, 2, 0.3)


def test_walk_table_scores_are_close(tri3):
    # a walk table covering r and c supports truncated scoring and lands
    # near the exact score
    pi, m = solve(tri3)
    t = mfpt_estimate(tri3, targets=[0, 2], walk_len=500_000, seed=3)
    ref = edge_score(tri3, pi, m, 0, 2, 0.3, X_TILDE, node_subset=[0, 2])
    est = edge_score(tri3, pi, t, 0, 2, 0.3, X_TILDE, node_subset=[0, 2])
    assert est.mfpt_source == "walk"
    assert abs(est.score - ref.score) <= 0.05 * abs(ref.score) + 1e-4


def test_scores_csv(tmp_path, tri3):
    pi, m = solve(tri3)
    e = edge_score(tri3, pi, m, 0, 2, 0.3, X_TILDE)
    path = tmp_path / "scores.csv"
    write_scores_csv([e], path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "r,c,theta,score,mode"
    r, c, theta, score, mode = lines[1].split(",")
    assert (r, c, mode) == ("0", "2", "exact")
    assert float(score) == pytest.approx(e.score)
