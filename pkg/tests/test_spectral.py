"""Eigenvector centrality, consensus values and vector file I/O."""

import numpy as np
import pytest

from edgemend import (GraphFormatError, NotConvergedError, consensus_value,
                      eigencentrality, from_dense, read_vector,
                      validate_opinions, write_vector)

from conftest import random_selfish_graph


def test_two_state_stationary_vector(chain2):
    cv = eigencentrality(chain2)
    np.testing.assert_allclose(cv.values, [4 / 7, 3 / 7], atol=1e-12)
    assert cv.residual <= 1e-12
    assert len(cv) == 2
    assert cv.values.sum() == pytest.approx(1.0)


def test_undirected_uniform_weights_degree_centrality():
    # symmetric uniform chain: pi_i = deg_i / (2 m)
    w = np.array([[0.5, 0.5, 0.0],
                  [1 / 3, 1 / 3, 1 / 3],
                  [0.0, 0.5, 0.5]])
    cv = eigencentrality(from_dense(w))
    deg = np.array([2.0, 3.0, 2.0])
    np.testing.assert_allclose(cv.values, deg / deg.sum(), atol=1e-10)


def test_stationarity_on_random_graph():
    g = random_selfish_graph(np.random.default_rng(11), 40)
    pi = eigencentrality(g).values
    np.testing.assert_allclose(pi @ g.to_dense(), pi, atol=1e-10)
    assert pi.min() > 0.0


def test_consensus_value(chain2):
    pi = eigencentrality(chain2).values
    assert consensus_value(pi, [1.0, 0.0]) == pytest.approx(4 / 7)
    assert consensus_value(pi, [1.0, 1.0]) == pytest.approx(1.0)
    assert consensus_value(pi, [0.0, 0.0]) == 0.0


def test_consensus_matches_iterated_dynamics(tri3):
    x = np.array([0.9, 0.1, 0.4])
    pi = eigencentrality(tri3).values
    w = tri3.to_dense()
    cur = x.copy()
    for _ in range(400):
        cur = w @ cur
    np.testing.assert_allclose(cur, consensus_value(pi, x), atol=1e-10)


def test_consensus_length_mismatch(chain2):
    pi = eigencentrality(chain2).values
    with pytest.raises(ValueError):
        consensus_value(pi, [1.0, 0.0, 0.5])


def test_not_converged_carries_state(chain2):
    with pytest.raises(NotConvergedError) as exc:
        eigencentrality(chain2, tol=1e-30, max_iter=1)
    assert exc.value.iterations == 1
    assert exc.value.residual > 1e-30


def test_validate_opinions():
    x = validate_opinions([0.0, 0.5, 1.0], n=3)
    assert x.dtype == np.float64
    with pytest.raises(ValueError):
        validate_opinions([0.2, 1.4])
    with pytest.raises(ValueError):
        validate_opinions([0.2, np.nan])
    with pytest.raises(ValueError):
        validate_opinions([0.2, 0.3], n=3)


def test_vector_file_roundtrip(tmp_path):
    path = tmp_path / "x.tsv"
    x = np.array([0.25, 1.0, 0.0, 1e-9])
    write_vector(x, path)
    np.testing.assert_array_equal(read_vector(path), x)
    np.testing.assert_array_equal(read_vector(path, n=4), x)


def test_read_vector_rejects_gaps(tmp_path):
    path = tmp_path / "x.tsv"
    path.write_text("0\t0.5\n2\t0.5\n")
    with pytest.raises(GraphFormatError):
        read_vector(path)


def test_read_vector_skips_comments(tmp_path):
    path = tmp_path / "x.tsv"
    path.write_text("# header\n\n0\t0.5\n1\t0.25\n")
    np.testing.assert_array_equal(read_vector(path), [0.5, 0.25])
