"""Graph construction, validation, perturbation and file round-trips."""

import numpy as np
import pytest

from edgemend import (EdgePerturbation, GraphFormatError, add_edge_perturbed,
                      from_dense, from_edges, generate_scale_free,
                      is_row_selfish, read_graph, selfish_violations,
                      validate, write_graph)
from edgemend.graph import row_sums

from conftest import random_selfish_graph


def test_from_dense_roundtrip(tri3):
    dense = tri3.to_dense()
    assert dense.shape == (3, 3)
    assert dense[0, 2] == 0.0
    np.testing.assert_allclose(row_sums(tri3), 1.0)
    assert tri3.n_edges == 8


def test_from_dense_rejects_nonsquare():
    with pytest.raises(ValueError):
        from_dense(np.ones((2, 3)) / 3.0)


def test_from_dense_rejects_bad_row_sum():
    with pytest.raises(GraphFormatError):
        from_dense([[0.5, 0.4], [0.4, 0.6]])


def test_from_edges_matches_dense(chain2):
    g = from_edges(2, [(0, 0, 0.7), (0, 1, 0.3), (1, 0, 0.4), (1, 1, 0.6)])
    np.testing.assert_array_equal(g.to_dense(), chain2.to_dense())


def test_from_edges_rejects_duplicates():
    with pytest.raises(GraphFormatError):
        from_edges(2, [(0, 0, 0.5), (0, 0, 0.5), (1, 1, 1.0)])


def test_edge_lookup(tri3):
    assert tri3.weight(1, 2) == pytest.approx(0.2)
    assert tri3.weight(0, 2) == 0.0
    assert tri3.has_edge(0, 1)
    assert not tri3.has_edge(0, 2)
    assert tri3.out_degree(0) == 2


def test_perturbation_rescales_row():
    g = from_dense([[0.6, 0.4, 0.0],
                    [0.3, 0.5, 0.2],
                    [0.2, 0.2, 0.6]])
    g2 = add_edge_perturbed(g, EdgePerturbation(0, 2, 0.5))
    np.testing.assert_allclose(g2.to_dense()[0], [0.3, 0.2, 0.5])
    # other rows and the original graph are untouched
    np.testing.assert_array_equal(g2.to_dense()[1:], g.to_dense()[1:])
    assert g.to_dense()[0, 2] == 0.0
    np.testing.assert_allclose(row_sums(g2), 1.0)


def test_perturbation_small_theta_limit(tri3):
    g2 = add_edge_perturbed(tri3, EdgePerturbation(0, 2, 1e-15))
    diff = np.abs(g2.to_dense() - tri3.to_dense()).max()
    assert diff <= 1e-14


def test_perturbation_rejects_existing_edge(tri3):
    with pytest.raises(ValueError):
        add_edge_perturbed(tri3, EdgePerturbation(0, 1, 0.1))


def test_perturbation_rejects_self_loop():
    with pytest.raises(ValueError):
        EdgePerturbation(1, 1, 0.1)


def test_perturbation_rejects_bad_theta():
    with pytest.raises(ValueError):
        EdgePerturbation(0, 2, 0.0)
    with pytest.raises(ValueError):
        EdgePerturbation(0, 2, 1.5)


def test_validate_accepts_selfish_chain(chain2):
    rep = validate(chain2)
    assert rep.ok
    assert rep.rationally_selfish
    assert rep.selfish_violations == []
    assert rep.max_row_sum_deviation <= 1e-12


def test_validate_flags_periodic_cycle():
    g = from_dense([[0.0, 1.0], [1.0, 0.0]])
    rep = validate(g)
    assert rep.strongly_connected
    assert not rep.aperiodic
    assert not rep.ok


def test_validate_flags_disconnected():
    g = from_dense([[1.0, 0.0], [0.0, 1.0]])
    rep = validate(g)
    assert not rep.strongly_connected
    assert not rep.ok


def test_selfish_violation_listed():
    g = from_dense([[0.4, 0.6], [0.4, 0.6]])
    assert list(selfish_violations(g)) == [0]
    assert not is_row_selfish(g, 0)
    assert is_row_selfish(g, 1)


def test_random_selfish_builder():
    rng = np.random.default_rng(3)
    g = random_selfish_graph(rng, 12)
    rep = validate(g)
    assert rep.ok and rep.rationally_selfish


def test_generator_is_deterministic():
    a = generate_scale_free(100, seed=7)
    b = generate_scale_free(100, seed=7)
    np.testing.assert_array_equal(a.indices, b.indices)
    np.testing.assert_array_equal(a.data, b.data)


def test_generator_output_is_usable():
    g = generate_scale_free(100, gamma=-2.5, seed=7)
    rep = validate(g)
    assert rep.ok and rep.rationally_selfish
    np.testing.assert_allclose(row_sums(g), 1.0, atol=1e-9)


def test_generator_minimal_size():
    g = generate_scale_free(2, seed=0)
    assert validate(g).ok
    with pytest.raises(ValueError):
        generate_scale_free(1, seed=0)
    with pytest.raises(ValueError):
        generate_scale_free(10, gamma=-0.5, seed=0)


def test_graph_file_roundtrip(tmp_path, tri3):
    path = tmp_path / "g.tsv"
    write_graph(tri3, path)
    g = read_graph(path)
    assert g.n == tri3.n
    np.testing.assert_array_equal(g.indices, tri3.indices)
    np.testing.assert_allclose(g.data, tri3.data, rtol=0, atol=0)


def test_read_graph_reports_line_numbers(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("0\t1\t1.0\n1\t0\tnot_a_number\n")
    with pytest.raises(GraphFormatError) as exc:
        read_graph(path)
    assert exc.value.line == 2


def test_read_graph_rejects_bad_row_sum(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("0\t0\t0.5\n0\t1\t0.4\n1\t0\t0.4\n1\t1\t0.6\n")
    with pytest.raises(GraphFormatError):
        read_graph(path)


def test_read_graph_rejects_empty(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("")
    with pytest.raises(GraphFormatError):
        read_graph(path)
