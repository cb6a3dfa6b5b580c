import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgraph.errors import ValidationError
from qgraph.graph_core import (
    CombinatorialGraph,
    _scattering_scaled_entrywise,
    _scattering_scaled_factorized,
    adjacency,
    betti,
    bond_scattering,
    complete_graph,
    cycle_graph,
    degree_matrix,
    glue_at_vertices,
    incidence_s,
    incidence_t,
    laplacian,
    nonbacktracking,
    nonbacktracking_enumerated,
    normalized_laplacian,
    one_down_laplacian,
    path_graph,
    random_connected_graph,
    tau_matrix,
    tetrahedron,
)


def test_edge_major_layout():
    g = path_graph(3)
    np.testing.assert_array_equal(g.source, [0, 1, 1, 2])
    np.testing.assert_array_equal(g.target, [1, 2, 0, 1])
    assert g.reversal(0) == 2 and g.reversal(3) == 1


@pytest.mark.parametrize(
    "n, edges, match",
    [
        (2, ((0, 0),), "subdivide"),
        (3, ((0, 1),), "isolated"),
        (4, ((0, 1), (2, 3)), "connected"),
        (2, ((0, 5),), "outside"),
    ],
)
def test_invalid_graphs(n, edges, match):
    with pytest.raises(ValidationError, match=match):
        CombinatorialGraph(n, edges)


def test_incidence_and_degrees(corpus):
    for g in corpus:
        dt, ds = incidence_t(g), incidence_s(g)
        assert dt.dtype == np.int64
        np.testing.assert_array_equal(dt.sum(axis=0), np.ones(2 * g.m))
        np.testing.assert_array_equal(ds, dt @ tau_matrix(g))
        np.testing.assert_array_equal(np.diag(degree_matrix(g)), g.degrees)


def test_laplacian_row_sums(corpus):
    for g in corpus:
        lap = laplacian(g)
        np.testing.assert_array_equal(lap.sum(axis=1), 0)
        np.testing.assert_array_equal(lap, degree_matrix(g) - adjacency(g))


def test_normalized_laplacian_is_twice_symmetric_normalized():
    g = tetrahedron()
    d = np.diag(1 / np.sqrt(g.degrees))
    expect = 2 * (np.eye(4) - d @ adjacency(g) @ d)
    np.testing.assert_allclose(normalized_laplacian(g), expect, atol=1e-14)


def test_one_down_laplacian_kills_cycles():
    g = cycle_graph(5)
    x = np.r_[np.ones(5), -np.ones(5)]
    np.testing.assert_allclose(one_down_laplacian(g) @ x, 0, atol=1e-14)


def test_nonbacktracking_matches_enumeration(corpus):
    for g in corpus:
        np.testing.assert_array_equal(nonbacktracking(g), nonbacktracking_enumerated(g))


def test_nonbacktracking_ihara_trace():
    # closed non-backtracking walks of length 3 on K4: each triangle, 2 directions, 3 starts
    h = nonbacktracking(tetrahedron())
    assert np.trace(np.linalg.matrix_power(h, 3)) == 4 * 2 * 3


def test_scattering_two_constructions_agree_exactly(corpus):
    for g in corpus:
        a, sa = _scattering_scaled_entrywise(g)
        b, sb = _scattering_scaled_factorized(g)
        assert sa == sb
        np.testing.assert_array_equal(a, b)


def test_tetrahedron_scattering_entries():
    s = bond_scattering(tetrahedron())
    assert s.shape == (12, 12)
    vals = set(np.round(s.ravel(), 12))
    assert vals == {round(2 / 3, 12), round(-1 / 3, 12), 0.0}


def test_path_scattering_is_tau():
    g = path_graph(2)
    np.testing.assert_array_equal(bond_scattering(g), tau_matrix(g))


def test_scattering_orthogonal_and_stochastic(corpus):
    for g in corpus:
        s = bond_scattering(g)
        tau = tau_matrix(g)
        assert np.abs(s.T @ s - np.eye(2 * g.m)).max() <= 1e-12
        np.testing.assert_allclose(s.sum(axis=0), 1, atol=1e-12)
        np.testing.assert_allclose(s.sum(axis=1), 1, atol=1e-12)
        assert np.abs(tau @ s @ tau - s.T).max() <= 1e-12


def test_betti():
    assert betti(tetrahedron()) == 3
    assert betti(path_graph(5)) == 0
    assert betti(complete_graph(10)) == 36


def test_glue_keeps_first_graph_labels():
    g = glue_at_vertices(path_graph(3), 1, tetrahedron(), 0)
    assert g.n == 6 and g.m == 8
    assert g.edges[:2] == ((0, 1), (1, 2))
    assert g.degrees[1] == 5


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9), st.integers(0, 6))
def test_random_graphs_are_valid(seed, n, extra):
    g = random_connected_graph(np.random.default_rng(seed), n, extra)
    assert g.n == n
    assert betti(g) == g.m - n + 1 >= 0
    assert len(set(g.edges)) == g.m
