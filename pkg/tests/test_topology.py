import numpy as np
import pytest

from qgraph.errors import NotSpectrallyEquilateral, ValidationError
from qgraph.graph_core import (
    CombinatorialGraph,
    betti,
    bond_scattering,
    cycle_graph,
    incidence_s,
    incidence_t,
    path_graph,
    tau_matrix,
    tetrahedron,
)
from qgraph.model import MetricGraph, equilateral, with_constant_potential
from qgraph.secular import bond_secular_matrix
from qgraph.topology import (
    Cycle,
    construct_topological_state,
    cycle_fixed_vector,
    cycle_from_vertices,
    dirichlet_eigen_test,
    fixed_space,
    fundamental_cycles,
    harmonic_residual,
    spectrally_equilateral_cycles,
)


def test_fundamental_cycle_counts(corpus):
    assert fundamental_cycles(path_graph(4)) == []
    assert len(fundamental_cycles(cycle_graph(3))) == 1
    assert len(fundamental_cycles(tetrahedron())) == 3
    for g in corpus:
        assert len(fundamental_cycles(g)) == betti(g)


def test_double_edge_is_a_two_cycle():
    g = CombinatorialGraph(2, ((0, 1), (0, 1)))
    (c,) = fundamental_cycles(g)
    assert len(c) == 2


def test_cycle_validation():
    g = tetrahedron()
    with pytest.raises(ValidationError):
        Cycle((0, 3)).validate(g)  # 0->1 then 1->2 ok, but does not close
    with pytest.raises(ValidationError):
        Cycle((0, 6)).validate(g)  # edge and its own reversal
    with pytest.raises(ValidationError):
        Cycle((0,)).validate(g)


def test_triangle_fixed_vector():
    g = cycle_graph(3)
    x = cycle_fixed_vector(fundamental_cycles(g)[0], g)
    np.testing.assert_array_equal(np.abs(x), np.ones(6))
    np.testing.assert_array_equal(x[:3], -x[3:])
    np.testing.assert_allclose(bond_scattering(g) @ x, x, atol=1e-15)


def test_quadrilateral_fixed_vector():
    g = tetrahedron()
    x = cycle_fixed_vector(cycle_from_vertices(g, (0, 1, 2, 3)), g)
    assert np.count_nonzero(x) == 8
    assert np.abs(bond_scattering(g) @ x - x).max() <= 1e-14


def test_fixed_vectors_are_linear():
    g = tetrahedron()
    a = cycle_fixed_vector(cycle_from_vertices(g, (0, 1, 2)), g)
    b = cycle_fixed_vector(cycle_from_vertices(g, (0, 2, 3)), g)
    np.testing.assert_allclose(bond_scattering(g) @ (a + b), a + b, atol=1e-14)


@pytest.mark.parametrize("g, dim, odd", [(path_graph(3), 1, 0), (cycle_graph(3), 2, 1), (tetrahedron(), 4, 3)])
def test_fixed_space_small(g, dim, odd):
    fs = fixed_space(g)
    assert (fs.dim, fs.odd.shape[1]) == (dim, odd)


def test_fixed_space_corpus(corpus):
    for g in corpus:
        fs = fixed_space(g)
        s, tau = bond_scattering(g), tau_matrix(g)
        assert fs.even.shape[1] == 1 and fs.odd.shape[1] == betti(g)
        # the even part is the constant vector
        c = fs.even[:, 0]
        np.testing.assert_allclose(c, c[0], atol=1e-12)
        for x in fs.basis.T:
            # S x = x gives S* x = x, S tau x = tau x, S* tau x = tau x
            tx = tau @ x
            assert np.abs(s.T @ x - x).max() <= 1e-10
            assert np.abs(s @ tx - tx).max() <= 1e-10
            assert np.abs(s.T @ tx - tx).max() <= 1e-10
            assert harmonic_residual(g, x) <= 1e-9
        dinv = np.diag(1.0 / g.degrees)
        for x in fs.odd.T:
            assert np.abs(incidence_s(g).T @ dinv @ incidence_t(g) @ x).max() <= 1e-10


def test_cycle_vectors_span_odd_part(corpus):
    for g in corpus:
        fs = fixed_space(g)
        cyc = np.array([cycle_fixed_vector(c, g) for c in fundamental_cycles(g)]).T
        if cyc.size == 0:
            assert fs.odd.shape[1] == 0
            continue
        proj = fs.odd @ (fs.odd.T @ cyc)
        assert np.abs(proj - cyc).max() <= 1e-10
        assert np.linalg.matrix_rank(cyc) == fs.odd.shape[1]


def test_dirichlet_test_examples():
    free = equilateral(path_graph(2))
    assert dirichlet_eigen_test(free.edge_transfer(0, 2.0))
    heavy = with_constant_potential(free, 0, 144.0)
    assert dirichlet_eigen_test(heavy.edge_transfer(0, 13.0))
    assert not dirichlet_eigen_test(MetricGraph(path_graph(2), (1.0,)).edge_transfer(0, 2.0))


def test_spectrally_equilateral_selection(tet):
    g = tet.graph
    cycles = [cycle_from_vertices(g, vs) for vs in ((0, 1, 2), (0, 2, 3), (0, 2, 1, 3), (0, 1, 2, 3))]
    assert len(spectrally_equilateral_cycles(tet, 1.0, cycles)) == 4
    short = tet.with_lengths([1.0] + [np.pi] * 5)
    kept = spectrally_equilateral_cycles(short, 1.0, cycles)
    assert [c.vertices(g) for c in kept] == [[0, 2, 3], [0, 2, 1, 3]]
    heavy = with_constant_potential(tet, 0, 144.0)
    assert spectrally_equilateral_cycles(heavy, 13.0, cycles) == cycles


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_triangle_and_quadrilateral_closure(tet, k):
    tri = construct_topological_state(cycle_from_vertices(tet.graph, (0, 1, 2)), tet, k)
    quad = construct_topological_state(cycle_from_vertices(tet.graph, (0, 1, 2, 3)), tet, k)
    assert (tri is not None) == (k % 2 == 0)
    assert quad is not None


def test_state_is_in_bond_null_space(tet):
    for vs in ((0, 1, 2, 3), (0, 2, 1, 3)):
        x = construct_topological_state(cycle_from_vertices(tet.graph, vs), tet, 1.0)
        assert np.linalg.norm(bond_secular_matrix(tet, 1.0) @ x) <= 1e-12
        assert abs(np.linalg.norm(x) - 1) < 1e-14
        np.testing.assert_array_equal(x[0::2], 0)


def test_state_through_potential_edge():
    # V = 144 on edge #1 with omega = 5 at k = 13: every edge factor is -1
    mg = with_constant_potential(equilateral(tetrahedron()), 0, 144.0)
    x = construct_topological_state(cycle_from_vertices(mg.graph, (0, 1, 2, 3)), mg, 13.0)
    assert x is not None
    assert np.linalg.norm(bond_secular_matrix(mg, 13.0) @ x) <= 1e-10


def test_state_requires_dirichlet_edges():
    mg = MetricGraph(tetrahedron(), (1.0,) + (np.pi,) * 5)
    with pytest.raises(NotSpectrallyEquilateral):
        construct_topological_state(cycle_from_vertices(mg.graph, (0, 1, 2)), mg, 1.0)
