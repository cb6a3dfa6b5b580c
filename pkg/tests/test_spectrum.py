import numpy as np
import pytest

from qgraph.errors import InconsistentCounterpart, NotARoot
from qgraph.graph_core import path_graph, tetrahedron
from qgraph.model import MetricGraph, equilateral
from qgraph.secular import bond_secular_det, oracle_secular, relative_sigma_min
from qgraph.spectrum import (
    classify,
    counterpart_from_coefficients,
    eigenvalues,
    find_roots,
    intersect,
    null_space,
    reconstruct_eigenfunction,
    scan,
    verify_topological,
)
from qgraph.topology import construct_topological_state, cycle_from_vertices


@pytest.fixture(scope="module")
def tet_scan():
    return scan(equilateral(tetrahedron()), 0.5, 3.5, 601)


def test_scan_layout(tet_scan):
    assert len(tet_scan) == 601
    assert np.all(np.diff(tet_scan.k) > 0)
    for col in (tet_scan.det_bond, tet_scan.det_oracle, tet_scan.sigma_bond):
        assert col.shape == (601,)


def test_scan_pole_flags_at_integers(tet_scan):
    flagged = tet_scan.k[tet_scan.is_pole]
    np.testing.assert_allclose(flagged, [1, 2, 3], atol=1e-12)
    assert np.all(np.isnan(tet_scan.det_vertex[tet_scan.is_pole]))
    assert np.all(np.isfinite(tet_scan.det_vertex[~tet_scan.is_pole]))


def test_free_bond_determinant_has_no_sign_changes(tet_scan):
    # roots of an |.|^2 determinant are even: found only through sigma minima
    d = tet_scan.det_bond
    assert np.all(d >= -1e-12 * np.abs(d).max())


def test_tetrahedron_roots(tet_scan):
    roots = [r.k for r in find_roots(tet_scan)]
    kstar = np.arccos(-1 / 3) / np.pi
    expect = sorted([1, 2, 3, kstar, 1 + (1 - kstar), 2 + kstar, 3 + (1 - kstar)])
    np.testing.assert_allclose(roots, expect, atol=1e-8)


def test_roots_satisfy_residual_invariant(tet_scan):
    scale = 1 + np.abs(tet_scan.det_bond).max()
    for r in find_roots(tet_scan):
        assert r.residual <= 1e-8 * scale
        assert relative_sigma_min(oracle_secular(tet_scan.graph, r.k)) < 1e-8


def test_path_roots():
    mg = MetricGraph(path_graph(2), (np.pi,))
    roots = [r.k for r in find_roots(scan(mg, 0.5, 2.5, 2001))]
    np.testing.assert_allclose(roots, [1, 2], atol=1e-8)


def test_empty_window(tet_incommensurate):
    res = scan(tet_incommensurate, 0.30, 0.31, 11)
    assert find_roots(res) == []
    assert find_roots(res, channel="oracle") == []


def test_scan_rejects_bad_window(tet):
    with pytest.raises(ValueError):
        scan(tet, 2.0, 1.0, 10)
    with pytest.raises(ValueError):
        scan(tet, 1.0, 2.0, 1)


def test_bond_and_oracle_roots_agree(tet_incommensurate):
    res = scan(tet_incommensurate, 0.3, 4.0, 1500)
    bond = [r.k for r in find_roots(res)]
    oracle = [r.k for r in find_roots(res, channel="oracle")]
    np.testing.assert_allclose(bond, oracle, atol=1e-7)
    assert all(bond_secular_det(tet_incommensurate, k) < 1e-8 for k in bond)


def test_null_space_basics():
    assert null_space(np.zeros((3, 3))).shape == (3, 3)
    assert null_space(np.eye(4)).shape == (4, 0)
    a = np.diag([1.0, 1e-12, 2.0])
    basis = null_space(a)
    assert basis.shape == (3, 1) and abs(abs(basis[1, 0]) - 1) < 1e-12


def test_intersect():
    e = np.eye(4)
    common = intersect(e[:, :2], e[:, 1:3])
    assert common.shape[1] == 1 and abs(abs(common[1, 0]) - 1) < 1e-12
    assert intersect(e[:, :1], e[:, 1:2]).shape[1] == 0


@pytest.mark.parametrize("k, mult, kind", [(1.0, 2, "topological"), (2.0, 4, "mixed"), (3.0, 2, "topological")])
def test_tetrahedron_classification(tet, k, mult, kind):
    rec = classify(tet, k)
    assert (rec.multiplicity, rec.kind) == (mult, kind)
    assert rec.oracle_multiplicity == mult
    assert rec.raw_nullity == 2 * mult
    assert rec.flags == []


def test_incommensurate_lowest_root_non_topological(tet_incommensurate):
    res = scan(tet_incommensurate, 0.2, 2.0, 1000)
    lowest = find_roots(res)[0].k
    rec = classify(tet_incommensurate, lowest)
    assert rec.kind == "non_topological" and rec.dim_topological == 0


def test_not_a_root(tet):
    with pytest.raises(NotARoot):
        classify(tet, 1.2345)


def test_edge_reordering_invariance(tet):
    perm = [3, 0, 5, 1, 4, 2]
    for k in (1.0, 2.0):
        a, b = classify(tet, k), classify(tet.reordered(perm), k)
        assert (a.multiplicity, a.dim_topological) == (b.multiplicity, b.dim_topological)


def test_length_rescaling(tet):
    big = tet.with_lengths([2 * np.pi] * 6)
    for k in (1.0, 2.0, 3.0):
        a, b = classify(tet, k), classify(big, k / 2)
        assert (a.kind, a.multiplicity, a.dim_topological) == (b.kind, b.multiplicity, b.dim_topological)


def test_topological_records_verify(tet):
    for rec in eigenvalues(tet, 0.5, 3.5, samples=601):
        if rec.dim_topological == 0:
            continue
        for x in rec.topological_basis.T:
            assert verify_topological(x, tet, rec.k)["passed"]


def test_verify_topological(tet, tet_incommensurate):
    x = construct_topological_state(cycle_from_vertices(tet.graph, (0, 1, 2, 3)), tet, 1.0)
    report = verify_topological(x, tet, 1.0)
    assert report["passed"] and report["bond_residual"] < 1e-12
    root = find_roots(scan(tet_incommensurate, 0.2, 2.0, 1000))[0].k
    y = classify(tet_incommensurate, root).basis[:, 0]
    bad = verify_topological(y, tet_incommensurate, root)
    assert not bad["passed"] and bad["max_vertex_value"] > 1e-3
    with pytest.raises(ValueError):
        verify_topological(np.zeros(24), tet, 1.0)


def test_reconstruct_quadrilateral_state(tet):
    c = cycle_from_vertices(tet.graph, (0, 1, 2, 3))
    x = construct_topological_state(c, tet, 1.0)
    ef = reconstruct_eigenfunction(x, tet, 1.0, samples_per_edge=33)
    on_cycle = {e % 6 for e in c.edges}
    for j in range(6):
        vals = ef.values[j]
        if j in on_cycle:
            shape = np.sin(ef.grids[j])
            ratio = vals[16] / shape[16]
            np.testing.assert_allclose(vals, ratio * shape, atol=1e-12)
        else:
            np.testing.assert_allclose(vals, 0, atol=1e-14)
    assert ef.continuity_residual <= 1e-7 and ef.kirchhoff_residual <= 1e-7


def test_reconstruct_path_cosine():
    mg = MetricGraph(path_graph(2), (np.pi,))
    rec = classify(mg, 1.0)
    assert rec.multiplicity == 1
    ef = reconstruct_eigenfunction(rec.basis[:, 0], mg, 1.0)
    vals = ef.values[0] / ef.values[0][0]
    np.testing.assert_allclose(vals, np.cos(ef.grids[0]), atol=1e-12)


def test_reconstruct_degree_three_kirchhoff(tet_incommensurate):
    root = find_roots(scan(tet_incommensurate, 0.2, 2.0, 1000))[0].k
    x = classify(tet_incommensurate, root).basis[:, 0]
    ef = reconstruct_eigenfunction(x, tet_incommensurate, root)
    assert ef.kirchhoff_residual <= 1e-7 and ef.continuity_residual <= 1e-7


def test_reconstruct_rejects_inconsistent_blocks(tet):
    with pytest.raises(InconsistentCounterpart):
        reconstruct_eigenfunction(np.random.default_rng(0).normal(size=24), tet, 1.0)


def test_counterpart_round_trip(tet_incommensurate):
    root = find_roots(scan(tet_incommensurate, 0.2, 2.0, 1000))[0].k
    x = classify(tet_incommensurate, root).basis[:, 0]
    coeffs = reconstruct_eigenfunction(x, tet_incommensurate, root).coefficients
    rebuilt = counterpart_from_coefficients(tet_incommensurate, root, coeffs)
    np.testing.assert_allclose(rebuilt, x, atol=1e-9)
