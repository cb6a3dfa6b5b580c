"""Secular matrices and determinants.

Three routes to the spectrum of a metric graph with Kirchhoff conditions:

* the 4m bond form ``I - Phi(k) S_hat`` (S_hat = S kron I_2),
* the 2n vertex form ``A(k) = dt_hat* (2 (I + Phi tau_hat)^{-1} - I) dt_hat``,
  assembled either from the global inverse or edge by edge, and its n x n
  complex reduction for V = 0,
* a brute-force matching oracle on the 2m solution coefficients.

Counterpart vectors live in R^{4m}, two components per directed edge e: the
value and the derivative (along e) of the edge solution at the terminal
vertex t(e).  Then ``S_hat x`` holds value and outgoing derivative at the
source vertices, and ``x = Phi S_hat x`` is the matching condition.
"""

from __future__ import annotations

import numpy as np

from .errors import NonzeroPotential, PoleAtK
from .graph_core import bond_scattering, degree_matrix, incidence_t, tau_matrix
from .model import MetricGraph

I2 = np.eye(2)
J = np.diag([1.0, -1.0])

POLE_TOL = 1e-10


def hat(mat: np.ndarray) -> np.ndarray:
    """M kron I_2: edge (or vertex) index major, (value, derivative) minor."""
    return np.kron(np.asarray(mat, dtype=float), I2)


def s_hat(mg: MetricGraph) -> np.ndarray:
    return hat(bond_scattering(mg.graph))


def tau_hat(mg: MetricGraph) -> np.ndarray:
    return hat(tau_matrix(mg.graph))


def block_diag2(blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix from a (N, 2, 2) stack."""
    n = len(blocks)
    out = np.zeros((2 * n, 2 * n))
    r = 2 * np.arange(n)
    for i in (0, 1):
        for j in (0, 1):
            out[r + i, r + j] = blocks[:, i, j]
    return out


def phi_block(mg: MetricGraph, k: float, blocks=None) -> np.ndarray:
    if blocks is None:
        blocks = mg.transfer_matrices(k)
    return block_diag2(np.asarray(blocks))


# -- bond form --------------------------------------------------------------


def bond_secular_matrix(mg: MetricGraph, k: float, blocks=None) -> np.ndarray:
    size = 4 * mg.m
    return np.eye(size) - phi_block(mg, k, blocks) @ s_hat(mg)


def bond_secular_det(mg: MetricGraph, k: float) -> float:
    return float(np.linalg.det(bond_secular_matrix(mg, k)))


def one_plus_phi_tau_matrix(mg: MetricGraph, k: float) -> np.ndarray:
    return np.eye(4 * mg.m) + phi_block(mg, k) @ tau_hat(mg)


def one_plus_phi_tau_det(mg: MetricGraph, k: float) -> float:
    return float(np.linalg.det(one_plus_phi_tau_matrix(mg, k)))


def doubled_edge_factors(mg: MetricGraph, k: float, blocks=None) -> np.ndarray:
    """Per undirected edge, det of the 4x4 block of I + Phi tau_hat.

    With Phi_e = [[a, b], [c, d]] and det Phi_e = 1 this is -4 b c, which
    vanishes exactly when Phi_e Phi_{-e} has trace 2.
    """
    if blocks is None:
        blocks = mg.transfer_matrices(k)
    fwd = blocks[: mg.m]
    return -4.0 * fwd[:, 0, 1] * fwd[:, 1, 0]


def pole_edges(mg: MetricGraph, k: float, tol: float = POLE_TOL, blocks=None) -> list[int]:
    """Undirected edges on which k is (numerically) a doubled-edge periodic value."""
    if blocks is None:
        blocks = mg.transfer_matrices(k)
    fwd = blocks[: mg.m]
    scale = (1.0 + np.abs(fwd).max(axis=(1, 2))) ** 2
    bc = np.abs(fwd[:, 0, 1] * fwd[:, 1, 0])
    return np.flatnonzero(bc <= tol * scale).tolist()


def is_pole(mg: MetricGraph, k: float, tol: float = POLE_TOL, blocks=None) -> bool:
    return bool(pole_edges(mg, k, tol, blocks))


def reversal_operator(mg: MetricGraph, k: float) -> np.ndarray:
    """The involution R = Phi J_hat tau_hat on counterpart vectors.

    R maps the solution carried by -e, read along e, onto e.  It preserves
    null(I - Phi S_hat); its +1 part is the counterpart space of genuine
    eigenfunctions and its -1 part belongs to the twisted partner problem
    (see ``twisted_oracle_secular``).
    """
    m = mg.m
    return phi_block(mg, k) @ np.kron(np.eye(2 * m), J) @ tau_hat(mg)


# -- vertex form ------------------------------------------------------------


def _dt_hat(mg: MetricGraph) -> np.ndarray:
    return hat(incidence_t(mg.graph).T)


def vertex_secular_direct(
    mg: MetricGraph, k: float, tol: float = POLE_TOL, blocks=None
) -> np.ndarray:
    """2n x 2n vertex matrix from the global inverse of I + Phi tau_hat.

    The inverse is (I - Phi tau_hat)(I - BMat[Phi_e Phi_{-e}])^{-1}, whose
    second factor is block diagonal.
    """
    if blocks is None:
        blocks = mg.transfer_matrices(k)
    if is_pole(mg, k, tol, blocks):
        raise PoleAtK(k)
    m = mg.m
    phi = phi_block(mg, k, blocks)
    th = tau_hat(mg)
    laps = np.eye(2) - blocks @ np.roll(blocks, m, axis=0)
    lap_inv = block_diag2(np.linalg.inv(laps))
    q_inv = (np.eye(4 * m) - phi @ th) @ lap_inv
    dt = _dt_hat(mg)
    return dt.T @ (2.0 * q_inv - np.eye(4 * m)) @ dt


def vertex_secular_blocks(mg: MetricGraph, k: float, tol: float = POLE_TOL) -> np.ndarray:
    """Same matrix as vertex_secular_direct, assembled edge by edge.

    With W_e = Phi_{-e}^{-1} - Phi_e:
      diagonal block (v, v)  = sum over e into v of (Phi_{-e}^{-1} + Phi_e) W_e^{-1}
      block (v, w), v != w   = -2 * sum over e: v -> w of W_e^{-1}
    """
    blocks = mg.transfer_matrices(k)
    if is_pole(mg, k, tol, blocks):
        raise PoleAtK(k)
    g = mg.graph
    m = g.m
    s, t = g.source, g.target
    out = np.zeros((2 * g.n, 2 * g.n))
    for e in range(2 * m):
        phi_e = blocks[e]
        back_inv = np.linalg.inv(blocks[(e + m) % (2 * m)])
        w_inv = np.linalg.inv(back_inv - phi_e)
        v = t[e]
        out[2 * v : 2 * v + 2, 2 * v : 2 * v + 2] += (back_inv + phi_e) @ w_inv
        a, b = s[e], t[e]
        out[2 * a : 2 * a + 2, 2 * b : 2 * b + 2] -= 2.0 * w_inv
    return out


def vertex_secular_det(mg: MetricGraph, k: float, tol: float = POLE_TOL) -> float:
    return float(np.linalg.det(vertex_secular_direct(mg, k, tol)))


def ihara_rhs(mg: MetricGraph, k: float) -> float:
    """det(I + Phi tau_hat) (det D)^{-2} det A(k), equal to the bond determinant off poles."""
    det_d = float(np.prod(np.diag(degree_matrix(mg.graph)).astype(float)))
    return one_plus_phi_tau_det(mg, k) * vertex_secular_det(mg, k) / det_d**2


def ks_matrix(mg: MetricGraph, k: float, tol: float = POLE_TOL) -> np.ndarray:
    """n x n complex vertex-scattering matrix for V = 0.

    Diagonal: i * sum over edges at v of cot(k l) / deg v.
    Off-diagonal: -i * sum over edges v-w of 1 / (sqrt(deg v deg w) sin(k l)).
    """
    if not mg.is_free():
        raise NonzeroPotential("the n x n vertex-scattering form needs V = 0 on every edge")
    g = mg.graph
    deg = g.degrees.astype(float)
    sines = np.sin(k * np.asarray(mg.lengths))
    if np.any(np.abs(sines) <= tol):
        raise PoleAtK(k)
    cots = np.cos(k * np.asarray(mg.lengths)) / sines
    out = np.zeros((g.n, g.n), dtype=complex)
    for j, (a, b) in enumerate(g.edges):
        out[a, a] += 1j * cots[j] / deg[a]
        out[b, b] += 1j * cots[j] / deg[b]
        off = -1j / (np.sqrt(deg[a] * deg[b]) * sines[j])
        out[a, b] += off
        out[b, a] += off
    return out


def ks_regularized_det(mg: MetricGraph, k: float) -> float:
    """Real, pole-free version of det ks_matrix: i^{-n} det(KS) prod_e sin(k l_e).

    Each edge block of KS is rank one at its own poles, so the product
    cancels them; what remains vanishes exactly at eigenvalues off the pole set.
    """
    if not mg.is_free():
        raise NonzeroPotential("the n x n vertex-scattering form needs V = 0 on every edge")
    g = mg.graph
    sines = np.sin(k * np.asarray(mg.lengths))
    deg = g.degrees.astype(float)
    out = np.zeros((g.n, g.n))
    cots = np.cos(k * np.asarray(mg.lengths)) / sines
    out = np.zeros((g.n, g.n))
    for j, (a, b) in enumerate(g.edges):
        out[a, a] += cots[j] / deg[a]
        out[b, b] += cots[j] / deg[b]
        off = -1.0 / (np.sqrt(deg[a] * deg[b]) * sines[j])
        out[a, b] += off
        out[b, a] += off
    return float(np.linalg.det(out) * np.prod(sines))


# -- matching oracles -------------------------------------------------------


def _vertex_ends(mg: MetricGraph, k: float, twisted: bool):
    """Per vertex: (edge, value row, outgoing-derivative row) for each edge end.

    Unknowns are (A_j, B_j), the solution on edge j being A_j psi1 + B_j psi2
    along the stored orientation.  In the twisted problem the solution seen
    from the target end carries an extra sign.
    """
    g = mg.graph
    ends = [[] for _ in range(g.n)]
    sign = -1.0 if twisted else 1.0
    for j, (a, b) in enumerate(g.edges):
        phi = mg.edge_transfer(j, k)
        ends[a].append((j, np.array([1.0, 0.0]), np.array([0.0, 1.0])))
        ends[b].append((j, sign * phi[0], -sign * phi[1]))
    return ends


def oracle_secular(mg: MetricGraph, k: float) -> np.ndarray:
    """2m x 2m matching system: continuity and Kirchhoff at every vertex.

    Row count: sum over v of (d_v - 1) continuity rows plus n Kirchhoff rows.
    """
    m = mg.m
    rows = []
    for ends in _vertex_ends(mg, k, twisted=False):
        j0, val0, _ = ends[0]
        for j, val, _ in ends[1:]:
            row = np.zeros(2 * m)
            row[2 * j0 : 2 * j0 + 2] += val0
            row[2 * j : 2 * j + 2] -= val
            rows.append(row)
        row = np.zeros(2 * m)
        for j, _, der in ends:
            row[2 * j : 2 * j + 2] += der
        rows.append(row)
    return np.array(rows)


def oracle_det(mg: MetricGraph, k: float) -> float:
    return float(np.linalg.det(oracle_secular(mg, k)))


def twisted_oracle_secular(mg: MetricGraph, k: float) -> np.ndarray:
    """Matching system of the partner problem hidden in the 4m bond form.

    Edge solutions change sign under reversal; at each vertex the values seen
    from the incident ends sum to zero and the outgoing derivatives agree.
    For V = 0 the map (u, u') -> (u'/k, -k u) identifies it with the
    Kirchhoff problem, so it only doubles multiplicities there.
    """
    m = mg.m
    rows = []
    for ends in _vertex_ends(mg, k, twisted=True):
        row = np.zeros(2 * m)
        for j, val, _ in ends:
            row[2 * j : 2 * j + 2] += val
        rows.append(row)
        j0, _, der0 = ends[0]
        for j, _, der in ends[1:]:
            row = np.zeros(2 * m)
            row[2 * j0 : 2 * j0 + 2] += der0
            row[2 * j : 2 * j + 2] -= der
            rows.append(row)
    return np.array(rows)


def relative_sigma_min(mat: np.ndarray) -> float:
    """Smallest over largest singular value; 0 for an exactly singular matrix."""
    sv = np.linalg.svd(mat, compute_uv=False)
    return float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
