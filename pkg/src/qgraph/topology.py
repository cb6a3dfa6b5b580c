"""Cycles, fixed vectors of the bond-scattering matrix, and topological states."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotSpectrallyEquilateral, ValidationError
from .graph_core import (
    CombinatorialGraph,
    betti,
    bond_scattering,
    one_down_laplacian,
    tau_matrix,
)
from .model import MetricGraph


@dataclass(frozen=True)
class Cycle:
    """Closed walk of directed edges e_1..e_k with t(e_j) = s(e_{j+1})."""

    edges: tuple[int, ...]

    def __len__(self):
        return len(self.edges)

    def validate(self, g: CombinatorialGraph) -> "Cycle":
        es = self.edges
        if len(es) < 2:
            raise ValidationError("a cycle needs at least two edges")
        if any(not 0 <= e < 2 * g.m for e in es):
            raise ValidationError("cycle refers to a missing edge")
        undirected = [e % g.m for e in es]
        if len(set(undirected)) != len(undirected):
            raise ValidationError("cycle uses an edge twice")
        s, t = g.source, g.target
        for a, b in zip(es, es[1:] + es[:1]):
            if t[a] != s[b]:
                raise ValidationError(f"cycle is not closed between edges {a} and {b}")
        return self

    def vertices(self, g: CombinatorialGraph) -> list[int]:
        s = g.source
        return [int(s[e]) for e in self.edges]


def cycle_from_vertices(g: CombinatorialGraph, vertices) -> Cycle:
    """Cycle through the given vertex sequence, closing back to the first.

    Uses the lowest-index directed edge between consecutive vertices.
    """
    vs = list(vertices)
    edges = []
    for a, b in zip(vs, vs[1:] + vs[:1]):
        options = [e for e in g.edges_between(a, b) if e % g.m not in {f % g.m for f in edges}]
        if not options:
            raise ValidationError(f"no unused edge from {a} to {b}")
        edges.append(options[0])
    return Cycle(tuple(edges)).validate(g)


def _bfs_tree(g: CombinatorialGraph):
    """Parent edge (directed, pointing to the child) of each vertex; root 0."""
    s, t = g.source, g.target
    out_edges = [[] for _ in range(g.n)]
    for e in range(2 * g.m):
        out_edges[s[e]].append(e)
    parent_edge = [-1] * g.n
    depth = [0] * g.n
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    tree = set()
    while queue:
        v = queue.popleft()
        for e in out_edges[v]:
            w = t[e]
            if not seen[w]:
                seen[w] = True
                parent_edge[w] = e
                depth[w] = depth[v] + 1
                tree.add(e % g.m)
                queue.append(w)
    return parent_edge, depth, tree


def fundamental_cycles(g: CombinatorialGraph) -> list[Cycle]:
    """One cycle per non-tree edge of a BFS spanning tree rooted at vertex 0.

    Each cycle runs along the chord in its stored orientation a -> b and
    returns from b to a through the tree.
    """
    parent_edge, depth, tree = _bfs_tree(g)
    s = g.source
    cycles = []
    for j, (a, b) in enumerate(g.edges):
        if j in tree:
            continue
        # climb from both ends to the lowest common ancestor
        up_from_b, down_to_a = [], []
        x, y = b, a
        while depth[x] > depth[y]:
            e = parent_edge[x]
            up_from_b.append(g.reversal(e))
            x = s[e]
        while depth[y] > depth[x]:
            e = parent_edge[y]
            down_to_a.append(e)
            y = s[e]
        while x != y:
            ex, ey = parent_edge[x], parent_edge[y]
            up_from_b.append(g.reversal(ex))
            down_to_a.append(ey)
            x, y = s[ex], s[ey]
        edges = (j, *up_from_b, *reversed(down_to_a))
        cycles.append(Cycle(tuple(int(e) for e in edges)).validate(g))
    assert len(cycles) == betti(g)
    return cycles


def cycle_fixed_vector(c: Cycle, g: CombinatorialGraph) -> np.ndarray:
    """+1 on the cycle's directed edges, -1 on their reversals, 0 elsewhere."""
    c.validate(g)
    x = np.zeros(2 * g.m)
    for e in c.edges:
        x[e] = 1.0
        x[g.reversal(e)] = -1.0
    return x


@dataclass(frozen=True)
class FixedSpace:
    even: np.ndarray  # columns: orthonormal basis of {S x = x, tau x = x}
    odd: np.ndarray  # columns: orthonormal basis of {S x = x, tau x = -x}

    @property
    def basis(self) -> np.ndarray:
        return np.hstack([self.even, self.odd])

    @property
    def dim(self) -> int:
        return self.even.shape[1] + self.odd.shape[1]


def fixed_space(g: CombinatorialGraph, tol: float = 1e-9) -> FixedSpace:
    """Null space of S - I split by the parity under edge reversal."""
    m = g.m
    smat = bond_scattering(g)
    eye = np.eye(m)
    # orthonormal bases of the tau = +1 and tau = -1 subspaces
    plus = np.vstack([eye, eye]) / np.sqrt(2)
    minus = np.vstack([eye, -eye]) / np.sqrt(2)
    parts = []
    for sub in (plus, minus):
        kernel = scipy.linalg.null_space((smat - np.eye(2 * m)) @ sub, rcond=tol)
        parts.append(sub @ kernel)
    return FixedSpace(even=parts[0], odd=parts[1])


def harmonic_residual(g: CombinatorialGraph, x: np.ndarray) -> float:
    """|| (δ_t - δ_s) D^{-1} (δ_t* - δ_s*) x ||_inf."""
    return float(np.abs(one_down_laplacian(g) @ x).max())


# -- spectrally equilateral cycles -----------------------------------------


def dirichlet_eigen_test(phi: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff k^2 is a Dirichlet eigenvalue of the edge: psi2(l) = 0."""
    return abs(phi[0, 1]) <= tol


def spectrally_equilateral_cycles(
    mg: MetricGraph, k: float, cycles, tol: float = 1e-9
) -> list[Cycle]:
    blocks = mg.transfer_matrices(k)
    return [c for c in cycles if all(dirichlet_eigen_test(blocks[e], tol) for e in c.edges)]


def construct_topological_state(
    c: Cycle, mg: MetricGraph, k: float, tol: float = 1e-9, closure_tol: float = 1e-9
):
    """Counterpart vector of a Dirichlet state supported on cycle ``c``, or None.

    On edge e_j the state is c_j psi2 along e_j.  Kirchhoff at t(e_j) forces
    c_{j+1} = c_j psi2'(l_j), so a state exists iff prod_j psi2'(l_j) = 1.
    The vector is normalised to unit Euclidean norm.
    """
    g = mg.graph
    c.validate(g)
    blocks = mg.transfer_matrices(k)
    if not all(dirichlet_eigen_test(blocks[e], tol) for e in c.edges):
        raise NotSpectrallyEquilateral(f"cycle {c.edges} is not spectrally equilateral at k={k}")
    slopes = [blocks[e][1, 1] for e in c.edges]
    if abs(np.prod(slopes) - 1.0) > closure_tol:
        return None
    x = np.zeros(4 * g.m)
    coef = 1.0
    for e, slope in zip(c.edges, slopes):
        r = g.reversal(e)
        # terminal data of e: (0, c psi2'(l)); of -e, at s(e): (0, -c)
        x[2 * e + 1] = coef * slope
        x[2 * r + 1] = -coef
        coef *= slope
    return x / np.linalg.norm(x)
