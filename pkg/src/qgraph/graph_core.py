"""Combinatorial graph model and the matrix zoo built on oriented edges.

Directed edges use the edge-major layout: for an undirected edge list of
length ``m``, directed edge ``j < m`` is the edge as given and ``j + m`` is its
reversal.  Every 2m- and 4m-dimensional object in the package uses this order.

Integer-valued matrices are returned as ``int64`` arrays so that identities
between them can be checked exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import lcm

import numpy as np

from .errors import ConsistencyError, ValidationError


@dataclass(frozen=True)
class CombinatorialGraph:
    """Finite connected multigraph without self-loops.

    ``edges`` holds the m undirected edges as (source, target) pairs; the
    orientation only fixes which directed copy gets index j and which j + m.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        n = self.n_vertices
        if n < 1:
            raise ValidationError("graph needs at least one vertex")
        if not self.edges:
            raise ValidationError("graph needs at least one edge")
        for j, (a, b) in enumerate(self.edges):
            if not (0 <= a < n and 0 <= b < n):
                raise ValidationError(f"edge {j} has an endpoint outside 0..{n - 1}")
            if a == b:
                raise ValidationError(
                    f"edge {j} is a self-loop at vertex {a}; subdivide it with a "
                    "degree-2 vertex instead"
                )
        deg = self.degrees
        if np.any(deg == 0):
            raise ValidationError(f"isolated vertices: {np.flatnonzero(deg == 0).tolist()}")
        if not _connected(n, self.edges):
            raise ValidationError("graph is not connected")

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def n(self) -> int:
        return self.n_vertices

    @property
    def source(self) -> np.ndarray:
        """s(e) for all 2m directed edges."""
        a = np.array([e[0] for e in self.edges], dtype=np.int64)
        b = np.array([e[1] for e in self.edges], dtype=np.int64)
        return np.concatenate([a, b])

    @property
    def target(self) -> np.ndarray:
        """t(e) for all 2m directed edges."""
        a = np.array([e[0] for e in self.edges], dtype=np.int64)
        b = np.array([e[1] for e in self.edges], dtype=np.int64)
        return np.concatenate([b, a])

    @property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def reversal(self, e: int) -> int:
        return (e + self.m) % (2 * self.m)

    def undirected(self, e: int) -> int:
        return e % self.m

    def edges_between(self, v: int, w: int) -> list[int]:
        """Directed edge indices running v -> w."""
        s, t = self.source, self.target
        return [e for e in range(2 * self.m) if s[e] == v and t[e] == w]


def _connected(n, edges) -> bool:
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


# -- incidence and reversal -------------------------------------------------


def incidence_t(g: CombinatorialGraph) -> np.ndarray:
    """n x 2m matrix with (δ_t*)[t(e), e] = 1."""
    mat = np.zeros((g.n, 2 * g.m), dtype=np.int64)
    mat[g.target, np.arange(2 * g.m)] = 1
    return mat


def incidence_s(g: CombinatorialGraph) -> np.ndarray:
    """n x 2m matrix with (δ_s*)[s(e), e] = 1."""
    mat = np.zeros((g.n, 2 * g.m), dtype=np.int64)
    mat[g.source, np.arange(2 * g.m)] = 1
    return mat


def tau_matrix(g: CombinatorialGraph) -> np.ndarray:
    m = g.m
    eye = np.eye(m, dtype=np.int64)
    zero = np.zeros((m, m), dtype=np.int64)
    return np.block([[zero, eye], [eye, zero]])


# -- vertex matrices --------------------------------------------------------


def degree_matrix(g: CombinatorialGraph) -> np.ndarray:
    dt = incidence_t(g)
    return dt @ dt.T


def adjacency(g: CombinatorialGraph) -> np.ndarray:
    """A = δ_t* δ_s; entry (v, w) counts edges joining v and w."""
    return incidence_t(g) @ incidence_s(g).T


def laplacian(g: CombinatorialGraph) -> np.ndarray:
    dt, ds = incidence_t(g), incidence_s(g)
    return dt @ (dt - ds).T


def normalized_laplacian(g: CombinatorialGraph) -> np.ndarray:
    """D^{-1/2} (δ_t* - δ_s*)(δ_t - δ_s) D^{-1/2}.

    Summing over both orientations of every edge makes this twice the usual
    symmetric normalized Laplacian I - D^{-1/2} A D^{-1/2}.
    """
    inc = (incidence_t(g) - incidence_s(g)).astype(float)
    d = 1.0 / np.sqrt(g.degrees.astype(float))
    return (d[:, None] * (inc @ inc.T)) * d[None, :]


def one_down_laplacian(g: CombinatorialGraph) -> np.ndarray:
    """(δ_t - δ_s) D^{-1} (δ_t* - δ_s*) on the 2m directed edges."""
    inc = (incidence_t(g) - incidence_s(g)).astype(float)
    return inc.T @ (inc / g.degrees[:, None])


def nonbacktracking(g: CombinatorialGraph) -> np.ndarray:
    """H[e', e] = 1 iff t(e) = s(e') and e' is not the reversal of e.

    Built as τ δ_t δ_s* τ - τ.  The trace-corrected expression printed in the
    factorization table counts backtracking pairs instead and is not used.
    """
    tau = tau_matrix(g)
    return tau @ incidence_t(g).T @ incidence_s(g) @ tau - tau


def nonbacktracking_enumerated(g: CombinatorialGraph) -> np.ndarray:
    s, t = g.source, g.target
    size = 2 * g.m
    mat = np.zeros((size, size), dtype=np.int64)
    for e in range(size):
        for f in range(size):
            if t[e] == s[f] and f != g.reversal(e):
                mat[f, e] = 1
    return mat


# -- bond scattering --------------------------------------------------------


def _scattering_scaled_entrywise(g: CombinatorialGraph) -> tuple[np.ndarray, int]:
    """L * S built case by case from the definition, L = lcm of the degrees."""
    deg = g.degrees
    scale = lcm(*deg.tolist())
    s, t = g.source, g.target
    size = 2 * g.m
    mat = np.zeros((size, size), dtype=np.int64)
    for e in range(size):
        for f in range(size):
            if s[f] != t[e]:
                continue
            transmit = 2 * scale // deg[t[e]]
            mat[f, e] = transmit - scale if f == g.reversal(e) else transmit
    return mat, scale


def _scattering_scaled_factorized(g: CombinatorialGraph) -> tuple[np.ndarray, int]:
    """L * S from S = 2 δ_s D^{-1} δ_t* - τ, in integers."""
    deg = g.degrees
    scale = lcm(*deg.tolist())
    dinv_scaled = np.diag(scale // deg)
    mat = 2 * incidence_s(g).T @ dinv_scaled @ incidence_t(g) - scale * tau_matrix(g)
    return mat, scale


def bond_scattering(g: CombinatorialGraph) -> np.ndarray:
    """The 2m x 2m bond-scattering matrix S.

    Built entrywise and from the incidence factorization; raises
    ConsistencyError if the two disagree.
    """
    direct, scale = _scattering_scaled_entrywise(g)
    factored, scale2 = _scattering_scaled_factorized(g)
    if scale != scale2 or not np.array_equal(direct, factored):
        raise ConsistencyError("entrywise and factorized bond-scattering matrices differ")
    return direct / scale


def betti(g: CombinatorialGraph) -> int:
    return g.m - g.n + 1


def glue_at_vertices(
    g1: CombinatorialGraph, v1: int, g2: CombinatorialGraph, v2: int
) -> CombinatorialGraph:
    """Disjoint union of g1 and g2 with v2 identified with v1.

    Vertices of g1 keep their indices; the remaining vertices of g2 follow in
    order.  Edges of g1 come first, then those of g2.
    """
    if not 0 <= v1 < g1.n:
        raise ValidationError(f"vertex {v1} not in first graph")
    if not 0 <= v2 < g2.n:
        raise ValidationError(f"vertex {v2} not in second graph")
    relabel = {}
    nxt = g1.n
    for w in range(g2.n):
        if w == v2:
            relabel[w] = v1
        else:
            relabel[w] = nxt
            nxt += 1
    edges = list(g1.edges) + [(relabel[a], relabel[b]) for a, b in g2.edges]
    return CombinatorialGraph(g1.n + g2.n - 1, tuple(edges))


# -- common graphs ----------------------------------------------------------


def path_graph(n_vertices: int) -> CombinatorialGraph:
    return CombinatorialGraph(n_vertices, tuple((i, i + 1) for i in range(n_vertices - 1)))


def cycle_graph(n_vertices: int) -> CombinatorialGraph:
    return CombinatorialGraph(
        n_vertices, tuple((i, (i + 1) % n_vertices) for i in range(n_vertices))
    )


def complete_graph(n_vertices: int) -> CombinatorialGraph:
    edges = [(i, j) for i in range(n_vertices) for j in range(i + 1, n_vertices)]
    return CombinatorialGraph(n_vertices, tuple(edges))


def tetrahedron() -> CombinatorialGraph:
    """K4 with edges (0,1), (0,2), (0,3), (1,2), (1,3), (2,3); edge #1 is (0,1)."""
    return complete_graph(4)


def random_connected_graph(rng: np.random.Generator, n_vertices: int, extra_edges: int):
    """Random spanning tree plus ``extra_edges`` distinct chords (simple graph)."""
    order = rng.permutation(n_vertices)
    edges = []
    present = set()
    for i in range(1, n_vertices):
        parent = order[rng.integers(0, i)]
        a, b = sorted((int(parent), int(order[i])))
        edges.append((a, b))
        present.add((a, b))
    candidates = [
        (a, b)
        for a in range(n_vertices)
        for b in range(a + 1, n_vertices)
        if (a, b) not in present
    ]
    extra = min(extra_edges, len(candidates))
    for idx in rng.choice(len(candidates), size=extra, replace=False):
        edges.append(candidates[int(idx)])
    return CombinatorialGraph(n_vertices, tuple(edges))
