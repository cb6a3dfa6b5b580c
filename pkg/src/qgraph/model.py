"""The metric graph: combinatorics plus edge lengths and potentials."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .graph_core import CombinatorialGraph, glue_at_vertices
from .transfer import (
    ConstantPotential,
    Potential,
    ZeroPotential,
    check_potential,
    edge_transfer,
    reverse_transfer,
)


@dataclass(frozen=True)
class MetricGraph:
    graph: CombinatorialGraph
    lengths: tuple[float, ...]
    potentials: tuple[Potential, ...] = None
    vertex_names: tuple[str, ...] = None
    edge_ids: tuple[str, ...] = None
    # integrator step count for sampled potentials; None picks a default per edge
    steps: int | None = field(default=None, compare=False)

    def __post_init__(self):
        m = self.graph.m
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        if self.potentials is None:
            object.__setattr__(self, "potentials", (ZeroPotential(),) * m)
        else:
            object.__setattr__(self, "potentials", tuple(self.potentials))
        if self.vertex_names is None:
            object.__setattr__(self, "vertex_names", tuple(str(v) for v in range(self.graph.n)))
        if self.edge_ids is None:
            object.__setattr__(self, "edge_ids", tuple(f"e{j + 1}" for j in range(m)))
        if len(self.lengths) != m or len(self.potentials) != m or len(self.edge_ids) != m:
            raise ValidationError("lengths, potentials and edge ids must have one entry per edge")
        if len(self.vertex_names) != self.graph.n:
            raise ValidationError("one vertex name per vertex required")
        for length, pot in zip(self.lengths, self.potentials):
            check_potential(pot, length)

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def n(self) -> int:
        return self.graph.n

    def is_free(self) -> bool:
        """True when every edge carries V = 0."""
        return all(p.is_zero() for p in self.potentials)

    def edge_transfer(self, j: int, k: float) -> np.ndarray:
        """Transfer matrix of directed edge j (0 <= j < 2m)."""
        m = self.m
        base = edge_transfer(self.potentials[j % m], self.lengths[j % m], k, self.steps)
        return base if j < m else reverse_transfer(base)

    def transfer_matrices(self, k: float) -> np.ndarray:
        """(2m, 2, 2) stack in edge-major order; reversals are never re-integrated."""
        m = self.m
        forward = [
            edge_transfer(self.potentials[j], self.lengths[j], k, self.steps) for j in range(m)
        ]
        return np.array(forward + [reverse_transfer(p) for p in forward])

    def directed_length(self, e: int) -> float:
        return self.lengths[e % self.m]

    def with_lengths(self, lengths) -> "MetricGraph":
        return MetricGraph(self.graph, tuple(lengths), self.potentials, self.vertex_names, self.edge_ids)

    def reordered(self, perm) -> "MetricGraph":
        """Same metric graph with undirected edges listed in order ``perm``."""
        perm = list(perm)
        g = CombinatorialGraph(self.n, tuple(self.graph.edges[i] for i in perm))
        return MetricGraph(
            g,
            tuple(self.lengths[i] for i in perm),
            tuple(self.potentials[i] for i in perm),
            self.vertex_names,
            tuple(self.edge_ids[i] for i in perm),
        )


def equilateral(graph: CombinatorialGraph, length: float = np.pi) -> MetricGraph:
    return MetricGraph(graph, (length,) * graph.m)


def with_constant_potential(mg: MetricGraph, edge: int, value: float) -> MetricGraph:
    pots = list(mg.potentials)
    pots[edge] = ConstantPotential(float(value))
    return MetricGraph(mg.graph, mg.lengths, tuple(pots), mg.vertex_names, mg.edge_ids)


def glue(mg1: MetricGraph, v1: int, mg2: MetricGraph, v2: int) -> MetricGraph:
    """Metric version of glue_at_vertices; edge data follows the edges."""
    g = glue_at_vertices(mg1.graph, v1, mg2.graph, v2)
    names = list(mg1.vertex_names) + [
        f"T{name}" for w, name in enumerate(mg2.vertex_names) if w != v2
    ]
    ids = list(mg1.edge_ids) + [f"T{eid}" for eid in mg2.edge_ids]
    return MetricGraph(
        g,
        mg1.lengths + mg2.lengths,
        mg1.potentials + mg2.potentials,
        tuple(names),
        tuple(ids),
    )
