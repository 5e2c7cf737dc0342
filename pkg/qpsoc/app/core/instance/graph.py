"""
Loop-graph representation of a sparse QP.

Nodes are variables, edges are nonzero off-diagonal coefficients, and each
nonzero diagonal coefficient is a plus loop (q_ii > 0) or a minus loop (q_ii < 0).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Tuple

import networkx as nx

from qpsoc.app.core.errors import InstanceError
from qpsoc.app.core.instance.parser import SparseQP


@dataclass(frozen=True)
class LoopGraph:
    node_count: int
    edges: FrozenSet[Tuple[int, int]]
    plus_loops: FrozenSet[int]
    minus_loops: FrozenSet[int]

    def __post_init__(self):
        if self.plus_loops & self.minus_loops:
            raise InstanceError("a node cannot carry both a plus and a minus loop")
        for i, j in self.edges:
            if i == j:
                raise InstanceError(f"self-pair ({i}, {j}) is not an edge")

    @property
    def nodes(self) -> range:
        return range(self.node_count)

    @cached_property
    def adjacency(self) -> Dict[int, FrozenSet[int]]:
        adj = {v: set() for v in self.nodes}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return {v: frozenset(nbrs) for v, nbrs in adj.items()}

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def to_networkx(self) -> nx.Graph:
        """Loopless graph (V, E); loops only matter through plus/minus sets."""
        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.edges)
        return graph

    def summary(self) -> Dict[str, int]:
        return {
            "V": self.node_count,
            "E": len(self.edges),
            "L+": len(self.plus_loops),
            "L-": len(self.minus_loops),
        }


def build_graph(qp: SparseQP) -> LoopGraph:
    return LoopGraph(
        node_count=qp.n,
        edges=frozenset(qp.q_off.keys()),
        plus_loops=frozenset(i for i, q in qp.q_diag.items() if q > 0),
        minus_loops=frozenset(i for i, q in qp.q_diag.items() if q < 0),
    )


def neighborhood(g: LoopGraph, i: int) -> FrozenSet[int]:
    """N(i): adjacent nodes, plus i itself when i carries a loop."""
    if not 0 <= i < g.node_count:
        raise InstanceError(f"node {i} out of range [0, {g.node_count})")
    nbrs = set(g.adjacency[i])
    if i in g.plus_loops or i in g.minus_loops:
        nbrs.add(i)
    return frozenset(nbrs)
