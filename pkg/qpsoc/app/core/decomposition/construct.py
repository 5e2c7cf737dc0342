"""
Constructive tree decompositions.

    acyclic       one bag per edge, wired along the forest
    cycle         bags {v_i, v_i+1, v_n} in a path, v_n without a plus loop
    vertex-cover  bags {v} + N(v) for v outside the cover, star around the cover bag
    min-degree    elimination-order heuristic, any graph
    auto          first of the above whose result keeps one plus node per bag
"""

import logging
from typing import Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx

from qpsoc.app.core.decomposition.tree import TreeDecomposition
from qpsoc.app.core.errors import DecompositionError
from qpsoc.app.core.instance import LoopGraph

logger = logging.getLogger(__name__)

STRATEGIES = ("acyclic", "cycle", "vertex-cover", "min-degree", "auto")


def _chain(roots: List[int]) -> List[Tuple[int, int]]:
    return [(roots[k], roots[k + 1]) for k in range(len(roots) - 1)]


def acyclic_td(g: LoopGraph) -> TreeDecomposition:
    graph = g.to_networkx()
    if not nx.is_forest(graph):
        raise DecompositionError("acyclic strategy needs a forest")

    bags: List[Set[int]] = []
    edges: List[Tuple[int, int]] = []
    roots: List[int] = []

    for component in sorted(nx.connected_components(graph), key=min):
        root = min(component)
        if len(component) == 1:
            roots.append(len(bags))
            bags.append({root})
            continue

        # bag of the edge joining each node to its parent; the root uses its first edge
        anchor: Dict[int, int] = {}
        queue = [root]
        seen = {root}
        while queue:
            p = queue.pop(0)
            for c in sorted(g.adjacency[p]):
                if c in seen:
                    continue
                seen.add(c)
                k = len(bags)
                bags.append({p, c})
                if p in anchor:
                    edges.append((anchor[p], k))
                else:
                    anchor[p] = k
                    roots.append(k)
                anchor[c] = k
                queue.append(c)

    edges.extend(_chain(roots))
    return TreeDecomposition(bags=tuple(bags), edges=tuple(edges))


def cycle_order(g: LoopGraph) -> List[int]:
    """Cycle nodes as v_1, ..., v_n with v_n the smallest node without a plus loop."""
    graph = g.to_networkx()
    n = g.node_count
    if n < 3 or len(g.edges) != n or not nx.is_connected(graph) or any(
        g.degree(v) != 2 for v in g.nodes
    ):
        raise DecompositionError("cycle strategy needs a single chordless cycle")

    free = [v for v in g.nodes if v not in g.plus_loops]
    if not free:
        raise DecompositionError("every cycle node carries a plus loop")
    last = free[0]

    order = [min(g.adjacency[last])]
    previous = last
    while len(order) < n - 1:
        current = order[-1]
        nxt = next(v for v in g.adjacency[current] if v != previous)
        previous = current
        order.append(nxt)
    return order + [last]


def cycle_td(g: LoopGraph) -> TreeDecomposition:
    order = cycle_order(g)
    last = order[-1]
    bags = tuple({order[k], order[k + 1], last} for k in range(len(order) - 2))
    edges = tuple((k, k + 1) for k in range(len(bags) - 1))
    return TreeDecomposition(bags=bags, edges=edges)


def greedy_cover(g: LoopGraph) -> Set[int]:
    """Vertex cover avoiding plus-loop nodes, greedy by degree."""
    cover: Set[int] = set()
    for i, j in g.edges:
        if i in g.plus_loops and j in g.plus_loops:
            raise DecompositionError(
                f"edge ({i}, {j}) joins two plus loops: no cover avoids them"
            )
        if i in g.plus_loops:
            cover.add(j)
        elif j in g.plus_loops:
            cover.add(i)

    uncovered = {e for e in g.edges if e[0] not in cover and e[1] not in cover}
    while uncovered:
        counts: Dict[int, int] = {}
        for i, j in uncovered:
            counts[i] = counts.get(i, 0) + 1
            counts[j] = counts.get(j, 0) + 1
        best = min(counts, key=lambda v: (-counts[v], v))
        cover.add(best)
        uncovered = {e for e in uncovered if best not in e}
    return cover


def vertex_cover_td(g: LoopGraph, cover: Optional[Iterable[int]] = None) -> TreeDecomposition:
    cover = greedy_cover(g) if cover is None else set(cover)
    if cover & g.plus_loops:
        raise DecompositionError(f"cover contains plus-loop nodes {sorted(cover & g.plus_loops)}")
    for i, j in g.edges:
        if i not in cover and j not in cover:
            raise DecompositionError(f"edge ({i}, {j}) is not covered")

    stable = [v for v in g.nodes if v not in cover]
    bags = [{v} | set(g.adjacency[v]) for v in stable]
    if not cover:
        return TreeDecomposition(bags=tuple(bags), edges=tuple(_chain(list(range(len(bags))))))

    hub = len(bags)
    bags.append(set(cover))
    return TreeDecomposition(bags=tuple(bags), edges=tuple((k, hub) for k in range(hub)))


def min_degree_td(g: LoopGraph) -> TreeDecomposition:
    graph = g.to_networkx()
    position: Dict[int, int] = {}
    bags: List[Set[int]] = []
    neighbours: List[Set[int]] = []

    while graph.number_of_nodes():
        v = min(graph.nodes, key=lambda u: (graph.degree(u), u))
        nbrs = set(graph.neighbors(v))
        position[v] = len(bags)
        bags.append({v} | nbrs)
        neighbours.append(nbrs)
        for a in nbrs:
            for b in nbrs:
                if a < b:
                    graph.add_edge(a, b)
        graph.remove_node(v)

    # parent of a bag: the bag of its earliest-eliminated remaining neighbour
    edges = []
    roots = []
    for k, nbrs in enumerate(neighbours):
        if nbrs:
            edges.append((k, min(position[u] for u in nbrs)))
        else:
            roots.append(k)
    edges.extend(_chain(roots))
    return TreeDecomposition(bags=tuple(bags), edges=tuple(edges))


def _keeps_plus_apart(g: LoopGraph, td: TreeDecomposition) -> bool:
    return all(len(bag & g.plus_loops) <= 1 for bag in td.bags)


def auto_td(g: LoopGraph) -> TreeDecomposition:
    fallback = None
    for build in (acyclic_td, cycle_td, min_degree_td, vertex_cover_td):
        try:
            td = build(g)
        except DecompositionError:
            continue
        if _keeps_plus_apart(g, td):
            return td
        fallback = fallback or td
    if fallback is None:
        raise DecompositionError("no construction applies to this graph")
    return fallback


def construct_td(g: LoopGraph, strategy: str = "auto", cover: Optional[Iterable[int]] = None) -> TreeDecomposition:
    if strategy == "acyclic":
        td = acyclic_td(g)
    elif strategy == "cycle":
        td = cycle_td(g)
    elif strategy == "vertex-cover":
        td = vertex_cover_td(g, cover)
    elif strategy == "min-degree":
        td = min_degree_td(g)
    elif strategy == "auto":
        td = auto_td(g)
    else:
        raise DecompositionError(
            f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}"
        )
    logger.debug("%s decomposition: %d bags, width %d", strategy, len(td.bags), td.width)
    return td
