"""
Tree decompositions: structure, validity, width/spread and the conditions
under which the exact block formulation stays small.

    C1  every bag holds at most one plus-loop node
    C2  width <= bound
    C3  spread of every plus-loop node <= bound

Tree decomposition JSON:
    {"bags": [[node, ...], ...], "edges": [[bag_idx, bag_idx], ...]}
"""

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ValidationError

from qpsoc.app.core.errors import DecompositionError
from qpsoc.app.core.instance import LoopGraph

logger = logging.getLogger(__name__)

DEFAULT_BOUND = 16


@dataclass(frozen=True)
class TreeDecomposition:
    bags: Tuple[FrozenSet[int], ...]
    edges: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        bags = tuple(frozenset(b) for b in self.bags)
        edges = tuple(sorted((min(a, b), max(a, b)) for a, b in self.edges))
        object.__setattr__(self, "bags", bags)
        object.__setattr__(self, "edges", edges)

        if not bags:
            raise DecompositionError("a tree decomposition needs at least one bag")
        for a, b in edges:
            if not (0 <= a < len(bags) and 0 <= b < len(bags)) or a == b:
                raise DecompositionError(f"tree edge ({a}, {b}) is not a pair of bag indices")
        if not nx.is_tree(self.tree()):
            raise DecompositionError(
                f"{len(edges)} edges on {len(bags)} bags do not form a tree"
            )

    def tree(self) -> nx.Graph:
        tree = nx.Graph()
        tree.add_nodes_from(range(len(self.bags)))
        tree.add_edges_from(self.edges)
        return tree

    def bags_containing(self, v: int) -> List[int]:
        return [k for k, bag in enumerate(self.bags) if v in bag]

    @property
    def width(self) -> int:
        return max(len(bag) for bag in self.bags) - 1


class TreeDecompositionDocument(BaseModel):
    bags: List[List[int]]
    edges: List[Tuple[int, int]] = []


def parse_td(text: str) -> TreeDecomposition:
    try:
        doc = TreeDecompositionDocument.model_validate_json(text)
    except ValidationError as e:
        raise DecompositionError(f"invalid tree decomposition document: {e}") from e
    return TreeDecomposition(bags=tuple(doc.bags), edges=tuple(doc.edges))


def dump_td(td: TreeDecomposition) -> str:
    doc = TreeDecompositionDocument(
        bags=[sorted(bag) for bag in td.bags],
        edges=[list(e) for e in td.edges],
    )
    return doc.model_dump_json()


@dataclass
class ValidityReport:
    """First counterexample per property; None means the property holds."""
    unknown_node: Optional[int] = None
    uncovered_node: Optional[int] = None
    uncovered_edge: Optional[Tuple[int, int]] = None
    disconnected_node: Optional[int] = None

    @property
    def covers_nodes(self) -> bool:
        return self.uncovered_node is None and self.unknown_node is None

    @property
    def covers_edges(self) -> bool:
        return self.uncovered_edge is None

    @property
    def connected(self) -> bool:
        return self.disconnected_node is None

    @property
    def valid(self) -> bool:
        return self.covers_nodes and self.covers_edges and self.connected

    def messages(self) -> List[str]:
        out = []
        if self.unknown_node is not None:
            out.append(f"bag node {self.unknown_node} is not a graph node")
        if self.uncovered_node is not None:
            out.append(f"node {self.uncovered_node} is in no bag")
        if self.uncovered_edge is not None:
            out.append(f"edge {self.uncovered_edge} lies in no bag")
        if self.disconnected_node is not None:
            out.append(f"bags containing node {self.disconnected_node} are not connected")
        return out


def validate_td(g: LoopGraph, td: TreeDecomposition) -> ValidityReport:
    report = ValidityReport()
    covered = frozenset().union(*td.bags)

    for v in sorted(covered):
        if not 0 <= v < g.node_count:
            report.unknown_node = v
            break
    for v in g.nodes:
        if v not in covered:
            report.uncovered_node = v
            break
    for i, j in sorted(g.edges):
        if not any(i in bag and j in bag for bag in td.bags):
            report.uncovered_edge = (i, j)
            break

    tree = td.tree()
    for v in sorted(covered):
        holding = td.bags_containing(v)
        if not nx.is_connected(tree.subgraph(holding)):
            report.disconnected_node = v
            break
    return report


def width_and_spread(td: TreeDecomposition) -> Tuple[int, Dict[int, int]]:
    """width = max |X| - 1; spread(v) = sum over bags X containing v of (|X| - 1)."""
    spread: Dict[int, int] = {}
    for bag in td.bags:
        for v in bag:
            spread[v] = spread.get(v, 0) + len(bag) - 1
    return td.width, dict(sorted(spread.items()))


def formulation_size(td: TreeDecomposition) -> int:
    """Upper bound on the monomials of the block formulation: sum 2^|X|."""
    return sum(1 << len(bag) for bag in td.bags)


def stable_plus_set(g: LoopGraph) -> bool:
    return not any(i in g.plus_loops and j in g.plus_loops for i, j in g.edges)


@dataclass
class ConditionReport:
    bound: int
    width: int
    plus_spread: Dict[int, int] = field(default_factory=dict)
    crowded_bag: Optional[int] = None
    estimated_size: int = 0

    @property
    def c1(self) -> bool:
        return self.crowded_bag is None

    @property
    def c2(self) -> bool:
        return self.width <= self.bound

    @property
    def c3(self) -> bool:
        return all(s <= self.bound for s in self.plus_spread.values())

    @property
    def max_plus_spread(self) -> int:
        return max(self.plus_spread.values(), default=0)

    def as_dict(self) -> dict:
        return {
            "C1": self.c1,
            "C2": self.c2,
            "C3": self.c3,
            "bound": self.bound,
            "width": self.width,
            "max_plus_spread": self.max_plus_spread,
            "crowded_bag": self.crowded_bag,
            "estimated_size": self.estimated_size,
        }


def check_conditions(g: LoopGraph, td: TreeDecomposition, bound: int = DEFAULT_BOUND) -> ConditionReport:
    width, spread = width_and_spread(td)
    report = ConditionReport(
        bound=bound,
        width=width,
        plus_spread={v: spread.get(v, 0) for v in sorted(g.plus_loops)},
        estimated_size=formulation_size(td),
    )
    for k, bag in enumerate(td.bags):
        if len(bag & g.plus_loops) > 1:
            report.crowded_bag = k
            break

    if not (report.c2 and report.c3):
        logger.warning(
            "tree decomposition exceeds budget %d (width %d, max plus spread %d); "
            "estimated formulation size %d",
            bound, width, report.max_plus_spread, report.estimated_size,
        )
    return report


def induced_subtree(td: TreeDecomposition, indices: Iterable[int]) -> TreeDecomposition:
    """Restriction to a connected set of bag indices, renumbered in index order."""
    keep = sorted(set(indices))
    if not keep or not nx.is_connected(td.tree().subgraph(keep)):
        raise DecompositionError(f"bag indices {keep} do not induce a connected subtree")
    position = {k: p for p, k in enumerate(keep)}
    edges = [(position[a], position[b]) for a, b in td.edges if a in position and b in position]
    return TreeDecomposition(bags=tuple(td.bags[k] for k in keep), edges=tuple(edges))


def fill_bags(g: LoopGraph, td: TreeDecomposition) -> LoopGraph:
    """The graph with every pair inside a bag added as an edge."""
    edges = set(g.edges)
    for bag in td.bags:
        edges.update(itertools.combinations(sorted(bag), 2))
    return replace(g, edges=frozenset(edges))
