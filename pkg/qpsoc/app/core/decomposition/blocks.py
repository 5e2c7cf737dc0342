"""
Block decomposition of a tree decomposition.

Every plus-loop node is first confined to a single bag by merging the subtree of
bags that contain it. Leaves are then peeled off (smallest bag index first);
each becomes a loop-free RLT block or a block with exactly one plus loop. The
union of the block formulations, sharing monomials on bag intersections, plus
the minus-loop rows, is an exact extended formulation.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from qpsoc.app.core.algebra import MAX_BLOCK_NODES
from qpsoc.app.core.decomposition.tree import TreeDecomposition, validate_td
from qpsoc.app.core.errors import DecompositionError
from qpsoc.app.core.hull import (
    BlockFormulation,
    complete_hull_one_plus_loop,
    minus_loop_constraints,
    rlt_polytope,
)
from qpsoc.app.core.instance import LoopGraph
from qpsoc.app.core.relaxation import ConstraintSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Block:
    nodes: Tuple[int, ...]
    plus_node: Optional[int] = None

    def formulation(self) -> BlockFormulation:
        if self.plus_node is None:
            return rlt_polytope(self.nodes)
        return complete_hull_one_plus_loop(self.nodes, self.plus_node)


def _require_c1(g: LoopGraph, td: TreeDecomposition):
    for k, bag in enumerate(td.bags):
        crowded = bag & g.plus_loops
        if len(crowded) > 1:
            raise DecompositionError(
                f"bag {k} holds plus-loop nodes {sorted(crowded)}; "
                "at most one plus loop per bag is required"
            )


def contract_plus_subtrees(g: LoopGraph, td: TreeDecomposition) -> TreeDecomposition:
    _require_c1(g, td)
    report = validate_td(g, td)
    if not report.valid:
        raise DecompositionError("invalid tree decomposition: " + "; ".join(report.messages()))

    for i in sorted(g.plus_loops):
        holding = td.bags_containing(i)
        if len(holding) < 2:
            continue
        merged = min(holding)
        union = frozenset().union(*(td.bags[k] for k in holding))

        remap = {}
        bags = []
        for k, bag in enumerate(td.bags):
            if k in holding and k != merged:
                continue
            remap[k] = len(bags)
            bags.append(union if k == merged else bag)
        for k in holding:
            remap[k] = remap[merged]

        edges = {
            tuple(sorted((remap[a], remap[b])))
            for a, b in td.edges
            if remap[a] != remap[b]
        }
        td = TreeDecomposition(bags=tuple(bags), edges=tuple(sorted(edges)))
        logger.debug("merged %d bags around plus node %d into %s", len(holding), i, sorted(union))
    return td


def decompose(g: LoopGraph, td: TreeDecomposition) -> List[Block]:
    _require_c1(g, td)
    for i in sorted(g.plus_loops):
        count = len(td.bags_containing(i))
        if count != 1:
            raise DecompositionError(
                f"plus node {i} lies in {count} bags; contract plus subtrees first"
            )
    for k, bag in enumerate(td.bags):
        if len(bag) > MAX_BLOCK_NODES:
            raise DecompositionError(
                f"bag {k} has {len(bag)} nodes, above the {MAX_BLOCK_NODES}-node cap"
            )

    tree = td.tree()
    blocks = []
    while tree.number_of_nodes():
        leaf = min(k for k in tree.nodes if tree.degree(k) <= 1)
        bag = td.bags[leaf]
        plus = sorted(bag & g.plus_loops)
        blocks.append(Block(nodes=tuple(sorted(bag)), plus_node=plus[0] if plus else None))
        tree.remove_node(leaf)
    return blocks


def block_system(g: LoopGraph, blocks: List[Block]) -> ConstraintSystem:
    """Union of block formulations plus the minus-loop rows."""
    system = ConstraintSystem()
    for block in blocks:
        system.extend(block.formulation().to_system())
    for form in minus_loop_constraints(g):
        system.add_linear(form)
    return system
