"""
Exact convex-hull blocks.

rlt_polytope: the 2^n RLT inequalities ell(J, V-J) >= 0 of a loop-free complete
block. complete_hull_one_plus_loop: the same inequalities plus the perspective
inequality with window equal to the whole block. minus_loop_constraints: the
linear relaxation z_ii <= z_i of every minus loop, with its box.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from qpsoc.app.core.algebra import MAX_BLOCK_NODES, LinearForm, Monomial, subsets
from qpsoc.app.core.errors import MonomialError, RelaxationError
from qpsoc.app.core.instance import LoopGraph
from qpsoc.app.core.relaxation.perspective import (
    PerspectiveInequality,
    perspective_system,
    support_system,
)
from qpsoc.app.core.relaxation.system import ConstraintSystem


@dataclass(frozen=True)
class BlockFormulation:
    nodes: Tuple[int, ...]
    plus_node: Optional[int]
    linear: Tuple[LinearForm, ...]
    perspective: Optional[PerspectiveInequality]
    monomials: Tuple[Monomial, ...]

    def to_system(self) -> ConstraintSystem:
        system = ConstraintSystem()
        for form in self.linear:
            system.add_linear(form)
        if self.perspective is not None:
            system.add_perspective(self.perspective)
        return system


def _block_nodes(nodes: Iterable[int]) -> Tuple[int, ...]:
    nodes = tuple(sorted(set(nodes)))
    if not nodes:
        raise MonomialError("a block needs at least one node")
    if len(nodes) > MAX_BLOCK_NODES:
        raise MonomialError(
            f"block of {len(nodes)} nodes exceeds the {MAX_BLOCK_NODES}-node cap"
        )
    return nodes


def _subset_monomials(nodes: Tuple[int, ...]) -> Tuple[Monomial, ...]:
    found = [Monomial.subset(s) for s in subsets(nodes) if s]
    return tuple(sorted(found, key=Monomial.sort_key))


def rlt_polytope(nodes: Iterable[int]) -> BlockFormulation:
    nodes = _block_nodes(nodes)
    return BlockFormulation(
        nodes=nodes,
        plus_node=None,
        linear=support_system(nodes).inequalities,
        perspective=None,
        monomials=_subset_monomials(nodes),
    )


def complete_hull_one_plus_loop(nodes: Iterable[int], j: int) -> BlockFormulation:
    nodes = _block_nodes(nodes)
    if j not in nodes:
        raise RelaxationError(f"plus node {j} is not in block {list(nodes)}")
    perspective, support = perspective_system(j, nodes)
    return BlockFormulation(
        nodes=nodes,
        plus_node=j,
        linear=support.inequalities,
        perspective=perspective,
        monomials=_subset_monomials(nodes),
    )


def minus_loop_constraints(g: LoopGraph) -> List[LinearForm]:
    rows = []
    for i in sorted(g.minus_loops):
        z_i = LinearForm.of(Monomial.node(i))
        rows.append(z_i - LinearForm.of(Monomial.loop_of(i)))
        rows.append(z_i)
        rows.append(LinearForm(1.0) - z_i)
    return rows
