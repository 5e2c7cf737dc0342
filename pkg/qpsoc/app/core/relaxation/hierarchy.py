"""
Level-r hierarchy of perspective relaxations.

For every plus loop i, every window M subset N(i) with i in M and
|M| = min(r, |N(i)|) contributes its lifted perspective inequality and support
system. Smaller windows are implied by larger ones and are not emitted. Box,
pairwise RLT (McCormick) and minus-loop constraints are always included.
"""

import itertools
import logging
from typing import Iterator, Tuple

from qpsoc.app.core.errors import RelaxationError
from qpsoc.app.core.hull.blocks import minus_loop_constraints, rlt_polytope
from qpsoc.app.core.instance import LoopGraph, neighborhood
from qpsoc.app.core.relaxation.perspective import build_block_system
from qpsoc.app.core.relaxation.system import ConstraintSystem

logger = logging.getLogger(__name__)


def windows(g: LoopGraph, i: int, r: int) -> Iterator[Tuple[int, ...]]:
    """Windows of size min(r, |N(i)|) containing i, in lexicographic order."""
    hood = sorted(neighborhood(g, i))
    size = min(r, len(hood))
    others = [k for k in hood if k != i]
    for rest in itertools.combinations(others, size - 1):
        yield tuple(sorted(rest + (i,)))


def hierarchy(g: LoopGraph, r: int) -> ConstraintSystem:
    if r < 1:
        raise RelaxationError(f"hierarchy level must be at least 1, got {r}")

    system = ConstraintSystem()
    for i in g.nodes:
        for form in rlt_polytope([i]).linear:
            system.add_linear(form)
    for i, j in sorted(g.edges):
        for form in rlt_polytope([i, j]).linear:
            system.add_linear(form)
    for form in minus_loop_constraints(g):
        system.add_linear(form)

    emitted = 0
    for i in sorted(g.plus_loops):
        for window in windows(g, i, r):
            p, support = build_block_system(g, i, window)
            system.add_perspective(p, support)
            emitted += 1

    logger.debug(
        "hierarchy level %d: %d perspective systems, %d linear rows",
        r, emitted, len(system.linear),
    )
    return system


def max_level(g: LoopGraph) -> int:
    """Smallest level at which every plus loop uses its full neighbourhood."""
    if not g.plus_loops:
        return 1
    return max(len(neighborhood(g, i)) for i in g.plus_loops)
