"""
Brute-force global minimisation of small instances.

Some optimal solution has every node without a plus loop at 0 or 1, so those
nodes are enumerated. When the plus-loop nodes are pairwise non-adjacent each
of them is then a one-dimensional convex problem min a z^2 + b z over [0, 1],
solved in closed form. Otherwise a vertex cover of the plus-loop subgraph is
gridded and the remaining plus nodes are still solved in closed form.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from qpsoc.app.core.decomposition import stable_plus_set
from qpsoc.app.core.errors import OracleBudgetError
from qpsoc.app.core.instance import LoopGraph, SparseQP, build_graph

logger = logging.getLogger(__name__)

GRID_STEP = 1e-3
MAX_FREE_NODES = 24
MAX_POINTS = 2 ** 26
CHUNK = 2 ** 16


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmin: Tuple[float, ...]
    mode: str                              # "exact-stable" | "grid"
    grid_step: Optional[float] = None
    error_bound: float = 0.0               # grid value - error_bound <= true minimum


def dense_matrices(qp: SparseQP) -> Tuple[np.ndarray, np.ndarray]:
    Q = np.zeros((qp.n, qp.n))
    for i, q in qp.q_diag.items():
        Q[i, i] = q
    for (i, j), q in qp.q_off.items():
        Q[i, j] = Q[j, i] = q
    return Q, np.asarray(qp.c, dtype=float)


def lipschitz_bounds(qp: SparseQP) -> np.ndarray:
    """L_i bounding |df/dz_i| over the box: 2|q_ii| + 2 sum_j |q_ij| + |c_i|."""
    Q, c = dense_matrices(qp)
    return 2.0 * np.abs(Q).sum(axis=1) + np.abs(c)


def plus_cover(g: LoopGraph) -> List[int]:
    """Greedy vertex cover of the edges joining two plus-loop nodes."""
    uncovered = {(i, j) for i, j in g.edges if i in g.plus_loops and j in g.plus_loops}
    cover = []
    while uncovered:
        counts = {}
        for i, j in uncovered:
            counts[i] = counts.get(i, 0) + 1
            counts[j] = counts.get(j, 0) + 1
        best = min(counts, key=lambda v: (-counts[v], v))
        cover.append(best)
        uncovered = {e for e in uncovered if best not in e}
    return sorted(cover)


def closed_form_min(alpha: np.ndarray, beta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    argmin and min of alpha z^2 + beta z over [0, 1], alpha > 0.
    Candidates are compared in the order 0, stationary point, 1 so ties go to
    the smaller coordinate.
    """
    s = np.clip(-beta / (2.0 * alpha), 0.0, 1.0)
    points = np.stack([np.zeros_like(s), s, np.ones_like(s)])
    values = alpha * points * points + beta * points
    pick = np.argmin(values, axis=0)
    cols = np.arange(values.shape[1])
    return points[pick, cols], values[pick, cols]


def global_min(
    qp: SparseQP,
    grid_step: float = GRID_STEP,
    max_free_nodes: int = MAX_FREE_NODES,
    max_points: int = MAX_POINTS,
    force_grid: bool = False,
) -> OracleResult:
    g = build_graph(qp)
    plus = sorted(g.plus_loops)
    free = [v for v in g.nodes if v not in g.plus_loops]
    if len(free) > max_free_nodes:
        raise OracleBudgetError(
            f"{len(free)} nodes without a plus loop exceed the enumeration budget of {max_free_nodes}"
        )

    if force_grid:
        gridded = plus
    elif stable_plus_set(g):
        gridded = []
    else:
        gridded = plus_cover(g)
    closed = [v for v in plus if v not in gridded]

    steps = max(1, int(round(1.0 / grid_step)))
    spacing = 1.0 / steps
    grid = np.linspace(0.0, 1.0, steps + 1)
    radices = [2] * len(free) + [steps + 1] * len(gridded)
    total = int(np.prod(radices, dtype=object)) if radices else 1
    if total > max_points:
        raise OracleBudgetError(f"{total} enumeration points exceed the budget of {max_points}")

    Q, c = dense_matrices(qp)
    best_value = np.inf
    best_point = None

    for start in range(0, total, CHUNK):
        index = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        Z = np.zeros((len(index), qp.n))
        rest = index.copy()
        for node, radix in zip(free + gridded, radices):
            digit = rest % radix
            rest //= radix
            Z[:, node] = digit if radix == 2 else grid[digit]

        # closed-form nodes are pairwise non-adjacent: each sees only fixed neighbours
        for p in closed:
            beta = c[p] + 2.0 * (Z @ Q[:, p])
            Z[:, p], _ = closed_form_min(np.full(len(index), Q[p, p]), beta)

        values = np.einsum("bi,ij,bj->b", Z, Q, Z) + Z @ c
        k = int(np.argmin(values))
        if values[k] < best_value:
            best_value = float(values[k])
            best_point = Z[k].copy()

    if gridded:
        bound = float(spacing * lipschitz_bounds(qp)[gridded].sum())
        logger.warning(
            "plus loops are not a stable set; grid search over %d nodes (step %g), "
            "result is approximate within %.3e", len(gridded), spacing, bound,
        )
        return OracleResult(
            value=best_value,
            argmin=tuple(float(x) for x in best_point),
            mode="grid",
            grid_step=spacing,
            error_bound=bound,
        )
    return OracleResult(
        value=best_value,
        argmin=tuple(float(x) for x in best_point),
        mode="exact-stable",
    )
