"""
Product points: z in [0,1]^V extended by z_S = prod z_i and z_ii = z_i^2.
"""

import itertools
from typing import Dict, Iterable, List

import numpy as np

from qpsoc.app.core.algebra import Monomial, product_point
from qpsoc.app.core.instance import LoopGraph

BATTERY_MAX_NODES = 4


def binary_battery(n: int) -> np.ndarray:
    """All 2^n binary points, in lexicographic order."""
    return np.array(list(itertools.product((0.0, 1.0), repeat=n))).reshape(-1, n)


def sample_box(g: LoopGraph, count: int, seed: int = 0) -> np.ndarray:
    """`count` uniform points, preceded by every box vertex when |V| <= 4."""
    rng = np.random.default_rng(seed)
    points = rng.random((count, g.node_count))
    if g.node_count <= BATTERY_MAX_NODES:
        points = np.vstack([binary_battery(g.node_count), points])
    return points


def sample_product_points(
    g: LoopGraph, monomials: Iterable[Monomial], count: int, seed: int = 0
) -> List[Dict[Monomial, float]]:
    monomials = list(monomials)
    return [
        {m: float(value) for m, value in product_point(z, monomials).items()}
        for z in sample_box(g, count, seed)
    ]


def sample_product_columns(
    g: LoopGraph, monomials: Iterable[Monomial], count: int, seed: int = 0
) -> Dict[Monomial, np.ndarray]:
    """Same samples as sample_product_points, one array per monomial."""
    Z = sample_box(g, count, seed)
    columns = {v: Z[:, v] for v in g.nodes}
    return product_point(columns, monomials)
