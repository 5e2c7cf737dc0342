"""
A fixed three-node point that satisfies every McCormick and triangle inequality
and admits a positive semidefinite moment matrix, yet violates the perspective
inequality of plus loop 0 over the window {0, 1, 2}.

    z_0 = 1/4, z_1 = z_2 = 1/2, z_00 = 3/16, z_11 = z_22 = 1/2,
    z_12 = 1/4, z_01 = z_02 = 0

The support system forces z_012 = 0, and the perspective right-hand side is
then 1/4 > 3/16 = z_00.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from qpsoc.app.core.algebra import LinearForm, Monomial, evaluate
from qpsoc.app.core.hull import rlt_polytope
from qpsoc.app.core.relaxation import perspective_system, rhs_value, support_system

NODES = (0, 1, 2)

# Triangular factor and diagonal of an LDL' factorisation of the moment matrix
WITNESS_L = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.25, 1.0, 0.0, 0.0],
    [0.5, -1.0, 1.0, 0.0],
    [0.5, -1.0, -1.0, 1.0],
])
WITNESS_D = np.array([1.0, 0.125, 0.125, 0.0])


def z(*nodes: int) -> Monomial:
    return Monomial.subset(nodes)


def zz(i: int) -> Monomial:
    return Monomial.loop_of(i)


def witness_point() -> Dict[Monomial, float]:
    return {
        z(0): 0.25, z(1): 0.5, z(2): 0.5,
        z(0, 1): 0.0, z(0, 2): 0.0, z(1, 2): 0.25,
        zz(0): 3 / 16, zz(1): 0.5, zz(2): 0.5,
    }


def moment_matrix(point: Dict[Monomial, float]) -> np.ndarray:
    """[[1, z'], [z, Y]] with Y_ii = z_ii and Y_ij = z_ij."""
    A = np.eye(len(NODES) + 1)
    for i in NODES:
        A[0, i + 1] = A[i + 1, 0] = point[z(i)]
        A[i + 1, i + 1] = point[zz(i)]
    for i, j in itertools.combinations(NODES, 2):
        A[i + 1, j + 1] = A[j + 1, i + 1] = point[z(i, j)]
    return A


def triangle_forms() -> Tuple[LinearForm, ...]:
    """Triangle inequalities of the Boolean quadric polytope, as forms >= 0."""
    forms = []
    for i, j, k in ((0, 1, 2), (1, 0, 2), (2, 0, 1)):
        # z_ij + z_ik <= z_i + z_jk
        forms.append(
            LinearForm.of(z(i)) + LinearForm.of(z(j, k))
            - LinearForm.of(z(i, j)) - LinearForm.of(z(i, k))
        )
    # z_0 + z_1 + z_2 - z_01 - z_02 - z_12 <= 1
    forms.append(
        LinearForm(1.0, {z(0): -1.0, z(1): -1.0, z(2): -1.0, z(0, 1): 1.0, z(0, 2): 1.0, z(1, 2): 1.0})
    )
    return tuple(forms)


def extended_triangle_forms(weight: float, loop_weight: float) -> Tuple[LinearForm, ...]:
    """weight * (z_i - z_ij - z_ik) + loop_weight * z_ii + z_jk, rotated over i."""
    out = []
    for i, j, k in ((0, 1, 2), (1, 0, 2), (2, 0, 1)):
        out.append(LinearForm(0.0, {
            z(i): weight,
            zz(i): loop_weight,
            z(i, j): -weight,
            z(i, k): -weight,
            z(j, k): 1.0,
        }))
    return tuple(out)


def forced_interval(point: Dict[Monomial, float], m: Monomial) -> Tuple[float, float]:
    """Interval of values for m allowed by the support system of its node set."""
    lo, hi = -np.inf, np.inf
    for form in support_system(m.nodes).inequalities:
        coeff = form.terms.get(m, 0.0)
        rest = evaluate(LinearForm(form.constant, {v: c for v, c in form.terms.items() if v != m}), point)
        if coeff > 0:
            lo = max(lo, -rest / coeff)
        elif coeff < 0:
            hi = min(hi, rest / -coeff)
    return float(lo), float(hi)


@dataclass
class WitnessReport:
    lhs: float
    rhs: float
    mccormick_ok: bool
    triangle_ok: bool
    ldl_error: float
    d_nonnegative: bool
    z012_interval: Tuple[float, float]
    loop_upper_ok: bool
    extended_triangle_weight2: Tuple[float, ...]
    extended_triangle_weight4: Tuple[float, ...]

    @property
    def separated(self) -> bool:
        return self.lhs < self.rhs


def witness_compare_sdp(tol: float = 1e-12) -> WitnessReport:
    point = witness_point()

    mccormick = [
        form
        for i, j in itertools.combinations(NODES, 2)
        for form in rlt_polytope((i, j)).linear
    ]
    mccormick_ok = all(evaluate(f, point) >= -tol for f in mccormick)
    triangle_ok = all(evaluate(f, point) >= -tol for f in triangle_forms())

    A = moment_matrix(point)
    ldl_error = float(np.abs(WITNESS_L @ np.diag(WITNESS_D) @ WITNESS_L.T - A).max())

    top = z(*NODES)
    lo, hi = forced_interval(point, top)
    point[top] = lo

    p, _ = perspective_system(0, NODES)
    return WitnessReport(
        lhs=evaluate(p.lhs, point),
        rhs=rhs_value(p, point),
        mccormick_ok=mccormick_ok,
        triangle_ok=triangle_ok,
        ldl_error=ldl_error,
        d_nonnegative=bool(np.all(WITNESS_D >= 0)),
        z012_interval=(lo, hi),
        loop_upper_ok=all(point[zz(i)] <= point[z(i)] + tol for i in NODES),
        extended_triangle_weight2=tuple(evaluate(f, point) for f in extended_triangle_forms(2.0, 1.0)),
        extended_triangle_weight4=tuple(evaluate(f, point) for f in extended_triangle_forms(4.0, 4.0)),
    )
