"""
Perspective inequalities for a plus loop i over a window M of its neighbourhood.

    z_ii >= sum_{J subset M, J contains i} ell(J, M-J)^2 / ell(J-{i}, M-J)

accompanied by the support system ell(J, M-J) >= 0 for every J subset M, which
keeps the denominators nonnegative. Each term lifts to a rotated cone
t(J) * ell(J-{i}, M-J) >= ell(J, M-J)^2.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, List, Mapping, Optional, Tuple

import numpy as np

from qpsoc.app.core.algebra import (
    PERSPECTIVE_TOL,
    Auxiliary,
    LinearForm,
    Monomial,
    ell,
    evaluate,
    perspective_value,
    perspective_values,
    subsets,
    switch_form,
)
from qpsoc.app.core.errors import RelaxationError, SupportViolationError
from qpsoc.app.core.instance import LoopGraph, neighborhood

logger = logging.getLogger(__name__)

SUPPORT_TOL = 1e-9


@dataclass(frozen=True)
class PerspectiveTerm:
    pattern: Tuple[int, ...]        # J, always containing the target node
    numerator: LinearForm           # ell(J, M-J)
    denominator: LinearForm         # ell(J-{i}, M-J)


@dataclass(frozen=True)
class PerspectiveInequality:
    node: int
    window: Tuple[int, ...]
    terms: Tuple[PerspectiveTerm, ...]
    lhs: Optional[LinearForm] = None
    switched: bool = False

    def __post_init__(self):
        if self.lhs is None:
            object.__setattr__(self, "lhs", LinearForm.of(self.target))

    @property
    def target(self) -> Monomial:
        return Monomial.loop_of(self.node)

    def auxiliary(self, term: PerspectiveTerm) -> Auxiliary:
        window = "-".join(str(i) for i in self.window)
        pattern = "-".join(str(i) for i in term.pattern)
        suffix = "_s" if self.switched else ""
        return Auxiliary(f"t_{self.node}_M{window}_J{pattern}{suffix}")


@dataclass(frozen=True)
class SupportSystem:
    window: Tuple[int, ...]
    patterns: Tuple[Tuple[int, ...], ...]
    inequalities: Tuple[LinearForm, ...]


@dataclass(frozen=True)
class RotatedConeConstraint:
    """t * v >= u^2 with t >= 0; v >= 0 comes from the support system."""
    t: Auxiliary
    v: LinearForm
    u: LinearForm


def support_system(window: Iterable[int]) -> SupportSystem:
    window = tuple(sorted(set(window)))
    patterns = tuple(subsets(window))
    forms = tuple(ell(j, set(window).difference(j)) for j in patterns)
    return SupportSystem(window=window, patterns=patterns, inequalities=forms)


def perspective_system(i: int, window: Iterable[int]) -> Tuple[PerspectiveInequality, SupportSystem]:
    """Perspective inequality and support system for target i and window M (no graph checks)."""
    window = tuple(sorted(set(window)))
    if i not in window:
        raise RelaxationError(f"window {list(window)} does not contain node {i}")

    others = tuple(k for k in window if k != i)
    terms = []
    for k in subsets(others):
        pattern = tuple(sorted(k + (i,)))
        rest = set(window).difference(pattern)
        terms.append(
            PerspectiveTerm(
                pattern=pattern,
                numerator=ell(pattern, rest),
                denominator=ell(k, rest),
            )
        )
    inequality = PerspectiveInequality(node=i, window=window, terms=tuple(terms))
    return inequality, support_system(window)


def build_block_system(g: LoopGraph, i: int, window: Iterable[int]) -> Tuple[PerspectiveInequality, SupportSystem]:
    window = set(window)
    if i not in g.plus_loops:
        raise RelaxationError(f"node {i} has no plus loop")
    if i not in window:
        raise RelaxationError(f"window {sorted(window)} does not contain node {i}")
    outside = window.difference(neighborhood(g, i))
    if outside:
        raise RelaxationError(
            f"window nodes {sorted(outside)} are not in the neighbourhood of {i}"
        )
    return perspective_system(i, window)


def lift_to_soc(p: PerspectiveInequality) -> Tuple[LinearForm, List[RotatedConeConstraint]]:
    """lhs - sum_J t(J) >= 0 plus one rotated cone per term."""
    cones = []
    inequality = p.lhs
    for term in p.terms:
        t = p.auxiliary(term)
        inequality = inequality - LinearForm.of(t)
        cones.append(RotatedConeConstraint(t=t, v=term.denominator, u=term.numerator))
    return inequality, cones


def switch_inequality(p: PerspectiveInequality) -> PerspectiveInequality:
    """Apply z_i -> 1 - z_i to the target node. Denominators never involve it."""
    terms = tuple(
        replace(term, numerator=switch_form(term.numerator, p.node)) for term in p.terms
    )
    return replace(
        p,
        terms=terms,
        lhs=switch_form(p.lhs, p.node),
        switched=not p.switched,
    )


def _denominator(value, support_tol: float):
    if value < -support_tol:
        raise SupportViolationError(
            f"denominator {value:.3e} is below -{support_tol:g}: support inequality violated"
        )
    return max(value, 0.0)


def rhs_value(
    p: PerspectiveInequality,
    point: Mapping,
    support_tol: float = SUPPORT_TOL,
    tol: float = PERSPECTIVE_TOL,
) -> float:
    total = 0.0
    for term in p.terms:
        u = evaluate(term.numerator, point)
        v = _denominator(evaluate(term.denominator, point), support_tol)
        total += perspective_value(u, v, tol)
        if math.isinf(total):
            break
    return total


def rhs_values(
    p: PerspectiveInequality,
    columns: Mapping,
    support_tol: float = SUPPORT_TOL,
    tol: float = PERSPECTIVE_TOL,
) -> np.ndarray:
    """rhs_value over a batch; `columns` maps each variable to an array of samples."""
    total = None
    for term in p.terms:
        u = np.asarray(evaluate(term.numerator, columns), dtype=float)
        v = np.asarray(evaluate(term.denominator, columns), dtype=float)
        if np.any(v < -support_tol):
            raise SupportViolationError(
                f"denominator {float(v.min()):.3e} is below -{support_tol:g}: "
                "support inequality violated"
            )
        value = perspective_values(u, np.maximum(v, 0.0), tol)
        total = value if total is None else total + value
    return total


def slack(
    p: PerspectiveInequality,
    point: Mapping,
    support_tol: float = SUPPORT_TOL,
    tol: float = PERSPECTIVE_TOL,
) -> float:
    rhs = rhs_value(p, point, support_tol, tol)
    if math.isinf(rhs):
        return -math.inf
    return evaluate(p.lhs, point) - rhs
