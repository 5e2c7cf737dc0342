"""
Pointwise validation of generated constraint systems.

Auxiliary variables missing from a point are set to the closed perspective
value of their cone, the smallest value the cone allows.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Union

import numpy as np

from qpsoc.app.core.algebra import PERSPECTIVE_TOL, evaluate, perspective_value, perspective_values
from qpsoc.app.core.errors import SupportViolationError
from qpsoc.app.core.relaxation import (
    ConstraintSystem,
    rhs_value,
    rhs_values,
)

DEFAULT_TOL = 1e-9


@dataclass
class ConstraintViolation:
    kind: str                  # "linear" | "perspective" | "lifted" | "cone"
    index: int
    slack: float
    sample: Optional[int] = None
    detail: str = ""


Systems = Union[ConstraintSystem, Iterable[ConstraintSystem]]


def _systems(systems: Systems) -> List[ConstraintSystem]:
    if isinstance(systems, ConstraintSystem):
        return [systems]
    return list(systems)


def _with_auxiliaries(system: ConstraintSystem, point: Mapping, batch: bool,
                      perspective_tol: float = PERSPECTIVE_TOL) -> Dict:
    full = dict(point)
    for cone in system.cones:
        if cone.t in full:
            continue
        u = evaluate(cone.u, point)
        v = evaluate(cone.v, point)
        if batch:
            full[cone.t] = perspective_values(u, np.maximum(v, 0.0), perspective_tol)
        else:
            full[cone.t] = perspective_value(u, max(v, 0.0), perspective_tol)
    return full


def validate_constraints(systems: Systems, point: Mapping, tol: float = DEFAULT_TOL,
                         perspective_tol: float = PERSPECTIVE_TOL) -> List[ConstraintViolation]:
    """
    Violations of every system at one point. `tol` is the slack allowed on each
    row and on the support of the denominators; `perspective_tol` decides when a
    denominator counts as zero.
    """
    out: List[ConstraintViolation] = []
    for system in _systems(systems):
        for k, row in enumerate(system.linear):
            value = evaluate(row, point)
            if value < -tol:
                out.append(ConstraintViolation("linear", k, value, detail=str(row)))

        for k, p in enumerate(system.perspectives):
            try:
                rhs = rhs_value(p, point, support_tol=tol, tol=perspective_tol)
            except SupportViolationError as e:
                out.append(ConstraintViolation("perspective", k, -math.inf, detail=str(e)))
                continue
            value = evaluate(p.lhs, point) - rhs
            if value < -tol:
                out.append(
                    ConstraintViolation(
                        "perspective", k, value,
                        detail=f"{p.target} = {evaluate(p.lhs, point):.12g} < rhs {rhs:.12g}",
                    )
                )

        try:
            full = _with_auxiliaries(system, point, batch=False, perspective_tol=perspective_tol)
        except SupportViolationError:
            continue
        for k, row in enumerate(system.lifted):
            value = evaluate(row, full)
            if value < -tol:
                out.append(ConstraintViolation("lifted", k, value, detail=str(row)))
        for k, cone in enumerate(system.cones):
            t = full[cone.t]
            if math.isinf(t):
                continue
            u = evaluate(cone.u, full)
            v = evaluate(cone.v, full)
            excess = math.hypot(2.0 * u, t - v) - (t + v)
            if excess > tol:
                out.append(ConstraintViolation("cone", k, -excess, detail=str(cone.t)))
    return out


def validate_batch(systems: Systems, columns: Mapping, tol: float = DEFAULT_TOL,
                   perspective_tol: float = PERSPECTIVE_TOL) -> List[ConstraintViolation]:
    """Batch version; reports the first failing sample per constraint."""
    out: List[ConstraintViolation] = []

    def report(kind: str, k: int, values: np.ndarray, detail: str):
        bad = np.flatnonzero(values < -tol)
        if bad.size:
            s = int(bad[0])
            out.append(ConstraintViolation(kind, k, float(values[s]), sample=s, detail=detail))

    for system in _systems(systems):
        for k, row in enumerate(system.linear):
            report("linear", k, np.asarray(evaluate(row, columns), dtype=float), str(row))

        supported = True
        for k, p in enumerate(system.perspectives):
            try:
                rhs = rhs_values(p, columns, support_tol=tol, tol=perspective_tol)
            except SupportViolationError as e:
                out.append(ConstraintViolation("perspective", k, -math.inf, detail=str(e)))
                supported = False
                continue
            lhs = np.asarray(evaluate(p.lhs, columns), dtype=float)
            with np.errstate(invalid="ignore"):
                report("perspective", k, lhs - rhs, str(p.target))

        if not supported:
            continue
        full = _with_auxiliaries(system, columns, batch=True, perspective_tol=perspective_tol)
        for k, row in enumerate(system.lifted):
            with np.errstate(invalid="ignore"):
                report("lifted", k, np.asarray(evaluate(row, full), dtype=float), str(row))
        for k, cone in enumerate(system.cones):
            t = np.asarray(full[cone.t], dtype=float)
            u = np.asarray(evaluate(cone.u, full), dtype=float)
            v = np.asarray(evaluate(cone.v, full), dtype=float)
            finite = np.isfinite(t)
            excess = np.where(finite, np.hypot(2.0 * u, np.where(finite, t, 0.0) - v) - (t + v), 0.0)
            report("cone", k, -excess, str(cone.t))
    return out
