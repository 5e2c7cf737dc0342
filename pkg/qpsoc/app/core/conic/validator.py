from typing import Dict, List

import numpy as np
from pydantic import BaseModel

from qpsoc.app.core.conic.model import ConicModel


FEASIBILITY_TOL = 1e-6


class Violation(BaseModel):
    kind: str           # "missing" | "bound" | "linear" | "cone"
    index: int
    amount: float
    detail: str = ""


def model_violations(
    model: ConicModel,
    primal: Dict[str, float],
    tol: float = FEASIBILITY_TOL,
) -> List[Violation]:
    """
    Check a primal point against every bound, linear row and rotated cone.
    Cones are checked in their second-order form ||(2u, t - v)|| <= t + v.
    """
    out: List[Violation] = []

    for k, var in enumerate(model.vars):
        if var.id not in primal:
            out.append(Violation(kind="missing", index=k, amount=float("inf"), detail=var.id))
            continue
        x = primal[var.id]
        if var.lb is not None and x < var.lb - tol:
            out.append(Violation(kind="bound", index=k, amount=var.lb - x, detail=var.id))
        if var.ub is not None and x > var.ub + tol:
            out.append(Violation(kind="bound", index=k, amount=x - var.ub, detail=var.id))
    if out and any(v.kind == "missing" for v in out):
        return out

    for k, row in enumerate(model.lin):
        value = row.evaluate(primal)
        if value < -tol:
            out.append(Violation(kind="linear", index=k, amount=-value))

    for k, cone in enumerate(model.rcones):
        t = primal[cone.t]
        v = cone.v.evaluate(primal)
        u = cone.u.evaluate(primal)
        excess = float(np.hypot(2.0 * u, t - v)) - (t + v)
        if excess > tol:
            out.append(Violation(kind="cone", index=k, amount=excess, detail=cone.t))

    return out
