from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel

from qpsoc.app.core.conic.model import ConicModel

SolveStatus = Literal["optimal", "infeasible", "unbounded", "numerical-limit"]


class SolveResult(BaseModel):
    status: SolveStatus
    objective_value: Optional[float] = None
    primal: Dict[str, float] = {}
    solver_stats: Dict[str, Any] = {}


class ConicAdapter:
    """
    Base class for conic solver adapters.
    Any adapter must implement solve_model().
    """

    name = "base"

    def solve_model(self, model: ConicModel) -> SolveResult:
        raise NotImplementedError("Conic adapter must implement solve_model()")
