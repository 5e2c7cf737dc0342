"""
Adapter that checks a model without solving it.
Lets model-building code run where no conic solver is installed.
"""

from qpsoc.app.core.conic.base import ConicAdapter, SolveResult
from qpsoc.app.core.conic.model import ConicModel


class NullAdapter(ConicAdapter):
    name = "null"

    def solve_model(self, model: ConicModel) -> SolveResult:
        # Revalidate: a model built in code may bypass the document validator
        checked = ConicModel.model_validate(model.model_dump())
        return SolveResult(
            status="numerical-limit",
            solver_stats={"adapter": self.name, "message": "no solver attached", **checked.counts()},
        )
