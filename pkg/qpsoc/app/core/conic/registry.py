"""
Adapter lookup and the solve entry point.

Adapter names: "null", "cvxpy" (solver from settings) or "cvxpy:<SOLVER>".
"""

import logging
from typing import Union

from qpsoc.app.config import SettingsModel, load_settings
from qpsoc.app.core.conic.base import ConicAdapter, SolveResult
from qpsoc.app.core.conic.cvxpy_solver import CVXPY_AVAILABLE, CvxpyAdapter
from qpsoc.app.core.conic.model import ConicModel
from qpsoc.app.core.conic.null_solver import NullAdapter
from qpsoc.app.core.conic.validator import FEASIBILITY_TOL, model_violations
from qpsoc.app.core.errors import AdapterError

logger = logging.getLogger(__name__)

ADAPTERS = ("cvxpy", "null")


def get_adapter(name: str = None, settings: SettingsModel = None) -> ConicAdapter:
    if settings is None:
        settings = load_settings()
    if name is None:
        name = settings.adapter

    base, _, solver = name.partition(":")
    if base == "null":
        return NullAdapter()
    if base == "cvxpy":
        if not CVXPY_AVAILABLE:
            raise AdapterError("cvxpy adapter requested but cvxpy is not installed. Run: pip install cvxpy")
        return CvxpyAdapter(solver=solver or settings.cvxpy_solver)
    raise AdapterError(f"Unknown adapter: {name}. Valid options: {', '.join(ADAPTERS)}")


def solve(
    model: ConicModel,
    adapter: Union[ConicAdapter, str] = None,
    tol: float = FEASIBILITY_TOL,
) -> SolveResult:
    """
    Solve through an adapter and revalidate an optimal primal against the model.
    A primal that fails revalidation is reported as numerical-limit.
    """
    if adapter is None or isinstance(adapter, str):
        adapter = get_adapter(adapter)

    try:
        result = adapter.solve_model(model)
    except Exception as e:
        logger.warning("adapter %s raised: %s", adapter.name, e)
        return SolveResult(
            status="numerical-limit",
            solver_stats={"adapter": adapter.name, "error": f"{type(e).__name__}: {e}"},
        )

    if result.status != "optimal":
        return result

    violations = model_violations(model, result.primal, tol)
    if violations:
        worst = max(violations, key=lambda v: v.amount)
        logger.warning(
            "optimal primal from %s violates %d constraints (worst %s %.3e); downgrading",
            adapter.name, len(violations), worst.kind, worst.amount,
        )
        stats = dict(result.solver_stats)
        stats["violations"] = [v.model_dump() for v in violations[:5]]
        return result.model_copy(update={"status": "numerical-limit", "solver_stats": stats})
    return result
