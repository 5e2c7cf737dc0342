"""
CVXPY adapter.
Rotated cones t*v >= u^2 are passed as second-order cones ||(2u, t - v)|| <= t + v.
Requires: pip install cvxpy
"""

import logging
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp

try:
    import cvxpy as cp
    CVXPY_AVAILABLE = True
except ImportError:
    CVXPY_AVAILABLE = False

from qpsoc.app.core.conic.base import ConicAdapter, SolveResult
from qpsoc.app.core.conic.model import ConicModel, FormSpec
from qpsoc.app.core.errors import AdapterError

logger = logging.getLogger(__name__)

DEFAULT_SOLVER = "CLARABEL"


def affine_rows(forms: List[FormSpec], index: Dict[str, int]) -> Tuple[sp.csr_matrix, np.ndarray]:
    """Stack forms as A x + b."""
    rows, cols, vals = [], [], []
    b = np.zeros(len(forms))
    for r, form in enumerate(forms):
        b[r] = form.const
        for var, coef in form.terms:
            rows.append(r)
            cols.append(index[var])
            vals.append(coef)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(len(forms), len(index)))
    return A, b


class CvxpyAdapter(ConicAdapter):
    name = "cvxpy"

    def __init__(self, solver: str = DEFAULT_SOLVER, **options):
        """
        Args:
            solver: CVXPY solver name (CLARABEL, ECOS, SCS, ...)
            options: passed through to Problem.solve
        """
        if not CVXPY_AVAILABLE:
            raise AdapterError("cvxpy is not installed. Run: pip install cvxpy")

        self.solver = (solver or DEFAULT_SOLVER).upper()
        if self.solver not in cp.installed_solvers():
            raise AdapterError(
                f"solver {self.solver} is not available to cvxpy; "
                f"installed: {', '.join(cp.installed_solvers())}"
            )
        self.options = options

    def build_problem(self, model: ConicModel):
        index = {var.id: k for k, var in enumerate(model.vars)}
        x = cp.Variable(len(index))
        constraints = []

        if model.lin:
            A, b = affine_rows(model.lin, index)
            constraints.append(A @ x + b >= 0)

        for k, var in enumerate(model.vars):
            if var.lb is not None:
                constraints.append(x[k] >= var.lb)
            if var.ub is not None:
                constraints.append(x[k] <= var.ub)

        if model.rcones:
            t_idx = np.array([index[cone.t] for cone in model.rcones])
            V, v0 = affine_rows([cone.v for cone in model.rcones], index)
            U, u0 = affine_rows([cone.u for cone in model.rcones], index)
            t = x[t_idx]
            v = V @ x + v0
            u = U @ x + u0
            constraints.append(cp.SOC(t + v, cp.vstack([2 * u, t - v]), axis=0))

        c, c0 = affine_rows([model.obj], index)
        objective = cp.Minimize(c.toarray().ravel() @ x + c0[0])
        return cp.Problem(objective, constraints), x

    def solve_model(self, model: ConicModel) -> SolveResult:
        problem, x = self.build_problem(model)
        stats = {"adapter": self.name, "solver": self.solver}

        try:
            problem.solve(solver=self.solver, **self.options)
        except cp.error.SolverError as e:
            logger.warning("%s failed: %s", self.solver, e)
            stats["error"] = str(e)
            return SolveResult(status="numerical-limit", solver_stats=stats)

        stats["raw_status"] = problem.status
        if problem.solver_stats is not None:
            stats["solve_time"] = problem.solver_stats.solve_time
            stats["iterations"] = problem.solver_stats.num_iters

        if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            primal = {var.id: float(value) for var, value in zip(model.vars, x.value)}
            return SolveResult(
                status="optimal",
                objective_value=float(problem.value),
                primal=primal,
                solver_stats=stats,
            )
        if problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            return SolveResult(status="infeasible", solver_stats=stats)
        if problem.status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
            return SolveResult(status="unbounded", solver_stats=stats)
        return SolveResult(status="numerical-limit", solver_stats=stats)
