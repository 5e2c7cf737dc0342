from .base import ConicAdapter, SolveResult
from .model import (
    ConeSpec,
    ConicModel,
    FormSpec,
    VariableSpec,
    assemble,
    export_model,
    import_model,
    objective_form,
)
from .registry import ADAPTERS, get_adapter, solve
from .validator import FEASIBILITY_TOL, Violation, model_violations
