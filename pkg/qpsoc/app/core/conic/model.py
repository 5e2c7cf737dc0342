"""
Conic model: variables, linear rows (>= 0), rotated cones and a linear objective.

Model JSON:
    {"vars":   [{"id", "kind", "lb", "ub"}],
     "lin":    [{"const", "terms": [[var_id, coef], ...]}],
     "rcones": [{"t": var_id, "v": form, "u": form}],
     "obj":    form}
"""

import logging
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ValidationError, model_validator

from qpsoc.app.core.algebra import LinearForm, Monomial, Variable
from qpsoc.app.core.errors import ModelError
from qpsoc.app.core.instance import SparseQP
from qpsoc.app.core.relaxation import ConstraintSystem

logger = logging.getLogger(__name__)

VariableKind = Literal["node", "subset", "loop", "auxiliary"]


class VariableSpec(BaseModel):
    id: str
    kind: VariableKind
    lb: Optional[float] = None
    ub: Optional[float] = None


class FormSpec(BaseModel):
    const: float = 0.0
    terms: List[Tuple[str, float]] = []

    def evaluate(self, values: Dict[str, float]) -> float:
        return self.const + sum(coef * values[var] for var, coef in self.terms)


class ConeSpec(BaseModel):
    t: str
    v: FormSpec
    u: FormSpec


class ConicModel(BaseModel):
    vars: List[VariableSpec]
    lin: List[FormSpec] = []
    rcones: List[ConeSpec] = []
    obj: FormSpec

    @model_validator(mode="after")
    def check_declared(self):
        declared = set()
        for var in self.vars:
            if var.id in declared:
                raise ValueError(f"variable {var.id} declared twice")
            declared.add(var.id)

        def check(form: FormSpec, where: str):
            for var, _ in form.terms:
                if var not in declared:
                    raise ValueError(f"undeclared variable {var} in {where}")

        for k, row in enumerate(self.lin):
            check(row, f"linear row {k}")
        for k, cone in enumerate(self.rcones):
            if cone.t not in declared:
                raise ValueError(f"undeclared variable {cone.t} in cone {k}")
            check(cone.v, f"cone {k}")
            check(cone.u, f"cone {k}")
        check(self.obj, "objective")
        return self

    def counts(self) -> Dict[str, int]:
        return {
            "variables": len(self.vars),
            "linear": len(self.lin),
            "cones": len(self.rcones),
            "auxiliaries": sum(1 for v in self.vars if v.kind == "auxiliary"),
        }


def form_spec(form: LinearForm) -> FormSpec:
    terms = sorted(form.terms.items(), key=lambda item: item[0].sort_key())
    return FormSpec(const=form.constant, terms=[(str(v), c) for v, c in terms])


def variable_spec(v: Variable) -> VariableSpec:
    if v.kind == "node":
        return VariableSpec(id=str(v), kind="node", lb=0.0, ub=1.0)
    if v.kind == "auxiliary":
        return VariableSpec(id=str(v), kind="auxiliary", lb=0.0)
    return VariableSpec(id=str(v), kind=v.kind)


def objective_form(qp: SparseQP) -> LinearForm:
    """sum q_ii z_ii + 2 sum q_ij z_ij + sum c_i z_i"""
    terms: Dict[Variable, float] = {}
    for i, c in enumerate(qp.c):
        if c != 0:
            terms[Monomial.node(i)] = c
    for i, q in qp.q_diag.items():
        terms[Monomial.loop_of(i)] = q
    for (i, j), q in qp.q_off.items():
        terms[Monomial.subset((i, j))] = 2.0 * q
    return LinearForm(0.0, terms)


def assemble(qp: SparseQP, system: ConstraintSystem) -> ConicModel:
    objective = objective_form(qp)
    referenced = system.variables()

    missing = sorted(
        (v for v in objective.terms if v not in referenced), key=lambda v: v.sort_key()
    )
    if missing:
        raise ModelError(
            "objective references variables absent from every constraint block: "
            + ", ".join(str(v) for v in missing)
        )

    targets = {p.target for p in system.perspectives}
    linear_vars = set()
    for row in system.linear:
        linear_vars.update(row.terms)
    for i, q in sorted(qp.q_diag.items()):
        loop = Monomial.loop_of(i)
        if q > 0 and loop not in targets:
            raise ModelError(f"plus loop {loop} has no perspective inequality bounding it below")
        if q < 0 and loop not in linear_vars:
            raise ModelError(f"minus loop {loop} has no linear row bounding it above")
    for target in sorted(targets, key=Monomial.sort_key):
        if qp.q_diag.get(target.nodes[0], 0.0) <= 0:
            logger.warning("perspective target %s has nonpositive objective weight", target)

    variables = sorted(referenced | set(objective.terms), key=lambda v: v.sort_key())
    return ConicModel(
        vars=[variable_spec(v) for v in variables],
        lin=[form_spec(row) for row in system.linear + system.lifted],
        rcones=[
            ConeSpec(t=str(cone.t), v=form_spec(cone.v), u=form_spec(cone.u))
            for cone in system.cones
        ],
        obj=form_spec(objective),
    )


def export_model(m: ConicModel) -> str:
    return m.model_dump_json(indent=1)


def import_model(text: str) -> ConicModel:
    try:
        return ConicModel.model_validate_json(text)
    except ValidationError as e:
        raise ModelError(f"invalid model document: {e}") from e
