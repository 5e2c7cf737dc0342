"""
Constraint collections fed to the conic model.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Set

from qpsoc.app.core.algebra import Auxiliary, LinearForm, Monomial
from qpsoc.app.core.relaxation.perspective import (
    PerspectiveInequality,
    RotatedConeConstraint,
    SupportSystem,
    lift_to_soc,
)


@dataclass
class ConstraintSystem:
    """
    linear:       LinearForm >= 0 rows, deduplicated
    perspectives: perspective inequalities before lifting
    lifted:       lhs - sum t >= 0 rows produced by lifting
    cones:        rotated cones produced by lifting
    """
    linear: List[LinearForm] = field(default_factory=list)
    perspectives: List[PerspectiveInequality] = field(default_factory=list)
    lifted: List[LinearForm] = field(default_factory=list)
    cones: List[RotatedConeConstraint] = field(default_factory=list)
    _seen: Set[tuple] = field(default_factory=set, repr=False)

    def add_linear(self, form: LinearForm) -> bool:
        key = form.key()
        if key in self._seen:
            return False
        self._seen.add(key)
        self.linear.append(form)
        return True

    def add_perspective(self, p: PerspectiveInequality, support: SupportSystem = None):
        if support is not None:
            for form in support.inequalities:
                self.add_linear(form)
        self.perspectives.append(p)
        inequality, cones = lift_to_soc(p)
        self.lifted.append(inequality)
        self.cones.extend(cones)

    def extend(self, other: "ConstraintSystem"):
        for form in other.linear:
            self.add_linear(form)
        self.perspectives.extend(other.perspectives)
        self.lifted.extend(other.lifted)
        self.cones.extend(other.cones)

    def variables(self) -> Set:
        found = set()
        for form in self.linear + self.lifted:
            found.update(form.terms)
        for cone in self.cones:
            found.add(cone.t)
            found.update(cone.v.terms)
            found.update(cone.u.terms)
        return found

    def monomials(self) -> Set[Monomial]:
        return {v for v in self.variables() if isinstance(v, Monomial)}

    def auxiliaries(self) -> Set[Auxiliary]:
        return {v for v in self.variables() if isinstance(v, Auxiliary)}

    def counts(self) -> Dict[str, int]:
        return {
            "linear": len(self.linear),
            "perspectives": len(self.perspectives),
            "cones": len(self.cones),
            "monomials": len(self.monomials()),
            "auxiliaries": len(self.auxiliaries()),
        }
