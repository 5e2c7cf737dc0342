from .perspective import (
    SUPPORT_TOL,
    PerspectiveInequality,
    PerspectiveTerm,
    RotatedConeConstraint,
    SupportSystem,
    build_block_system,
    lift_to_soc,
    perspective_system,
    rhs_value,
    rhs_values,
    slack,
    support_system,
    switch_inequality,
)
from .system import ConstraintSystem
