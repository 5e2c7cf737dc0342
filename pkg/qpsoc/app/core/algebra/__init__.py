from .monomial import (
    MAX_BLOCK_NODES,
    PERSPECTIVE_TOL,
    Auxiliary,
    LinearForm,
    Monomial,
    Variable,
    ell,
    evaluate,
    perspective_value,
    perspective_values,
    product_point,
    subsets,
)
from .switching import switch_form
