from .blocks import (
    BlockFormulation,
    complete_hull_one_plus_loop,
    minus_loop_constraints,
    rlt_polytope,
)
