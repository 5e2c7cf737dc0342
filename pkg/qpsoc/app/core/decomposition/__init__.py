from .blocks import Block, block_system, contract_plus_subtrees, decompose
from .construct import STRATEGIES, construct_td, cycle_order, greedy_cover
from .tree import (
    DEFAULT_BOUND,
    ConditionReport,
    TreeDecomposition,
    ValidityReport,
    check_conditions,
    dump_td,
    fill_bags,
    formulation_size,
    induced_subtree,
    parse_td,
    stable_plus_set,
    validate_td,
    width_and_spread,
)
