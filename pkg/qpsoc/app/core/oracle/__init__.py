from .checker import ConstraintViolation, validate_batch, validate_constraints
from .enumeration import OracleResult, closed_form_min, global_min, lipschitz_bounds, plus_cover
from .sampling import binary_battery, sample_product_columns, sample_product_points
from .witness import WitnessReport, witness_compare_sdp, witness_point
