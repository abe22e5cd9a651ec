"""Coded distributed matrix multiplication with bounded entries.

Encode two integer matrices into per-worker share pairs, simulate a
straggler-prone worker pool, and decode A^T B from any tau completed
workers, where tau trades off against per-coefficient magnitude via the
split parameter p'.
"""

from .decoding import (
    CoefficientStack,
    DecodeReport,
    WorkerResult,
    decode,
    extract_digit,
    interpolate,
    modulo_power_of_two,
)
from .encoding import (
    ExponentPlan,
    SchemeParams,
    encode_all,
    encode_share,
    exponent_plan,
    plan_to_csv,
    recovery_threshold,
)
from .errors import (
    BoundViolationError,
    DecodeError,
    DimensionError,
    InsufficientResultsError,
    JobFailureError,
    PrecisionLossWarning,
    SingularityError,
    ValidationError,
)
from .matrix import (
    PartitionedMatrix,
    assemble,
    conservative_bound,
    frobenius_rel_error,
    partition,
    random_int_matrix,
    read_matrix,
    reference_product,
    write_matrix,
    write_matrix_text,
)
from .points import (
    generate_points,
    points_integer,
    points_real_equispaced,
    points_to_csv,
    points_unit_circle,
    vandermonde_condition,
)
from .simulator import (
    CostModel,
    LatencyReport,
    StragglerModel,
    SweepConfig,
    auto_base,
    run_job,
    sweep_rows_to_csv,
    sweep_stragglers,
    worker_task,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
