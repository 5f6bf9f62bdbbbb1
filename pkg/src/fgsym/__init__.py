"""Factor-graph symmetry toolkit.

Detects exchangeable factors (naive scan, bucket-filtered scan, and the
candidate-intersection search), groups indistinguishable variables and
factors by colour passing, and ships a seeded benchmark harness with
operation counters.
"""

from ._backend import available_backends, backend_name as kernel_backend, set_backend
from .buckets import (
    ArgumentGroup,
    bucket_of,
    dof_bucket,
    dof_factor,
    enumerate_buckets,
    multiset_potentials,
    ordered_potentials,
    partition_args_by_range,
)
from .colour import (
    Colouring,
    colour_pass,
    detect_commutative_args,
    initial_factor_colours,
    initial_rv_colours,
)
from .detect import (
    BUDGET_EXHAUSTED,
    Budget,
    Counters,
    DETECTORS,
    DetectionResult,
    EXCHANGEABLE,
    NOT_EXCHANGEABLE,
    acp_exchangeable,
    bucket_filter,
    candidate_swaps,
    deft_exchangeable,
    enumerate_rearrangements,
    intersect_candidates,
    naive_exchangeable,
    verify_permutation,
)
from .errors import FgError
from .model import (
    Factor,
    FactorGraph,
    PotentialId,
    PotentialPool,
    Range,
    RandomVariable,
    assignment_of,
    build_factor,
    joint_table,
    lookup,
    permute_args,
    row_index,
    semantics_equivalent,
)
from .textfmt import dumps, load, parse, save

__version__ = "0.1.0"
