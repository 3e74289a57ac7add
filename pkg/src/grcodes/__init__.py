"""Generalized regenerating codes and node repair on graphs.

Exact symbol-level erasure codes with per-helper download profiles,
bandwidth accounting for relay vs intermediate-processing repair over
arbitrary connectivity graphs, repair-degree optimization, and rank-metric
protection of systematic nodes against corrupted helpers.
"""

from ._kernels import NAME as kernel_backend
from .bounds import (
    CodeParams,
    adversarial_cut_bound,
    cutset_bound,
    delta_r,
    functional_ip_lower_bound,
    ip_lower_bound,
    is_within_cutset,
    msr_mbr_points,
    omega_r,
)
from .codes import GpmCode, MdsUnitCode, PmCode, ShortenedPmCode, derive_ip_matrices
from .gabidulin import GabidulinCode, random_rank_error
from .gf import (
    GF2,
    GF16,
    BinaryField,
    FieldElement,
    Matrix,
    PrimeField,
    TowerElement,
    TowerField,
    binary_field,
    field_arith,
    linearized_eval,
    mat_invert,
    mat_rank,
    mat_solve,
    poly_eval,
    prime_field,
    tower_field,
)
from .graphrepair import (
    BandwidthReport,
    NonuniformPlan,
    RepairTree,
    lambda_af_nonuniform,
    lambda_af_uniform,
    lambda_ip_nonuniform,
    lambda_ip_uniform,
    nonuniform_savings,
    simulate_repair,
)
from .graphs import StorageGraph, graph_from_spec
from .stacking import StackedCode, StackSpec, TauBoundStackedCode, build_stack

__version__ = "0.1.0"
