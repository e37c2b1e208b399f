"""Connection matrices of combinatorial multivector fields over GF(2)."""

from .admissible import AdmissibleBasis, FilteredBoundaryMatrix, assemble, build_admissible_basis, linear_extension
from .connection import (
    ConnectionMatrix,
    PipelineOptions,
    PipelineResult,
    ReductionState,
    check_reduced,
    compute_connection_matrix,
    extract,
    reduce,
    run_pipeline,
)
from .errors import ConnmatError, DenseSizeError, InternalConsistencyError, ValidationError
from .gf2 import SparseGF2Matrix
from .morse import MorseDecomposition, minimal_decomposition, validate_morse_partition
from .mvfield import MultivectorField, flow_digraph, singleton_field, validate_field
from .oracle import Certificate, betti_numbers, conley_index_dims, single_reduction, verify_connection_matrix
from .simplicial import SimplicialComplex

__all__ = [
    "AdmissibleBasis",
    "Certificate",
    "ConnectionMatrix",
    "ConnmatError",
    "DenseSizeError",
    "FilteredBoundaryMatrix",
    "InternalConsistencyError",
    "MorseDecomposition",
    "MultivectorField",
    "PipelineOptions",
    "PipelineResult",
    "ReductionState",
    "SimplicialComplex",
    "SparseGF2Matrix",
    "ValidationError",
    "assemble",
    "betti_numbers",
    "build_admissible_basis",
    "check_reduced",
    "compute_connection_matrix",
    "conley_index_dims",
    "extract",
    "flow_digraph",
    "linear_extension",
    "minimal_decomposition",
    "reduce",
    "run_pipeline",
    "single_reduction",
    "singleton_field",
    "validate_field",
    "validate_morse_partition",
    "verify_connection_matrix",
]

__version__ = "0.1.0"
