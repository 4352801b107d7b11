"""Binary Weyl transform: Heisenberg-Weyl group algebra, fast transform via
dyadic autocorrelation and the Walsh-Hadamard transform, invariant pooled
texture descriptors and supervised coefficient selection."""

from .errors import IntegrityError, ParseError, ResourceError, UsageError, WeylError
from .fwht import fwht, fwht_batch
from .hw_group import (
    BitTuple,
    CoeffIndex,
    SignedPermOp,
    bit_add,
    bit_dot,
    d_apply,
    d_compose,
    d_inverse,
    d_materialize,
    enumerate_symmetric_indices,
)
from .pooling import (
    ClassPartition,
    Descriptor,
    build_partition,
    default_partition,
    htrans_map,
    patch_descriptor,
    pooled_descriptor,
    rot90_map,
    vtrans_map,
)
from .selection import (
    discriminability_scores,
    nn_classify,
    project_onto_coords,
    select_top_k,
)
from .transform import (
    WeylSpectrum,
    autocorr_bands,
    eigenspace_energies,
    reconstruct_covariance,
    weyl_fast,
    weyl_naive,
    weyl_of_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "autocorr_bands",
    "bit_add",
    "bit_dot",
    "BitTuple",
    "build_partition",
    "ClassPartition",
    "CoeffIndex",
    "d_apply",
    "d_compose",
    "d_inverse",
    "d_materialize",
    "default_partition",
    "Descriptor",
    "discriminability_scores",
    "eigenspace_energies",
    "enumerate_symmetric_indices",
    "fwht",
    "fwht_batch",
    "htrans_map",
    "IntegrityError",
    "nn_classify",
    "ParseError",
    "patch_descriptor",
    "pooled_descriptor",
    "project_onto_coords",
    "reconstruct_covariance",
    "ResourceError",
    "rot90_map",
    "select_top_k",
    "SignedPermOp",
    "UsageError",
    "vtrans_map",
    "weyl_fast",
    "weyl_naive",
    "weyl_of_matrix",
    "WeylError",
    "WeylSpectrum",
]
