"""Bipartite separability through Hilbert-Schmidt measures and invariant polytopes."""

from .core import (
    DensityMatrix,
    hs_distance,
    hs_norm_sq,
    partial_trace,
    partial_transpose,
    pure_state,
    relative_entropy,
    tensor_product,
    tensor_states,
    validate_density,
    vn_entropy,
)
from .fano import (
    FanoDecomposition,
    GeneratorBasis,
    correlation_sum,
    fano_decompose,
    fano_reconstruct,
    sm_measure,
    su_generators,
    w_measure,
)
from .geometry import (
    FactorPolytope,
    HullCertificate,
    ProductPolytope,
    SetDivergence,
    css_projection_check,
    f_tilde,
    hull_membership,
    is_css,
    lambda_map,
    lambda_tau,
    local_unitary_transform,
    polytope_equal,
    quasi_tensor,
    set_relative_entropy,
    tau,
)
from .separability import (
    SegmentScanReport,
    SegmentVerdict,
    invariant_polytope,
    is_product,
    min_entropy_over,
    omega,
    p_pure_polytope,
    ppt_min_eigenvalue,
    pure_separability,
    segment,
    segment_scan,
    werner_pure_decomposition,
)
from .states import (
    SeparableDecomposition,
    make_bell,
    make_werner,
    random_separable,
    random_state,
    random_unitary,
)

__version__ = "0.1.0"
