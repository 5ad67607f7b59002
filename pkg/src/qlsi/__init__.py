"""Weighted noncommutative Lp calculus, quantum Markov semigroups,
log-Sobolev constants, and strong-converse bounds at desk scale."""

__version__ = "0.1.0"

from .errors import (
    ContractViolationError,
    DecompositionError,
    DimensionMismatchError,
    DomainError,
    EstimationError,
    ParameterError,
    QlsiError,
    ResourceLimitError,
)
from .operator_core import (
    ComplexMatrix,
    DensityMatrix,
    HermitianOperator,
    PositiveOperator,
    eig_hermitian,
    kron,
    mat_fn,
    matrix_from_doc,
    matrix_to_doc,
    partial_trace,
    random_density,
    random_hermitian,
    random_positive_definite,
    random_unitary,
)
from .weighted_lp import (
    PExponent,
    WeightedSpace,
    check_reverse_holder,
    check_reverse_minkowski,
    gamma_power,
    holder_conjugate,
    holder_variational_check,
    inner_one_sigma,
    inner_sigma,
    power_operator,
    weighted_norm,
)
from .entropy_dirichlet import (
    EntropyReport,
    dirichlet_form,
    ent1_convexity_check,
    ent_p,
    norm_derivative_p,
    relative_entropy,
    renyi_divergence,
    variance_sigma,
    von_neumann_entropy,
)
from .entropy_dirichlet import dirichlet_form_transported
from .semigroups import (
    KrausPair,
    LindbladGenerator,
    adjoint_generator,
    check_reversible,
    check_strongly_reversible,
    choi_kraus_decomposition,
    contractivity_check,
    custom_generator,
    davies_qubit_generator,
    evolve,
    generator_from_doc,
    generator_to_doc,
    simple_generator,
    spectral_gap,
    tensor_sum,
)
from .lsi import (
    LSIEstimate,
    MarginReport,
    SweepReport,
    alpha1_tensor_check,
    alpha2_gap_lower_bound,
    alpha2_simple_exact,
    block_entropy_inequality_check,
    hc_check,
    hc_sweep,
    hc_time_threshold,
    lemma_2positive_check,
    lsi_constant_estimate,
    lsi_verify,
    reverse_hc_check,
    reverse_holder_hc_check,
    sv_monotonicity_check,
)
from .converse import (
    CQCode,
    HypothesisInstance,
    QuantumTest,
    alt_check,
    beta_lower_bound,
    code_from_doc,
    code_mutual_information,
    cq_converse_check,
    gamma_infinity,
    instance_from_doc,
    instance_to_doc,
    mutual_information,
    np_oracle,
    pgm_decoder,
    qht_bound_rhs,
    random_test,
    strong_converse_exponent_f,
    tensor_power,
)
