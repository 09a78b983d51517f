"""resolab: Jost solutions, resonances and spectral identities for 1D
Schrodinger operators with potential supported in [0, 1]."""

from .errors import (
    ConsistencyError,
    CountMismatchError,
    DomainError,
    Inapplicable,
    NonconvergenceError,
    PoleError,
    PotentialFormatError,
    ResolabError,
    SearchBudgetError,
    SymmetryViolationError,
    ZeroOnContourError,
)
from .potential import (
    Bump,
    GridPotential,
    PiecewisePoly,
    Potential,
    PotentialPair,
    Smoothness,
    SquareWell,
    StepPotential,
    dump_potential,
    endpoint_mass,
    evaluate,
    is_identically_zero,
    l1_tail,
    load_potential,
    pair_with_tail,
    potential_from_dict,
    reflect,
    splice,
)
from .jost import (
    JostEvaluation,
    ScatteringData,
    jost_minus,
    jost_plus,
    neumann_psi_plus,
    omega,
    omega_evaluator,
    omega_log,
    omega_many,
    omega_prime,
    omega_s_many,
    s_evaluator,
    s_func,
    s_many,
    s_prime,
    scattering_coefficients,
    wronskian,
)
from .spectrum import (
    OriginSign,
    SignDatum,
    SpectralPoint,
    ZeroSet,
    classify,
    count_zeros,
    counting_function,
    coverage_radius,
    find_omega_zeros,
    find_s_zeros,
    find_zeros,
    mirror_defect,
    origin_data,
    restrict_to_disk,
    sign_set,
    zero_set_from_dict,
    zero_set_to_dict,
)
from .identities import (
    IdentityReport,
    ReconstructionResult,
    check_asymptotics,
    check_conjugation_symmetry,
    check_product_identity,
    check_reflection,
    check_wronskian_constancy,
    hadamard_reconstruct,
    verify_counting_trend,
)
from .uniqueness import (
    DemoConfig,
    DensityEstimate,
    G1Evaluation,
    g1,
    resonance_distance,
    subset_density,
    tau,
    theorem_demo,
)

__version__ = "0.1.0"
