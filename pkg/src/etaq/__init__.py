"""Exact q-series arithmetic for eta-quotient families, partition-hook
identities, and a staged lacunarity search."""

from .arith import (
    InertSearchResult,
    inert_indicator,
    inert_primes,
    is_prime,
    kronecker,
    norm_form_represents,
    prime_factors,
    prime_product_cutoff,
    pv_viable,
    radical,
    search_inert_index,
    squarefree_part,
)
from .classify import (
    ClassificationResult,
    CoeffPoly,
    PairAudit,
    SurvivorReport,
    classify_pipeline,
    coefficient_density,
    coefficient_polynomial,
    lacunary_candidates,
    odd_positive_roots,
)
from .errors import (
    ConditionsFail,
    DegreeOverflow,
    EtaqError,
    FactorizationBudgetExceeded,
    NonIntegralWeight,
    NonUnitConstantTerm,
    PreconditionFail,
    ResourceLimit,
    TruncationTooSmall,
    UsageError,
    ZeroPolynomial,
)
from .hecke import (
    EliminationResult,
    HeckeContext,
    first_divisible_index,
    hecke_apply,
    hecke_elimination,
    no_exponent_collision,
)
from .modular import (
    CharacterSpec,
    EtaQuotient,
    EtaTriple,
    check_weakly_holomorphic,
    classify_holomorphy,
    cusp_order,
    cusp_orders,
    optimal_level,
    triple_character,
)
from .partitions import (
    Partition,
    conjugate,
    core_counts_by_enumeration,
    core_generating_series,
    count_cores,
    han_hook_sum,
    hook_lengths,
    hooks_divisible_by,
    is_core,
    nekrasov_okounkov_sum,
    partition_count,
    partitions_of,
)
from .qseries import (
    QSeries,
    euler_product,
    euler_product_direct,
    expand_eta_triple,
    jacobi_cube,
    leading_exponent,
    load_series,
    normalized_coefficients,
    save_series,
)

__version__ = "0.1.0"
