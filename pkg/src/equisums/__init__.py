"""Multisets of residues whose non-empty subset sums are equidistributed modulo n."""
from .counting import (
    CountReport,
    LemmaInstance,
    brute_force_census,
    e_formula,
    enumerate_by_construction,
    lemma_h_bruteforce,
    lemma_h_formula,
    reconcile_counts,
)
from .distribution import (
    DistributionProfile,
    PolyRemainder,
    ResidueMultiset,
    coset_chain_partition,
    is_equidistributed,
    necessary_conditions,
    poly_identity_check,
    subset_sum_distribution,
    uniform_count,
)
from .errors import ConstraintError, DomainError, EquisumsError, ResourceError
from .ring import (
    RingContext,
    build_context,
    cha_dhi_applicable,
    factorize,
    is_primitive_root,
    is_semi_primitive_root,
    multiplicative_order,
)
from .structure import (
    Decomposition,
    GeometricBlock,
    LeaderBasis,
    NoDecomposition,
    assemble_multiset,
    build_block,
    canonical_leaders,
    decompose,
    pm2_orbit,
    predicted_profile,
    theorem4_applicable,
)

__version__ = "0.1.0"
