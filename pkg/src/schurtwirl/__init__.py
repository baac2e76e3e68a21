"""schurtwirl: finite averaging of multi-qubit states via Schur operator bases.

Replaces Haar and Cartan twirling integrals over collective group actions
(U(2)^(x)t exactly, SL(2,C)^(x)t up to sector probabilities) by finite sums
over Heisenberg-Weyl operator bases embedded in the Schur sectors, and ships
the analytic and Monte-Carlo oracles that verify the construction.
"""

from .channels import (
    AbelianFamily,
    BetaWeights,
    QuadratureSpec,
    TwirlResult,
    beta_weights,
    check_density_matrix,
    compact_finite_twirl,
    haar_projection_twirl,
    haar_unitaries,
    identity_family,
    mc_cartan_twirl,
    mc_haar_twirl,
    noncompact_finite_twirl,
    random_density_matrix,
    select_convention,
    sl2_diagonal_family,
)
from .numerics import (
    DEFAULT_POLICY,
    LinearDependenceError,
    TolerancePolicy,
    adjoint,
    frob_inner,
    gram_schmidt,
    kron,
    numerical_rank,
)
from .opbasis import (
    SchurOperatorSet,
    UnitaryOperatorBasis,
    decompose_in_pi_basis,
    embed_gamma,
    heisenberg_weyl,
)
from .schur import (
    SchurBasis,
    SchurSector,
    YoungDiagram,
    build_schur_basis,
    enumerate_diagrams,
    reference_basis_t4,
    standard_tableaux,
    young_projector,
)
from .sizes import (
    SizeRow,
    emit_table,
    lower_bound_t2,
    operator_span_dim,
    sector_term_count,
    universal_set_size,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianFamily",
    "BetaWeights",
    "DEFAULT_POLICY",
    "LinearDependenceError",
    "QuadratureSpec",
    "SchurBasis",
    "SchurOperatorSet",
    "SchurSector",
    "SizeRow",
    "TolerancePolicy",
    "TwirlResult",
    "UnitaryOperatorBasis",
    "YoungDiagram",
    "adjoint",
    "beta_weights",
    "build_schur_basis",
    "check_density_matrix",
    "compact_finite_twirl",
    "decompose_in_pi_basis",
    "embed_gamma",
    "emit_table",
    "enumerate_diagrams",
    "frob_inner",
    "gram_schmidt",
    "haar_projection_twirl",
    "haar_unitaries",
    "heisenberg_weyl",
    "identity_family",
    "kron",
    "lower_bound_t2",
    "mc_cartan_twirl",
    "mc_haar_twirl",
    "noncompact_finite_twirl",
    "numerical_rank",
    "operator_span_dim",
    "random_density_matrix",
    "reference_basis_t4",
    "sector_term_count",
    "select_convention",
    "sl2_diagonal_family",
    "standard_tableaux",
    "universal_set_size",
    "young_projector",
]
