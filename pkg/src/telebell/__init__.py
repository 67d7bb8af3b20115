"""Teleportation-usefulness and k-copy Bell nonlocality toolkit.

Decides and quantifies when many copies of a bipartite quantum state can
violate a Bell inequality: state constructors, entanglement fraction and
twirling, PPT separability thresholds, the Hadamard-coset (Khot-Vishnoi)
game with its canonical quantum strategy, exact and heuristic local
bounds, and closed-form activation thresholds.
"""

from .entanglement import (EntanglementFractionResult, PptResult,
                           TeleportationVerdict, entanglement_fraction, is_ppt,
                           is_useful_for_teleportation, phi_fidelity,
                           ppt_threshold, teleport_fidelity, twirl)
from .games import (BellFunctional, InfeasibleSizeError, LocalBoundResult,
                    LocalFraction, behavior_from_state, chsh_functional,
                    evaluate, local_bound_exact, local_bound_heuristic,
                    nonlocality_fraction)
from .kvgame import (KVGame, KVScore, asymptotic_bounds, build_kv_game,
                     canonical_bases, kv_behavior_on_state, kv_score,
                     maxent_behavior_closed_form)
from .linalg import (DimensionLimitError, EigenDecomposition,
                     SchmidtDecomposition, hermitian_eig, kron,
                     partial_transpose, polar_unitary, schmidt_decompose)
from .states import (DensityMatrix, IsotropicState, PureSchmidtState,
                     almeida_state, isotropic_from_fraction,
                     isotropic_from_visibility, max_entangled,
                     max_entangled_density, pure_from_schmidt, sigma_state,
                     tensor_copies)
from .superactivation import (ActivationReport, CertifyResult, MixtureCheck,
                              almeida_threshold, analyze_activation,
                              certify_k_copy, check_copy_mixture_expansion,
                              min_copies_bound, sigma_threshold, theta_star)

__version__ = "0.1.0"
