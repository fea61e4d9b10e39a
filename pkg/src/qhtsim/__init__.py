"""Hitting times of reversible Markov chains and their edge-space walks."""

from .chains import (MarkovChain, family, from_transition, from_weights,
                     lazify, load_chain_spec, time_reversal)
from .classical import (DeletedSpectrum, HzDistribution, deleted_spectrum,
                        h_eps, hitting_time, ht_eps, hz_distribution, hz_mean,
                        survival)
from .phase_estimation import (DenseOracleResult, DetectResult, PEConfig,
                               RotateReport, control_test_prob, dense_oracle,
                               detect, main_detect, pe_pmf, rotate,
                               signed_phase)
from .quantum import (DeviationReport, QHDistribution, deviation_experiment,
                  qh_distribution, qht, qht_chain, qht_eps, qht_eps_chain)
from .search import (ProjectionEntry, SearchEigensystem, TargetDecomposition,
                     decompose_target, eigvec_w, initial_coefficients,
                     principal_projection, secular_function, secular_phases,
                     u_rotation)
from .szegedy import (EdgeOperator, WalkDecomposition, classical_analogue,
                      phi_zero, quantum_analogue, reflection_walk, reflections,
                      search_operator, star_states, swap_operator,
                      walk_decomposition)
from .tulsi import (FindReport, TulsiOperator, build_T, find_experiment,
                    theta_star, tulsi_eigvec, tulsi_roots, tulsi_secular)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
