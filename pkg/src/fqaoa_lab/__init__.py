"""Statevector laboratory for constraint-preserving QAOA variants.

Core pipeline: snake Jordan-Wigner encoding of an N x D ladder, exact
diagonal cost Hamiltonians for discrete portfolio selection, Givens
free-fermion state preparation, fermionic-swap Trotter mixing, fixed
annealing-angle schedules with local parameter optimization, and exact
distribution analytics with closed-form gate-count certification.
"""

from .analysis import (
    CertificationError,
    EnergyDistribution,
    ansatz_gate_totals,
    box_stats,
    certify_gate_counts,
    distribution,
    expected_init_counts,
    expected_mixer_counts,
    expected_phase_counts,
    power_law_slope,
    residual_energy,
)
from .baselines import (
    PenaltyProblem,
    build_phi_i,
    build_phi_ii,
    dicke_gate_counts,
    make_penalty,
    plus_state,
    x_qaoa_step,
    xy_mixer_step,
)
from .driver import (
    LadderDriver,
    OrbitalSelection,
    build_driver,
    hopping_scale,
    occupied_orbital_matrix,
    orbital_energy,
    select_occupied,
)
from .evolution import (
    MixerLayout,
    apply_mixer_exact,
    apply_mixer_trotter,
    apply_phase,
    build_mixer_layout,
    fswap_gate,
    hop_dense,
    hop_gate,
    synthesize_mixer_circuit,
    synthesize_phase_circuit,
)
from .gates import Circuit, Gate
from .lattice import LatticeShape, index_to_site, site_to_index, spin_of_bit
from .problem import (
    DiagonalHamiltonian,
    EncodingScheme,
    PolynomialProblem,
    PortfolioInstance,
    build_diagonal,
    generate_instance,
    load_instance,
    make_encoding,
    polynomial_cost,
    portfolio_cost,
    portfolio_cost_positions,
    position_from_bits,
    save_instance,
)
from .schedule import (
    METHODS,
    AnsatzEngine,
    RunRecord,
    Schedule,
    evaluate_ansatz,
    fixed_angle_record,
    fixed_angles,
    optimize,
)
from .state_prep import (
    GivensPlan,
    GivensRotation,
    givens_decompose,
    prepare_initial_state,
    slater_amplitudes,
    synthesize_init_circuit,
    zero_upper_triangle,
)
from .statevector import StateVector, hamming_weights

__all__ = [name for name in dir() if not name.startswith("_")]
