"""Shaped-pulse design and exact simulation for Ising spin chains.

Solves the reduced optimal-control problem for transferring spin order
along a chain (shooting on the constant angle rate of the polar window
dynamics), assembles the resulting pulse sequences, and verifies every
transfer by exact full-Hilbert-space propagation.
"""

from .backend import BACKEND
from .dynamics import (
    ControlPulse,
    RState,
    Trajectory,
    chain_rhs,
    from_polar,
    integrate,
    integrate_chain,
    integrate_polar,
    integrate_step4,
    r_rhs,
    step4_rhs,
    to_polar,
    u_from_theta,
)
from .geodesic import (
    GeodesicProblem,
    GeodesicSolution,
    SolverError,
    export_pulse,
    first_step_problem,
    intermediate_problem,
    last_step_by_reversal,
    last_step_problem,
    shoot,
    solve,
    solve_standard,
)
from .operators import (
    ChainSpec,
    OperatorSum,
    PauliTerm,
    commutator,
    decompose_matrix,
    format_operator,
    inner_product,
    matrix_of,
    multiple_spin_order,
    norm,
    parse_operator,
    product_term,
    single_spin,
    soliton_family,
    soliton_midstep,
    soliton_operator,
    transfer_basis,
)
from .sequences import (
    Delay,
    HardPulse,
    PulseSequence,
    ShapedInterval,
    conventional_cascade,
    geodesic_order_sequence,
    inept_cascade,
    soliton_preparation,
    soliton_propagation_step,
    pair_encoding,
    pair_propagation_step,
    sequence_from_json_dict,
)
from .simulator import (
    SimulationResult,
    compare_methods,
    expectation_profile,
    fidelity,
    propagate,
    render_comparison,
    verify_commuting_split,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ChainSpec",
    "ControlPulse",
    "Delay",
    "GeodesicProblem",
    "GeodesicSolution",
    "HardPulse",
    "OperatorSum",
    "PauliTerm",
    "PulseSequence",
    "RState",
    "ShapedInterval",
    "SimulationResult",
    "SolverError",
    "Trajectory",
    "chain_rhs",
    "commutator",
    "compare_methods",
    "conventional_cascade",
    "decompose_matrix",
    "expectation_profile",
    "export_pulse",
    "fidelity",
    "first_step_problem",
    "format_operator",
    "from_polar",
    "geodesic_order_sequence",
    "inept_cascade",
    "inner_product",
    "integrate",
    "integrate_chain",
    "integrate_polar",
    "integrate_step4",
    "intermediate_problem",
    "last_step_by_reversal",
    "last_step_problem",
    "matrix_of",
    "multiple_spin_order",
    "norm",
    "pair_encoding",
    "pair_propagation_step",
    "parse_operator",
    "product_term",
    "propagate",
    "r_rhs",
    "render_comparison",
    "sequence_from_json_dict",
    "shoot",
    "single_spin",
    "soliton_family",
    "soliton_midstep",
    "soliton_operator",
    "soliton_preparation",
    "soliton_propagation_step",
    "solve",
    "solve_standard",
    "step4_rhs",
    "to_polar",
    "transfer_basis",
    "u_from_theta",
    "verify_commuting_split",
]
