"""Rabi-model operators, spectral evolution and bang-bang protocols."""

from .evolution import (
    Propagator,
    SpectralDecomposition,
    Trajectory,
    TrajectoryAnalysis,
    analyze_trajectory,
    diagonalize,
    evolve_sequence,
    free_trajectory,
    full_vs_effective_check,
    make_propagator,
    photon_number,
    schedule_trajectory,
)
from .model import (
    ModelParams,
    OperatorMatrix,
    StateVector,
    build_full_rabi,
    build_h0_eff,
    build_h0_full,
    build_h_eff,
    build_h_eff_flipped,
    build_parity,
    even_parity_block,
    vacuum_state,
)
from .protocol import Protocol, ProtocolKind, make_protocol

__all__ = [
    "ModelParams",
    "OperatorMatrix",
    "StateVector",
    "build_full_rabi",
    "build_h0_eff",
    "build_h0_full",
    "build_h_eff",
    "build_h_eff_flipped",
    "build_parity",
    "even_parity_block",
    "vacuum_state",
    "Propagator",
    "SpectralDecomposition",
    "Trajectory",
    "TrajectoryAnalysis",
    "analyze_trajectory",
    "diagonalize",
    "evolve_sequence",
    "free_trajectory",
    "full_vs_effective_check",
    "make_propagator",
    "photon_number",
    "schedule_trajectory",
    "Protocol",
    "ProtocolKind",
    "make_protocol",
]
