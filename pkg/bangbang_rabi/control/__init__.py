"""Control-sequence searches and the scans built on them."""

from .search import (
    Algorithm,
    SearchConfig,
    SearchResult,
    constrained_search,
    exhaustive_search,
    greedy_search,
    pga_search,
    run_search,
)
from .sweeps import (
    ConstrainedRow,
    DtConvergence,
    PhotonCurve,
    SweepGrid,
    constrained_scan,
    dt_convergence,
    photon_curve,
    sweep_omega_a,
    sweep_omega_a_sigmaz,
)

__all__ = [
    "Algorithm",
    "SearchConfig",
    "SearchResult",
    "constrained_search",
    "exhaustive_search",
    "greedy_search",
    "pga_search",
    "run_search",
    "ConstrainedRow",
    "DtConvergence",
    "PhotonCurve",
    "SweepGrid",
    "constrained_scan",
    "dt_convergence",
    "photon_curve",
    "sweep_omega_a",
    "sweep_omega_a_sigmaz",
]
