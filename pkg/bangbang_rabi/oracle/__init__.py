"""Independent approximate dynamics used to cross-check the exact engine."""

from .cumulant import (
    CumulantSeries,
    CumulantState,
    OracleComparison,
    Schedule,
    compare_with_exact,
    cumulant_rhs,
    initial_cumulant_state,
    integrate,
    oracle_compare,
)

__all__ = [
    "CumulantSeries",
    "CumulantState",
    "OracleComparison",
    "Schedule",
    "compare_with_exact",
    "cumulant_rhs",
    "initial_cumulant_state",
    "integrate",
    "oracle_compare",
]
