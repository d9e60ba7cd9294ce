"""Defaults, tolerances and worker resolution shared by every module."""

import os

# Units: omega_c = 1, times in 1/omega_c.
DEFAULT_OMEGA_C = 1.0
DEFAULT_OMEGA_A = 1.0
DEFAULT_G = 0.1
DEFAULT_N_MAX = 60

DEFAULT_DT = 0.2
DEFAULT_TOTAL_TIME = 15.0
DEFAULT_BEAM_EXPONENT = 12
DEFAULT_SAMPLE_DT = 0.01
DEFAULT_RK4_STEP = 1e-3

MAX_BEAM_EXPONENT = 24
MAX_EXHAUSTIVE_LENGTH = 24

HERMITIAN_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
UNITARY_TOL = 1e-10
NORM_TOL = 1e-10
TAIL_TOL = 1e-12
REPLAY_TOL = 1e-12
PHOTON_FLOOR = -1e-12
LENGTH_TOL = 1e-9

# Full Rabi model against the effective model, photon numbers over a free evolution.
EQUIVALENCE_TOL = 1e-8

# Rows per work item when candidate states are evaluated in parallel. Fixed so that the
# arithmetic does not depend on how many workers share the chunks.
CHUNK_ROWS = 256

SCHEMA_VERSION = "1.0"

THREADS_ENV_VAR = "BANGBANG_RABI_THREADS"


def resolve_workers(workers: int | None = None) -> int:
    """Resolve the worker count for parallel candidate evaluation.

    Args:
        workers: Explicit worker count. If None, will try the BANGBANG_RABI_THREADS env var,
            then fall back to the number of CPU cores.

    Returns:
        A positive worker count.

    Raises:
        ValueError: If the explicit or environment value is not a positive integer.
    """
    if workers is None:
        env_value = os.getenv(THREADS_ENV_VAR)
        if env_value:
            try:
                workers = int(env_value)
            except ValueError:
                raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {env_value!r}")
        else:
            workers = os.cpu_count() or 1

    if workers < 1:
        raise ValueError(f"Worker count must be positive, got {workers}")
    return workers
