"""Spectral time evolution under piecewise-constant Hamiltonians."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from bangbang_rabi.config import (
    NORM_TOL,
    PHOTON_FLOOR,
    RECONSTRUCTION_TOL,
    TAIL_TOL,
    UNITARY_TOL,
)
from bangbang_rabi.errors import InvariantViolation, MonotoneTrajectoryError, TruncationError
from bangbang_rabi.physics.model import (
    ComplexMatrix,
    ModelParams,
    OperatorMatrix,
    StateVector,
    build_full_rabi,
    build_h_eff,
    effective_hamiltonian,
    full_space_photon_diagonal,
    number_diagonal,
    vacuum_state,
)
from bangbang_rabi.sequence import ControlSequence

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """H = V diag(eigenvalues) V^dagger with eigenvalues ascending."""

    eigenvalues: FloatArray
    eigenvectors: ComplexMatrix
    source_label: str = ""

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return np.asarray((v * self.eigenvalues) @ v.conj().T)


@dataclass(frozen=True, eq=False)
class Propagator:
    """exp(-i H dt) for one pulse; ``source_label`` is "on", "off" or "flipped"."""

    dt: float
    matrix: ComplexMatrix
    source_label: str

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.complex128)
        deviation = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))
        if deviation > UNITARY_TOL:
            raise InvariantViolation(
                f"Propagator '{self.source_label}' is not unitary: "
                f"max|U^dagger U - I| = {deviation:.3e}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def apply(self, state: StateVector) -> StateVector:
        return StateVector(self.matrix @ state.amplitudes)

    def apply_rows(self, states: ComplexMatrix) -> ComplexMatrix:
        """Evolve a batch stored one state per row."""
        return np.asarray(states @ self.matrix.T)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Photon number sampled in time.

    ``control_bits[i]`` is the bit applied over (t[i-1], t[i]]; index 0 carries -1.
    """

    times: FloatArray
    photon_numbers: FloatArray
    control_bits: NDArray[np.int8] | None = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        photons = np.asarray(self.photon_numbers, dtype=np.float64)
        if times.shape != photons.shape:
            raise ValueError(f"Length mismatch: {times.size} times, {photons.size} photon numbers")
        if photons.size and float(photons.min()) < PHOTON_FLOOR:
            raise InvariantViolation(f"Negative photon number {photons.min():.3e} in trajectory")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "photon_numbers", np.maximum(photons, 0.0))
        if self.control_bits is not None:
            bits = np.asarray(self.control_bits, dtype=np.int8)
            if bits.shape != times.shape:
                raise ValueError(f"Length mismatch: {times.size} times, {bits.size} control bits")
            object.__setattr__(self, "control_bits", bits)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def final_photon_number(self) -> float:
        return float(self.photon_numbers[-1])


@dataclass(frozen=True)
class TrajectoryAnalysis:
    t0: float
    first_max: float
    global_max: float
    global_max_time: float


def diagonalize(hamiltonian: OperatorMatrix) -> SpectralDecomposition:
    """Exact diagonalization of a hermitian operator.

    Raises:
        ValueError: If the operator is not flagged hermitian.
        InvariantViolation: If V diag(E) V^dagger does not reproduce H to RECONSTRUCTION_TOL.
    """
    if not hamiltonian.hermitian:
        raise ValueError(f"Cannot diagonalize non-hermitian operator {hamiltonian.label!r}")

    entries = hamiltonian.entries
    diagonal = np.real(np.diag(entries))
    if not np.any(entries - np.diag(np.diag(entries))):
        # Diagonal input: permuted unit eigenvectors, so Fock populations are kept exactly.
        order = np.argsort(diagonal, kind="stable")
        eigenvalues = diagonal[order]
        eigenvectors = np.eye(hamiltonian.dim)[:, order]
    else:
        eigenvalues, eigenvectors = scipy.linalg.eigh(entries)
    decomposition = SpectralDecomposition(
        eigenvalues=np.asarray(eigenvalues, dtype=np.float64),
        eigenvectors=np.asarray(eigenvectors, dtype=np.complex128),
        source_label=hamiltonian.label,
    )
    error = float(np.max(np.abs(decomposition.reconstruct() - hamiltonian.entries)))
    if error > RECONSTRUCTION_TOL:
        raise InvariantViolation(
            f"Spectral reconstruction of {hamiltonian.label!r} off by {error:.3e}"
        )
    return decomposition


def make_propagator(
    decomposition: SpectralDecomposition, dt: float, source_label: str = "on"
) -> Propagator:
    """U = V exp(-i E dt) V^dagger.

    Negative ``dt`` gives the backward propagator, so U(dt) U(-dt) = I.
    """
    if dt == 0 or not np.isfinite(dt):
        raise ValueError(f"dt must be finite and non-zero, got {dt}")
    v = decomposition.eigenvectors
    phases = np.exp(-1j * decomposition.eigenvalues * dt)
    return Propagator(dt=dt, matrix=(v * phases) @ v.conj().T, source_label=source_label)


@lru_cache(maxsize=64)
def cached_decomposition(params: ModelParams, coupling: float) -> SpectralDecomposition:
    return diagonalize(effective_hamiltonian(params, coupling))


@lru_cache(maxsize=128)
def cached_propagator(
    params: ModelParams, coupling: float, dt: float, source_label: str
) -> Propagator:
    """Effective-space propagator, built once per (params, coupling, dt)."""
    return make_propagator(cached_decomposition(params, coupling), dt, source_label)


def photon_number(psi: StateVector) -> float:
    """<b^dag b> = sum_m m |psi_m|^2 on the effective space."""
    weights = np.abs(psi.amplitudes) ** 2
    return float(weights @ number_diagonal(psi.dim))


def photon_numbers(states: ComplexMatrix) -> FloatArray:
    """Row-wise photon numbers of a batch of effective-space states."""
    return np.asarray((np.abs(states) ** 2) @ number_diagonal(states.shape[1]))


def full_space_photon_numbers(states: ComplexMatrix, params: ModelParams) -> FloatArray:
    """Row-wise <a^dag a> of a batch of states in the 2m + s basis."""
    return np.asarray((np.abs(states) ** 2) @ full_space_photon_diagonal(params))


def tail_weight(psi: StateVector) -> float:
    """Probability on the last Fock level."""
    return float(np.abs(psi.amplitudes[-1]) ** 2)


def check_truncation(psi: StateVector, tolerance: float = TAIL_TOL) -> None:
    weight = tail_weight(psi)
    if weight > tolerance:
        raise TruncationError(
            f"Weight {weight:.3e} on the last Fock level exceeds {tolerance:.1e}; "
            "increase n_max"
        )


def evolve_sequence(
    seq: ControlSequence,
    u_on: Propagator,
    u_off: Propagator,
    psi0: StateVector,
    record: bool = True,
    check_tail: bool = True,
) -> tuple[StateVector, Trajectory]:
    """Apply U_on for every 1 and U_off for every 0, left to right.

    Args:
        seq: The control sequence.
        u_on: Propagator used for bit 1.
        u_off: Propagator used for bit 0.
        psi0: Initial effective-space state.
        record: Sample the photon number at every bit boundary. Otherwise the trajectory holds
            only t=0 and t=T.
        check_tail: Raise if the final state leaks onto the last Fock level.

    Returns:
        The normalized final state and the photon-number trajectory.

    Raises:
        ValueError: If dimensions or pulse durations do not match.
        InvariantViolation: If the norm drifts by more than NORM_TOL.
        TruncationError: If the final tail weight exceeds TAIL_TOL.
    """
    if not (u_on.dim == u_off.dim == psi0.dim):
        raise ValueError(
            f"Dimension mismatch: U_on {u_on.dim}, U_off {u_off.dim}, state {psi0.dim}"
        )
    if abs(u_on.dt - u_off.dt) > 1e-15 or abs(u_on.dt - seq.dt) > 1e-12:
        raise ValueError(
            f"Pulse duration mismatch: U_on {u_on.dt}, U_off {u_off.dt}, sequence {seq.dt}"
        )

    psi = psi0.amplitudes
    photons = [photon_number(psi0)]
    for bit in seq.bits:
        psi = (u_on.matrix if bit else u_off.matrix) @ psi
        if record:
            photons.append(float((np.abs(psi) ** 2) @ number_diagonal(psi.size)))

    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > NORM_TOL:
        raise InvariantViolation(f"State norm drifted to {norm!r} after {len(seq)} pulses")
    final = StateVector(psi / norm)
    if check_tail:
        check_truncation(final)

    if record:
        times = np.arange(len(seq) + 1) * seq.dt
        bits = np.array((-1,) + seq.bits, dtype=np.int8)
        return final, Trajectory(times, np.array(photons), bits)

    times = np.array([0.0, seq.total_time])
    return final, Trajectory(times, np.array([photons[0], photon_number(final)]))


def uniform_times(t_max: float, sample_dt: float) -> FloatArray:
    """0, sample_dt, ..., up to t_max (inclusive when t_max is a multiple of sample_dt)."""
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if not sample_dt > 0:
        raise ValueError(f"sample_dt must be positive, got {sample_dt}")
    n_steps = int(np.floor(t_max / sample_dt + 1e-9))
    return np.arange(n_steps + 1) * sample_dt


def spectral_states(
    decomposition: SpectralDecomposition, psi0: StateVector, times: FloatArray
) -> ComplexMatrix:
    """exp(-i H t) psi0 for every t, one state per row."""
    v = decomposition.eigenvectors
    coefficients = v.conj().T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(times, decomposition.eigenvalues))
    return np.asarray((phases * coefficients) @ v.T)


def free_trajectory(
    params: ModelParams, t_max: float, sample_dt: float, check_tail: bool = True
) -> Trajectory:
    """Photon number under the effective Hamiltonian from the vacuum, on a uniform grid."""
    times = uniform_times(t_max, sample_dt)
    states = spectral_states(
        cached_decomposition(params, params.g), vacuum_state(params.effective_dim), times
    )
    if check_tail:
        worst = int(np.argmax(np.abs(states[:, -1])))
        check_truncation(StateVector(states[worst]))
    return Trajectory(times, photon_numbers(states))


def schedule_trajectory(
    params: ModelParams,
    segments: Sequence[tuple[float, float]],
    sample_dt: float,
    check_tail: bool = True,
) -> Trajectory:
    """Exact photon trajectory for piecewise-constant coupling g(t).

    Each segment is ``(duration, coupling)``; samples are taken every ``sample_dt`` inside a
    segment and at every segment boundary.
    """
    if not sample_dt > 0:
        raise ValueError(f"sample_dt must be positive, got {sample_dt}")

    psi = vacuum_state(params.effective_dim)
    times = [0.0]
    photons = [0.0]
    t_start = 0.0
    for duration, coupling in segments:
        if not duration > 0:
            raise ValueError(f"Segment durations must be positive, got {duration}")
        local = uniform_times(duration, sample_dt)[1:]
        if local.size == 0 or abs(local[-1] - duration) > 1e-9:
            local = np.append(local, duration)
        states = spectral_states(cached_decomposition(params, coupling), psi, local)
        times.extend(t_start + local)
        photons.extend(photon_numbers(states))
        psi = StateVector(states[-1])
        t_start += duration

    if check_tail:
        check_truncation(psi)
    return Trajectory(np.array(times), np.array(photons))


def analyze_trajectory(traj: Trajectory) -> TrajectoryAnalysis:
    """Locate t0 (first strict three-point local maximum) and the global maximum.

    Raises:
        ValueError: If fewer than three samples are given.
        MonotoneTrajectoryError: If no interior sample exceeds both neighbours.
    """
    photons = traj.photon_numbers
    if photons.size < 3:
        raise ValueError(f"Need at least 3 samples to find a maximum, got {photons.size}")

    interior = (photons[1:-1] > photons[:-2]) & (photons[1:-1] > photons[2:])
    peaks = np.flatnonzero(interior) + 1
    if peaks.size == 0:
        raise MonotoneTrajectoryError("monotone trajectory: no interior local maximum")

    first = int(peaks[0])
    best = int(np.argmax(photons))
    return TrajectoryAnalysis(
        t0=float(traj.times[first]),
        first_max=float(photons[first]),
        global_max=float(photons[best]),
        global_max_time=float(traj.times[best]),
    )


def full_vs_effective_check(params: ModelParams, t_max: float, dt: float) -> float:
    """Max |<a^dag a> - <b^dag b>| between the full Rabi model and the effective model.

    The full model starts from |0, g>, the effective one from |0>; both are sampled on the same
    uniform grid.
    """
    times = uniform_times(t_max, dt)

    full_states = spectral_states(
        diagonalize(build_full_rabi(params)), vacuum_state(params.full_dim), times
    )
    full_photons = full_space_photon_numbers(full_states, params)

    effective_states = spectral_states(
        diagonalize(build_h_eff(params)), vacuum_state(params.effective_dim), times
    )
    deviation = float(np.max(np.abs(full_photons - photon_numbers(effective_states))))
    logger.info("full vs effective deviation %.3e (n_max=%d)", deviation, params.n_max)
    return deviation
