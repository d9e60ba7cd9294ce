"""Search for control sequences that maximize the photon number at the final time.

All searches share one candidate representation: a batch of effective-space states (one per
row) with their bit strings and photon numbers. Candidates are ranked by the composite key
(photon number descending, bit string ascending with 0 < 1), a total order, so results do not
depend on evaluation order or on the number of worker threads.
"""

import itertools
import logging
from collections.abc import Iterator
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import NDArray

from bangbang_rabi.config import (
    CHUNK_ROWS,
    DEFAULT_BEAM_EXPONENT,
    DEFAULT_DT,
    DEFAULT_TOTAL_TIME,
    MAX_BEAM_EXPONENT,
    MAX_EXHAUSTIVE_LENGTH,
)
from bangbang_rabi.errors import InvariantViolation, SearchGuardError
from bangbang_rabi.physics.evolution import (
    Propagator,
    Trajectory,
    evolve_sequence,
    photon_numbers,
)
from bangbang_rabi.physics.model import ComplexMatrix, ModelParams, vacuum_state
from bangbang_rabi.physics.protocol import Protocol, ProtocolKind, make_protocol
from bangbang_rabi.sequence import ControlSequence, sequence_length

logger = logging.getLogger(__name__)

# Below this many leading bits the exhaustive search expands whole subtrees at once.
EXHAUSTIVE_BLOCK_BITS = 14

# Agreement required between the value found by a batched search and its sequential replay.
SEARCH_CONSISTENCY_TOL = 1e-10


class Algorithm(str, Enum):
    GREEDY = "greedy"
    PGA = "pga"
    EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class SearchConfig:
    """One search problem: total time T, pulse duration dt, beam exponent N and the model."""

    total_time: float = DEFAULT_TOTAL_TIME
    dt: float = DEFAULT_DT
    beam_exponent: int = DEFAULT_BEAM_EXPONENT
    protocol: ProtocolKind = ProtocolKind.SWITCH_OFF
    params: ModelParams = field(default_factory=ModelParams)
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "protocol", ProtocolKind(self.protocol))
        length = sequence_length(self.total_time, self.dt)
        if length < 1:
            raise ValueError(f"Total time {self.total_time} holds no pulse of dt={self.dt}")
        if not 1 <= self.beam_exponent <= MAX_BEAM_EXPONENT:
            raise SearchGuardError(
                f"beam_exponent must be in [1, {MAX_BEAM_EXPONENT}], got {self.beam_exponent}"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")

    @property
    def length(self) -> int:
        return sequence_length(self.total_time, self.dt)

    @property
    def beam_width(self) -> int:
        return 2**self.beam_exponent

    def with_changes(self, **changes: Any) -> "SearchConfig":
        return replace(self, **changes)

    def make_protocol(self) -> Protocol:
        return make_protocol(self.params, self.dt, self.protocol)

    def to_dict(self) -> dict[str, Any]:
        return {
            "total_time": self.total_time,
            "dt": self.dt,
            "length": self.length,
            "beam_exponent": self.beam_exponent,
            "protocol": self.protocol.value,
            "workers": self.workers,
        }


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_sequence: ControlSequence
    best_photon_number: float
    trajectory: Trajectory
    evaluations: int
    algorithm: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "best_sequence": str(self.best_sequence),
            "best_photon_number": self.best_photon_number,
            "n_g": self.best_sequence.n_g,
            "n_0": self.best_sequence.n_0,
            "evaluations": self.evaluations,
        }


@dataclass(frozen=True)
class _OnesConstraint:
    """Prefixes that can still be completed to exactly ``n_g`` ones in ``length`` bits."""

    n_g: int
    length: int

    def feasible(self, ones: NDArray[np.int64], prefix_length: int) -> NDArray[np.bool_]:
        remaining = self.length - prefix_length
        return (ones <= self.n_g) & (ones + remaining >= self.n_g)


@dataclass
class _Candidates:
    states: ComplexMatrix
    bits: NDArray[np.uint8]
    photons: NDArray[np.float64]
    ones: NDArray[np.int64]

    def __len__(self) -> int:
        return int(self.photons.size)

    @property
    def prefix_length(self) -> int:
        return int(self.bits.shape[1])

    def take(self, index: NDArray[np.intp]) -> "_Candidates":
        return _Candidates(
            self.states[index], self.bits[index], self.photons[index], self.ones[index]
        )


def _root(dim: int) -> _Candidates:
    return _Candidates(
        states=vacuum_state(dim).amplitudes[np.newaxis, :].copy(),
        bits=np.zeros((1, 0), dtype=np.uint8),
        photons=np.zeros(1),
        ones=np.zeros(1, dtype=np.int64),
    )


@contextmanager
def _worker_pool(workers: int) -> Iterator[Executor | None]:
    if workers <= 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield pool


def _evolve_rows(
    states: ComplexMatrix, propagator: Propagator, pool: Executor | None
) -> tuple[ComplexMatrix, NDArray[np.float64]]:
    """Apply one pulse to every row; chunking is fixed, so threads never change the arithmetic."""
    chunks = [states[i : i + CHUNK_ROWS] for i in range(0, states.shape[0], CHUNK_ROWS)]

    def run(chunk: ComplexMatrix) -> tuple[ComplexMatrix, NDArray[np.float64]]:
        evolved = propagator.apply_rows(chunk)
        return evolved, photon_numbers(evolved)

    results = list(pool.map(run, chunks)) if pool is not None else [run(c) for c in chunks]
    return (
        np.concatenate([r[0] for r in results]),
        np.concatenate([r[1] for r in results]),
    )


def _extend(
    candidates: _Candidates,
    protocol: Protocol,
    pool: Executor | None,
    constraint: _OnesConstraint | None,
) -> _Candidates:
    """Append 0 and 1 to every candidate (children ordered: all 0-extensions, then 1s)."""
    off_states, off_photons = _evolve_rows(candidates.states, protocol.off_propagator, pool)
    on_states, on_photons = _evolve_rows(candidates.states, protocol.on_propagator, pool)
    count = len(candidates)
    zeros = np.zeros((count, 1), dtype=np.uint8)
    extended = _Candidates(
        states=np.concatenate([off_states, on_states]),
        bits=np.concatenate(
            [np.hstack([candidates.bits, zeros]), np.hstack([candidates.bits, zeros + 1])]
        ),
        photons=np.concatenate([off_photons, on_photons]),
        ones=np.concatenate([candidates.ones, candidates.ones + 1]),
    )
    if constraint is None:
        return extended
    keep = np.flatnonzero(constraint.feasible(extended.ones, extended.prefix_length))
    return extended.take(keep)


def _ranking(candidates: _Candidates) -> NDArray[np.intp]:
    """Indices sorted by (photon number descending, bit string ascending)."""
    bits = candidates.bits
    # np.lexsort treats its last key as the primary one.
    keys = [bits[:, j] for j in range(bits.shape[1] - 1, -1, -1)]
    keys.append(-candidates.photons)
    return np.lexsort(keys)


def _finalize(
    cfg: SearchConfig,
    protocol: Protocol,
    bits: tuple[int, ...],
    found_value: float,
    evaluations: int,
    algorithm: str,
) -> SearchResult:
    """Replay the winning sequence pulse by pulse; the replay value is the reported value."""
    sequence = ControlSequence(bits, cfg.dt)
    _, trajectory = evolve_sequence(
        sequence,
        protocol.on_propagator,
        protocol.off_propagator,
        vacuum_state(protocol.dim),
        record=True,
    )
    value = trajectory.final_photon_number
    if abs(value - found_value) > SEARCH_CONSISTENCY_TOL:
        raise InvariantViolation(
            f"Replay of {sequence} gives {value!r}, search reported {found_value!r}"
        )
    logger.info(
        "%s search: T=%g dt=%g -> %.6f (%d evaluations)",
        algorithm,
        cfg.total_time,
        cfg.dt,
        value,
        evaluations,
    )
    return SearchResult(
        best_sequence=sequence,
        best_photon_number=value,
        trajectory=trajectory,
        evaluations=evaluations,
        algorithm=algorithm,
    )


def _check_counts(cfg: SearchConfig, n_g: int, n_0: int) -> _OnesConstraint:
    if n_g < 0 or n_0 < 0:
        raise SearchGuardError(f"Bit counts must be non-negative, got n_g={n_g}, n_0={n_0}")
    if n_g + n_0 != cfg.length:
        raise SearchGuardError(
            f"n_g + n_0 = {n_g + n_0} does not match the sequence length {cfg.length}"
        )
    return _OnesConstraint(n_g=n_g, length=cfg.length)


def _greedy(
    cfg: SearchConfig, constraint: _OnesConstraint | None, algorithm: str
) -> SearchResult:
    protocol = cfg.make_protocol()
    u_on = protocol.on_propagator.matrix
    u_off = protocol.off_propagator.matrix
    psi = vacuum_state(protocol.dim).amplitudes
    m = np.arange(protocol.dim, dtype=np.float64)

    bits: list[int] = []
    ones = 0
    value = 0.0
    for step in range(1, cfg.length + 1):
        psi_on = u_on @ psi
        psi_off = u_off @ psi
        p_on = float((np.abs(psi_on) ** 2) @ m)
        p_off = float((np.abs(psi_off) ** 2) @ m)

        on_allowed = off_allowed = True
        if constraint is not None:
            on_allowed = bool(constraint.feasible(np.array([ones + 1]), step)[0])
            off_allowed = bool(constraint.feasible(np.array([ones]), step)[0])

        # Ties go to bit 1.
        if on_allowed and (not off_allowed or p_on >= p_off):
            bits.append(1)
            ones += 1
            psi, value = psi_on, p_on
        else:
            bits.append(0)
            psi, value = psi_off, p_off

    return _finalize(cfg, protocol, tuple(bits), value, 2 * cfg.length, algorithm)


def greedy_search(cfg: SearchConfig) -> SearchResult:
    """Pick, pulse by pulse, the bit giving more photons at the end of that pulse.

    Ties are broken toward bit 1.
    """
    return _greedy(cfg, None, Algorithm.GREEDY.value)


def _exhaustive(
    cfg: SearchConfig, constraint: _OnesConstraint | None, algorithm: str
) -> SearchResult:
    length = cfg.length
    if length > MAX_EXHAUSTIVE_LENGTH:
        raise SearchGuardError(
            f"Exhaustive search over {length} pulses exceeds the guard of "
            f"{MAX_EXHAUSTIVE_LENGTH} (2^{length} sequences)"
        )
    protocol = cfg.make_protocol()
    outer_bits = max(0, length - EXHAUSTIVE_BLOCK_BITS)

    best_key: tuple[float, tuple[int, ...]] | None = None
    evaluations = 0
    with _worker_pool(cfg.workers) as pool:
        # Outer prefixes in lexicographic order; each block expands its whole subtree.
        for prefix in itertools.product((0, 1), repeat=outer_bits):
            block = _root(protocol.dim)
            for bit in prefix:
                states = protocol.propagator(bit).apply_rows(block.states)
                block = _Candidates(
                    states,
                    np.hstack([block.bits, np.full((1, 1), bit, dtype=np.uint8)]),
                    photon_numbers(states),
                    block.ones + bit,
                )
            if constraint is not None and not constraint.feasible(block.ones, outer_bits)[0]:
                continue

            for _ in range(length - outer_bits):
                block = _extend(block, protocol, pool, constraint)
            if len(block) == 0:
                continue
            evaluations += len(block)

            top = int(_ranking(block)[0])
            key = (-float(block.photons[top]), tuple(int(b) for b in block.bits[top]))
            if best_key is None or key < best_key:
                best_key = key

    if best_key is None:
        raise SearchGuardError("No feasible control sequence exists for these bit counts")
    return _finalize(cfg, protocol, best_key[1], -best_key[0], evaluations, algorithm)


def exhaustive_search(cfg: SearchConfig) -> SearchResult:
    """Evaluate all 2^L sequences; ties go to the lexicographically smallest bit string.

    Raises:
        SearchGuardError: If L exceeds MAX_EXHAUSTIVE_LENGTH.
    """
    return _exhaustive(cfg, None, Algorithm.EXHAUSTIVE.value)


def _pga(cfg: SearchConfig, constraint: _OnesConstraint | None, algorithm: str) -> SearchResult:
    length = cfg.length
    if length <= cfg.beam_exponent:
        return _exhaustive(cfg, constraint, algorithm)

    protocol = cfg.make_protocol()
    width = cfg.beam_width
    candidates = _root(protocol.dim)
    evaluations = 0
    with _worker_pool(cfg.workers) as pool:
        # All (feasible) prefixes of length N form the first search subspace.
        for _ in range(cfg.beam_exponent):
            candidates = _extend(candidates, protocol, pool, constraint)
            evaluations += len(candidates)

        for _ in range(cfg.beam_exponent, length):
            candidates = _extend(candidates, protocol, pool, constraint)
            evaluations += len(candidates)
            candidates = candidates.take(_ranking(candidates)[:width])

    if len(candidates) == 0:
        raise SearchGuardError("No feasible control sequence exists for these bit counts")
    top = int(_ranking(candidates)[0])
    bits = tuple(int(b) for b in candidates.bits[top])
    return _finalize(
        cfg, protocol, bits, float(candidates.photons[top]), evaluations, algorithm
    )


def pga_search(cfg: SearchConfig) -> SearchResult:
    """Pruning greedy search: a beam of 2^N bit-string prefixes.

    When L <= N this is the exhaustive search. Otherwise the beam starts with all 2^N prefixes
    of length N, and each further pulse extends every prefix by 0 and 1, sorts the 2^(N+1)
    candidates by photon number (decreasing) and keeps the first 2^N.
    """
    return _pga(cfg, None, Algorithm.PGA.value)


def constrained_search(
    cfg: SearchConfig, n_g: int, n_0: int, algorithm: Algorithm | str = Algorithm.PGA
) -> SearchResult:
    """Best sequence with exactly ``n_g`` ones and ``n_0`` zeros.

    The PGA variant drops prefixes that can no longer reach exactly n_g ones; the greedy variant
    takes the forced bit whenever only one choice stays feasible.

    Raises:
        SearchGuardError: If the counts are negative or do not add up to the sequence length.
    """
    constraint = _check_counts(cfg, n_g, n_0)
    algorithm = Algorithm(algorithm)
    tag = f"constrained-{algorithm.value}"
    if algorithm is Algorithm.GREEDY:
        return _greedy(cfg, constraint, tag)
    if algorithm is Algorithm.EXHAUSTIVE:
        return _exhaustive(cfg, constraint, tag)
    return _pga(cfg, constraint, tag)


def run_search(cfg: SearchConfig, algorithm: Algorithm | str) -> SearchResult:
    """Dispatch on the algorithm name used by the command line."""
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.GREEDY:
        return greedy_search(cfg)
    if algorithm is Algorithm.EXHAUSTIVE:
        return exhaustive_search(cfg)
    return pga_search(cfg)
