"""Cumulant-truncated Heisenberg equations of the effective model, integrated with RK4.

The twelve tracked expectation values are those of

    x = b^dag + b, p = i(b^dag - b), n = b^dag b, gamma = (-1)^n,
    delta = (i/2)[x, gamma]_-,  epsilon = (i/2)[p, gamma]_-,
    alpha = x^2, beta = p^2, theta = (xp + px)/2,
    kappa = {alpha, gamma}/2, lambda = {beta, gamma}/2, mu = {theta, gamma}/2,

with fourth-order moments factorized by the cumulant expansion. The result only approximates
the exact dynamics; it serves as an independent check of the spectral engine, never the
other way round.
"""

import logging
from collections.abc import Sequence
from dataclasses import astuple, dataclass, fields

import numpy as np
from numpy.typing import NDArray

from bangbang_rabi.config import DEFAULT_RK4_STEP, LENGTH_TOL
from bangbang_rabi.physics.evolution import schedule_trajectory
from bangbang_rabi.physics.model import ModelParams
from bangbang_rabi.physics.protocol import ProtocolKind
from bangbang_rabi.sequence import ControlSequence

logger = logging.getLogger(__name__)

GAMMA_WARN_TOL = 1e-3
PHOTON_WARN_TOL = 1e-6


@dataclass(frozen=True)
class CumulantState:
    x: float
    p: float
    n: float
    gamma: float
    delta: float
    epsilon: float
    alpha: float
    beta: float
    theta: float
    kappa: float
    lambda_: float
    mu: float

    def to_array(self) -> NDArray[np.float64]:
        return np.array(astuple(self), dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float] | NDArray[np.float64]) -> "CumulantState":
        if len(values) != 12:
            raise ValueError(f"A cumulant state has 12 components, got {len(values)}")
        return cls(*(float(v) for v in values))

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def initial_cumulant_state() -> CumulantState:
    """The vacuum: gamma = alpha = beta = kappa = mu = 1, everything else 0."""
    return CumulantState(
        x=0.0,
        p=0.0,
        n=0.0,
        gamma=1.0,
        delta=0.0,
        epsilon=0.0,
        alpha=1.0,
        beta=1.0,
        theta=0.0,
        kappa=1.0,
        lambda_=0.0,
        mu=1.0,
    )


def _rhs(
    y: NDArray[np.float64], omega_c: float, omega_a: float, g: float
) -> NDArray[np.float64]:
    x, p, _n, _gamma, delta, epsilon, alpha, beta, theta, kappa, lam, mu = y
    return np.array(
        [
            omega_c * p + omega_a * delta,
            -omega_c * x + omega_a * epsilon - 2 * g,
            -g * p,
            2 * g * delta,
            omega_c * epsilon - omega_a * x - 2 * g * kappa,
            -omega_c * delta - omega_a * p - 2 * g * lam,
            2 * omega_c * theta,
            -2 * omega_c * theta - 4 * g * p,
            -omega_c * alpha + omega_c * beta - 2 * g * x,
            2 * omega_c * lam + 6 * g * alpha * delta - 12 * g * x**2 * delta,
            -omega_c * kappa
            + omega_c * mu
            + 2 * g * alpha * epsilon
            - 4 * g * x**2 * epsilon
            - 8 * g * x * p * delta
            + 4 * g * theta * delta,
            -2 * omega_c * lam
            + 2 * g * beta * delta
            + 4 * g * theta * epsilon
            - 4 * g * p**2 * delta
            - 8 * g * x * p * epsilon,
        ]
    )


def cumulant_rhs(s: CumulantState, omega_c: float, omega_a: float, g: float) -> CumulantState:
    """Time derivatives of all twelve expectation values."""
    return CumulantState.from_array(_rhs(s.to_array(), omega_c, omega_a, g))


@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant coupling: ordered (duration, g) segments."""

    segments: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        segments = tuple((float(d), float(g)) for d, g in self.segments)
        for duration, _ in segments:
            if not duration > 0:
                raise ValueError(f"Segment durations must be positive, got {duration}")
        object.__setattr__(self, "segments", segments)

    @property
    def total_duration(self) -> float:
        return sum(d for d, _ in self.segments)

    @classmethod
    def from_sequence(
        cls, seq: ControlSequence, g: float, kind: ProtocolKind | str
    ) -> "Schedule":
        """One segment per bit: g for 1; 0 (switch-off) or -g (sign-flip) for 0."""
        off = ProtocolKind(kind).off_coupling(g)
        return cls(tuple((seq.dt, g if bit else off) for bit in seq.bits))


@dataclass(frozen=True, eq=False)
class CumulantSeries:
    """Integrated states at every RK4 step (rows) with their times."""

    times: NDArray[np.float64]
    states: NDArray[np.float64]

    @property
    def photon_numbers(self) -> NDArray[np.float64]:
        return self.states[:, 2]

    def at(self, index: int) -> CumulantState:
        return CumulantState.from_array(self.states[index])


def _steps_in(duration: float, step: float) -> int:
    count = int(round(duration / step))
    if count < 1 or abs(count * step - duration) > LENGTH_TOL:
        raise ValueError(f"RK4 step {step} does not divide segment duration {duration}")
    return count


def integrate(
    s0: CumulantState,
    schedule: Schedule,
    omega_c: float,
    omega_a: float,
    step: float = DEFAULT_RK4_STEP,
) -> CumulantSeries:
    """Classic fixed-step RK4; g jumps only at segment boundaries, never inside a step.

    Raises:
        ValueError: If ``step`` is not positive or does not divide every segment.
    """
    if not step > 0:
        raise ValueError(f"RK4 step must be positive, got {step}")
    counts = [_steps_in(duration, step) for duration, _ in schedule.segments]

    y = s0.to_array()
    states = [y]
    times = [0.0]
    t_start = 0.0
    for (duration, g), count in zip(schedule.segments, counts):
        for k in range(1, count + 1):
            k1 = _rhs(y, omega_c, omega_a, g)
            k2 = _rhs(y + 0.5 * step * k1, omega_c, omega_a, g)
            k3 = _rhs(y + 0.5 * step * k2, omega_c, omega_a, g)
            k4 = _rhs(y + step * k3, omega_c, omega_a, g)
            y = y + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            states.append(y)
            times.append(t_start + k * step)
        t_start += duration

    series = CumulantSeries(np.array(times), np.array(states))
    _warn_on_drift(series)
    return series


def _warn_on_drift(series: CumulantSeries) -> None:
    lowest = float(series.photon_numbers.min())
    if lowest < -PHOTON_WARN_TOL:
        logger.warning("cumulant photon number went negative (%.3e)", lowest)
    largest_gamma = float(np.abs(series.states[:, 3]).max())
    if largest_gamma > 1 + GAMMA_WARN_TOL:
        logger.warning("|gamma| reached %.6f; truncation error is significant", largest_gamma)


@dataclass(frozen=True, eq=False)
class OracleComparison:
    times: NDArray[np.float64]
    n_exact: NDArray[np.float64]
    n_oracle: NDArray[np.float64]

    @property
    def max_abs_deviation(self) -> float:
        return float(np.max(np.abs(self.n_exact - self.n_oracle)))

    def rows(self) -> list[dict[str, float]]:
        return [
            {"t": float(t), "n_exact": float(a), "n_oracle": float(b)}
            for t, a, b in zip(self.times, self.n_exact, self.n_oracle)
        ]


def compare_with_exact(
    params: ModelParams,
    schedule: Schedule,
    step: float = DEFAULT_RK4_STEP,
    sample_dt: float | None = None,
) -> OracleComparison:
    """Cumulant photon numbers against exact diagonalization on the same sample times.

    Samples are taken every ``sample_dt`` within segments (a multiple of ``step``) and at every
    segment boundary; by default only at boundaries.
    """
    if sample_dt is None:
        sample_dt = max(d for d, _ in schedule.segments)
    _steps_in(sample_dt, step)

    series = integrate(initial_cumulant_state(), schedule, params.omega_c, params.omega_a, step)
    exact = schedule_trajectory(params, schedule.segments, sample_dt)
    index = np.rint(exact.times / step).astype(int)
    return OracleComparison(
        times=exact.times,
        n_exact=exact.photon_numbers,
        n_oracle=series.photon_numbers[index],
    )


def oracle_compare(
    seq: ControlSequence,
    params: ModelParams,
    protocol_kind: ProtocolKind | str,
    step: float = DEFAULT_RK4_STEP,
) -> float:
    """Max |n_oracle - N_ph| over the bit boundaries of ``seq``."""
    schedule = Schedule.from_sequence(seq, params.g, protocol_kind)
    return compare_with_exact(params, schedule, step, sample_dt=seq.dt).max_abs_deviation
