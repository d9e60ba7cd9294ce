"""Parameter scans built from independent searches."""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TypeVar

import numpy as np
from numpy.typing import NDArray

from bangbang_rabi.control.search import (
    Algorithm,
    SearchConfig,
    constrained_search,
    greedy_search,
    pga_search,
)
from bangbang_rabi.physics.protocol import ProtocolKind

logger = logging.getLogger(__name__)

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


def _ordered_map(
    func: Callable[[ItemT], ResultT], items: Sequence[ItemT], workers: int
) -> list[ResultT]:
    """Map in input order; each item is a self-contained job."""
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _check_grid(name: str, values: Sequence[float]) -> NDArray[np.float64]:
    grid = np.asarray(values, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError(f"{name} grid must be a non-empty list of numbers")
    if np.any(np.diff(grid) <= 0):
        raise ValueError(f"{name} grid must be strictly ascending, got {list(grid)}")
    return grid


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Greedy photon numbers; ``values[i, j]`` belongs to omega_a[i] and T[j]."""

    omega_a: NDArray[np.float64]
    total_times: NDArray[np.float64]
    values: NDArray[np.float64]
    protocol: ProtocolKind

    def rows(self) -> list[dict[str, float]]:
        """Long format (omega_a, T, n_ph), omega_a-major."""
        return [
            {"omega_a": float(w), "T": float(t), "n_ph": float(self.values[i, j])}
            for i, w in enumerate(self.omega_a)
            for j, t in enumerate(self.total_times)
        ]


def sweep_omega_a(
    base_cfg: SearchConfig, omega_a_grid: Sequence[float], t_grid: Sequence[float]
) -> SweepGrid:
    """Greedy N_ph for every (omega_a, T) cell, one independent greedy run per cell."""
    omegas = _check_grid("omega_a", omega_a_grid)
    times = _check_grid("T", t_grid)
    cells = [(float(w), float(t)) for w in omegas for t in times]

    def run(cell: tuple[float, float]) -> float:
        omega_a, total_time = cell
        cfg = base_cfg.with_changes(
            total_time=total_time,
            params=base_cfg.params.with_changes(omega_a=omega_a),
            workers=1,
        )
        return greedy_search(cfg).best_photon_number

    values = np.array(_ordered_map(run, cells, base_cfg.workers))
    logger.info("omega_a sweep: %d cells, protocol %s", len(cells), base_cfg.protocol.value)
    return SweepGrid(
        omega_a=omegas,
        total_times=times,
        values=values.reshape(omegas.size, times.size),
        protocol=base_cfg.protocol,
    )


def sweep_omega_a_sigmaz(
    base_cfg: SearchConfig, omega_a_grid: Sequence[float], t_grid: Sequence[float]
) -> SweepGrid:
    """As sweep_omega_a, under the sigma_z sign-flip protocol."""
    return sweep_omega_a(
        base_cfg.with_changes(protocol=ProtocolKind.SIGN_FLIP), omega_a_grid, t_grid
    )


@dataclass(frozen=True, eq=False)
class PhotonCurve:
    total_times: NDArray[np.float64]
    pga: NDArray[np.float64]
    greedy: NDArray[np.float64]

    def rows(self) -> list[dict[str, float]]:
        return [
            {"T": float(t), "n_pga": float(p), "n_greedy": float(g)}
            for t, p, g in zip(self.total_times, self.pga, self.greedy)
        ]


def photon_curve(base_cfg: SearchConfig, t_grid: Sequence[float]) -> PhotonCurve:
    """Maximum photon number at time T from the PGA and from the greedy search, per T."""
    times = _check_grid("T", t_grid)
    pga_values = []
    greedy_values = []
    for total_time in times:
        cfg = base_cfg.with_changes(total_time=float(total_time))
        pga_values.append(pga_search(cfg).best_photon_number)
        greedy_values.append(greedy_search(cfg).best_photon_number)
    return PhotonCurve(times, np.array(pga_values), np.array(greedy_values))


@dataclass(frozen=True, eq=False)
class DtConvergence:
    total_times: NDArray[np.float64]
    dt_fine: float
    dt_coarse: float
    fine: NDArray[np.float64]
    coarse: NDArray[np.float64]

    @property
    def max_gap(self) -> float:
        return float(np.max(np.abs(self.fine - self.coarse)))

    def rows(self) -> list[dict[str, float]]:
        return [
            {"T": float(t), "n_fine": float(a), "n_coarse": float(b), "gap": float(abs(a - b))}
            for t, a, b in zip(self.total_times, self.fine, self.coarse)
        ]


def dt_convergence(
    base_cfg: SearchConfig,
    t_grid: Sequence[float],
    dt_fine: float = 0.1,
    dt_coarse: float = 0.2,
) -> DtConvergence:
    """Paired PGA curves at two pulse durations; every T must be a multiple of both."""
    times = _check_grid("T", t_grid)

    def curve(dt: float) -> NDArray[np.float64]:
        return np.array(
            [
                pga_search(base_cfg.with_changes(total_time=float(t), dt=dt)).best_photon_number
                for t in times
            ]
        )

    fine = curve(dt_fine)
    coarse = fine.copy() if dt_coarse == dt_fine else curve(dt_coarse)
    result = DtConvergence(times, dt_fine, dt_coarse, fine, coarse)
    logger.info("dt convergence: max gap %.4f", result.max_gap)
    return result


@dataclass(frozen=True)
class ConstrainedRow:
    n_0: int
    value_pga: float
    value_greedy: float


def constrained_scan(
    base_cfg: SearchConfig, n_g: int, n_0_values: Sequence[int]
) -> list[ConstrainedRow]:
    """Best photon numbers with n_g pulses on and n_0 off, for every n_0 (T = (n_g+n_0) dt).

    The empty sequence (n_g = n_0 = 0) has no row.

    Raises:
        ValueError: If no requested n_0 gives a non-empty sequence.
    """
    rows = []
    for n_0 in n_0_values:
        if n_g + n_0 < 1:
            logger.info("constrained scan: skipping the empty sequence n_g = n_0 = 0")
            continue
        cfg = base_cfg.with_changes(total_time=(n_g + n_0) * base_cfg.dt)
        rows.append(
            ConstrainedRow(
                n_0=int(n_0),
                value_pga=constrained_search(cfg, n_g, n_0, Algorithm.PGA).best_photon_number,
                value_greedy=constrained_search(
                    cfg, n_g, n_0, Algorithm.GREEDY
                ).best_photon_number,
            )
        )
    if not rows:
        raise ValueError("n_g + n_0 must be at least 1 for some requested n_0")
    return rows
