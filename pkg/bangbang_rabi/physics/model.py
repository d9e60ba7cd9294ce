"""Hamiltonians and observables of the Rabi model in truncated Fock spaces.

Two Hilbert spaces are used:

- the effective space, basis |0>, ..., |n_max> of the single boson mode b that lives on the
  even-parity sector of the atom-cavity system;
- the full space of cavity (truncated at n_max photons) tensor atom, with basis index
  ``2 * m + s`` where ``s = 0`` is |g> and ``s = 1`` is |e>.

All frequencies and couplings are in units of omega_c.
"""

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from bangbang_rabi.config import (
    DEFAULT_G,
    DEFAULT_N_MAX,
    DEFAULT_OMEGA_A,
    DEFAULT_OMEGA_C,
    HERMITIAN_TOL,
)
from bangbang_rabi.errors import InvariantViolation

ComplexMatrix = NDArray[np.complex128]
ComplexVector = NDArray[np.complex128]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants and the Fock truncation of one simulation."""

    omega_c: float = DEFAULT_OMEGA_C
    omega_a: float = DEFAULT_OMEGA_A
    g: float = DEFAULT_G
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self) -> None:
        if not self.omega_c > 0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")
        if not self.omega_a >= 0:
            raise ValueError(f"omega_a must be non-negative, got {self.omega_a}")
        if not self.g >= 0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max}")

    @property
    def effective_dim(self) -> int:
        return self.n_max + 1

    @property
    def full_dim(self) -> int:
        return 2 * (self.n_max + 1)

    def with_changes(self, **changes: float | int) -> "ModelParams":
        """Return a copy with some fields replaced (validated again)."""
        return replace(self, **changes)  # type: ignore[arg-type]

    def to_dict(self) -> dict[str, float | int]:
        return {
            "omega_c": self.omega_c,
            "omega_a": self.omega_a,
            "g": self.g,
            "n_max": self.n_max,
        }


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A dense operator; read-only once built."""

    entries: ComplexMatrix
    hermitian: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"Operator must be a square matrix, got shape {entries.shape}")
        if self.hermitian:
            asymmetry = float(np.max(np.abs(entries - entries.conj().T)))
            if asymmetry > HERMITIAN_TOL:
                raise InvariantViolation(
                    f"Operator {self.label or '<unnamed>'} flagged hermitian but "
                    f"max|M - M^dagger| = {asymmetry:.3e}"
                )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def commutator_norm(self, other: "OperatorMatrix") -> float:
        """Max-abs entry of [self, other]."""
        product = self.entries @ other.entries - other.entries @ self.entries
        return float(np.max(np.abs(product)))

    def expectation(self, state: "StateVector") -> float:
        """Real part of <psi|M|psi>."""
        psi = state.amplitudes
        return float(np.real(np.vdot(psi, self.entries @ psi)))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over one of the two bases."""

    amplitudes: ComplexVector

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=np.complex128)
        if amplitudes.ndim != 1 or amplitudes.size < 1:
            raise ValueError(f"State must be a non-empty vector, got shape {amplitudes.shape}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.amplitudes / self.norm)


def _parity_signs(n_max: int) -> NDArray[np.float64]:
    """(-1)^m for m = 0..n_max."""
    return np.where(np.arange(n_max + 1) % 2 == 0, 1.0, -1.0)


def annihilation(dim: int) -> ComplexMatrix:
    """Truncated boson lowering operator with <m|b|m+1> = sqrt(m+1)."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), k=1).astype(np.complex128)


def number_diagonal(dim: int) -> NDArray[np.float64]:
    return np.arange(dim, dtype=np.float64)


def effective_hamiltonian(params: ModelParams, coupling: float) -> OperatorMatrix:
    """omega_c b^dag b - (omega_a / 2)(-1)^{b^dag b} + coupling (b^dag + b).

    ``coupling`` may be negative; the public builders below fix it to +g, -g or 0.
    """
    m = number_diagonal(params.effective_dim)
    diagonal = params.omega_c * m - 0.5 * params.omega_a * _parity_signs(params.n_max)
    b = annihilation(params.effective_dim)
    entries = np.diag(diagonal).astype(np.complex128) + coupling * (b + b.T)
    return OperatorMatrix(entries, hermitian=True, label=f"H_eff(g={coupling:g})")


def build_h_eff(params: ModelParams) -> OperatorMatrix:
    """Effective Hamiltonian on the even-parity sector (coupling switched on)."""
    return effective_hamiltonian(params, params.g)


def build_h0_eff(params: ModelParams) -> OperatorMatrix:
    """Free effective Hamiltonian; diagonal in the Fock basis."""
    return effective_hamiltonian(params, 0.0)


def build_h_eff_flipped(params: ModelParams) -> OperatorMatrix:
    """Effective form of sigma_z H sigma_z, i.e. the coupling with its sign reversed."""
    return effective_hamiltonian(params, -params.g)


def _atom_operators() -> tuple[ComplexMatrix, ComplexMatrix]:
    # Atom basis (|g>, |e>).
    sigma_z = np.diag([-1.0, 1.0]).astype(np.complex128)
    sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    return sigma_z, sigma_x


def build_full_rabi(params: ModelParams) -> OperatorMatrix:
    """omega_c a^dag a + (omega_a / 2) sigma_z + g sigma_x (a^dag + a) on cavity x atom.

    The cavity is the outer Kronecker factor, which realizes the basis index 2m + s.
    """
    dim_c = params.effective_dim
    a = annihilation(dim_c)
    identity_c = np.eye(dim_c, dtype=np.complex128)
    identity_a = np.eye(2, dtype=np.complex128)
    sigma_z, sigma_x = _atom_operators()

    entries = (
        params.omega_c * np.kron(a.T @ a, identity_a)
        + 0.5 * params.omega_a * np.kron(identity_c, sigma_z)
        + params.g * np.kron(a + a.T, sigma_x)
    )
    return OperatorMatrix(entries, hermitian=True, label="H_rabi")


def build_h0_full(params: ModelParams) -> OperatorMatrix:
    """Free Hamiltonian omega_c a^dag a + (omega_a / 2) sigma_z on cavity x atom."""
    return build_full_rabi(params.with_changes(g=0.0))


def build_parity(params: ModelParams, full_space: bool) -> OperatorMatrix:
    """Parity (-1)^{N_e} with N_e = a^dag a + |e><e|, or (-1)^{b^dag b} on the effective space."""
    if full_space:
        index = np.arange(params.full_dim)
        excitations = index // 2 + index % 2
        signs = np.where(excitations % 2 == 0, 1.0, -1.0)
    else:
        signs = _parity_signs(params.n_max)
    return OperatorMatrix(np.diag(signs).astype(np.complex128), hermitian=True, label="parity")


def even_parity_block(operator: OperatorMatrix, parity: OperatorMatrix) -> OperatorMatrix:
    """Restrict ``operator`` to the parity +1 sector, keeping ascending basis order.

    For the full Rabi Hamiltonian the kept states are |0,g>, |1,e>, |2,g>, ... which map one to
    one onto the effective Fock states |0>, |1>, |2>, ...
    """
    if operator.dim != parity.dim:
        raise ValueError(f"Dimension mismatch: operator {operator.dim}, parity {parity.dim}")
    keep = np.flatnonzero(np.real(np.diag(parity.entries)) > 0)
    block = operator.entries[np.ix_(keep, keep)]
    return OperatorMatrix(block, hermitian=operator.hermitian, label=f"{operator.label}[even]")


def full_space_photon_diagonal(params: ModelParams) -> NDArray[np.float64]:
    """Eigenvalues of a^dag a in the 2m + s ordering."""
    return np.repeat(number_diagonal(params.effective_dim), 2)


def vacuum_state(dim: int) -> StateVector:
    """|0> (effective space) or |0, g> (full space): amplitude 1 on index 0."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    amplitudes = np.zeros(dim, dtype=np.complex128)
    amplitudes[0] = 1.0
    return StateVector(amplitudes)


def fock_state(dim: int, m: int) -> StateVector:
    if not 0 <= m < dim:
        raise ValueError(f"Fock index {m} outside basis of size {dim}")
    amplitudes = np.zeros(dim, dtype=np.complex128)
    amplitudes[m] = 1.0
    return StateVector(amplitudes)
