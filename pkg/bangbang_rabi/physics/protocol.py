"""The two bang-bang protocols behind one interface.

- switch-off: bit 0 evolves under the free effective Hamiltonian (coupling 0);
- sign-flip: bit 0 evolves under sigma_z H sigma_z, i.e. coupling -g. The sigma_z gates are
  taken as instantaneous and perfect.

Bit 1 always evolves under the effective Hamiltonian with coupling +g.
"""

from dataclasses import dataclass
from enum import Enum

from bangbang_rabi.physics.evolution import Propagator, cached_propagator
from bangbang_rabi.physics.model import ModelParams


class ProtocolKind(str, Enum):
    SWITCH_OFF = "switch-off"
    SIGN_FLIP = "sign-flip"

    def off_coupling(self, g: float) -> float:
        """Coupling applied during a 0-bit."""
        return 0.0 if self is ProtocolKind.SWITCH_OFF else -g

    @property
    def off_label(self) -> str:
        return "off" if self is ProtocolKind.SWITCH_OFF else "flipped"


@dataclass(frozen=True)
class Protocol:
    kind: ProtocolKind
    params: ModelParams
    on_propagator: Propagator
    off_propagator: Propagator

    def __post_init__(self) -> None:
        if self.on_propagator.dt != self.off_propagator.dt:
            raise ValueError(
                f"Propagators disagree on dt: {self.on_propagator.dt} vs {self.off_propagator.dt}"
            )
        if self.on_propagator.dim != self.off_propagator.dim:
            raise ValueError(
                f"Propagators disagree on dimension: "
                f"{self.on_propagator.dim} vs {self.off_propagator.dim}"
            )

    @property
    def dt(self) -> float:
        return self.on_propagator.dt

    @property
    def dim(self) -> int:
        return self.on_propagator.dim

    def propagator(self, bit: int) -> Propagator:
        return self.on_propagator if bit else self.off_propagator

    def coupling(self, bit: int) -> float:
        """g value the protocol applies for ``bit``; used to build oracle schedules."""
        return self.params.g if bit else self.kind.off_coupling(self.params.g)


def make_protocol(
    params: ModelParams, dt: float, kind: ProtocolKind | str = ProtocolKind.SWITCH_OFF
) -> Protocol:
    """Build both pulse propagators for ``kind``; propagators come from the shared cache."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    kind = ProtocolKind(kind)
    return Protocol(
        kind=kind,
        params=params,
        on_propagator=cached_propagator(params, params.g, dt, "on"),
        off_propagator=cached_propagator(params, kind.off_coupling(params.g), dt, kind.off_label),
    )
