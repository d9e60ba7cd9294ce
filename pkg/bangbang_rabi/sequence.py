"""Binary bang-bang control sequences."""

from dataclasses import dataclass

from bangbang_rabi.config import LENGTH_TOL


def sequence_length(total_time: float, dt: float) -> int:
    """Number of pulses round(T / dt), checked to reproduce T within LENGTH_TOL.

    Raises:
        ValueError: If dt is not positive or T is not an integer multiple of dt.
    """
    if not dt > 0:
        raise ValueError(f"Pulse duration dt must be positive, got {dt}")
    length = int(round(total_time / dt))
    if abs(length * dt - total_time) > LENGTH_TOL:
        raise ValueError(
            f"Total time {total_time} is not an integer multiple of dt={dt} "
            f"(nearest length {length} gives {length * dt})"
        )
    return length


@dataclass(frozen=True)
class ControlSequence:
    """Pulse pattern: bit 1 switches the counter-rotating coupling on for dt, bit 0 off/flipped."""

    bits: tuple[int, ...]
    dt: float

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if len(bits) < 1:
            raise ValueError("A control sequence needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"Control bits must be 0 or 1, got {self.bits}")
        if not self.dt > 0:
            raise ValueError(f"Pulse duration dt must be positive, got {self.dt}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, bit_string: str, dt: float) -> "ControlSequence":
        cleaned = bit_string.strip()
        if not cleaned or set(cleaned) - {"0", "1"}:
            raise ValueError(f"Bit string must contain only '0' and '1', got {bit_string!r}")
        return cls(tuple(int(c) for c in cleaned), dt)

    @classmethod
    def constant(cls, bit: int, length: int, dt: float) -> "ControlSequence":
        return cls((bit,) * length, dt)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def n_g(self) -> int:
        return sum(self.bits)

    @property
    def n_0(self) -> int:
        return len(self.bits) - self.n_g

    @property
    def total_time(self) -> float:
        return len(self.bits) * self.dt
