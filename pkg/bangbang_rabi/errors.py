"""Exceptions raised by the simulation and search layers."""


class InvariantViolation(RuntimeError):
    """A numerical invariant (hermiticity, unitarity, norm, replay) did not hold."""


class TruncationError(InvariantViolation):
    """Weight on the last Fock level exceeds the tolerance; the run is not trustworthy."""


class MonotoneTrajectoryError(ValueError):
    """No interior local maximum exists in a sampled trajectory."""


class SearchGuardError(ValueError):
    """A search request exceeds a resource guard or asks for infeasible bit counts."""
