"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """Input is valid but exceeds a configured computation budget."""


class PreconditionError(ValueError):
    """One or more documented hypotheses failed.

    ``violations`` lists every failed condition by name so callers can
    report them individually instead of stopping at the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class CheckpointError(RuntimeError):
    """Checkpoint missing, corrupt, or inconsistent with the requested run."""


class InvariantViolation(AssertionError):
    """An internal cross-check disagreed with its oracle."""
