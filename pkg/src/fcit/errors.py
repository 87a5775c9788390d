"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An operation was called with arguments outside its contract."""


class SamplingStarved(RuntimeError):
    """Rejection sampling ran out of attempts; the space is almost entirely invalid."""

    def __init__(self, requested: int, accepted: int, attempts: int):
        self.requested = requested
        self.accepted = accepted
        self.attempts = attempts
        super().__init__(
            f"sampling starved: accepted {accepted}/{requested} samples "
            f"after {attempts} attempts"
        )


class ProblemError(Exception):
    """Base class for problem-file errors."""

    exit_code = 1


class ProblemParseError(ProblemError):
    exit_code = 2


class ProblemSemanticError(ProblemError):
    exit_code = 3
