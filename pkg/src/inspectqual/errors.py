"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """A well-formed call violated an operation's stated preconditions."""


class PlanInfeasibleError(DomainError):
    """A sampling plan search exceeded the configured hard cap on n."""


class StrictReferenceError(DomainError):
    """An artifact reference could not be resolved in strict mode."""
