"""Exception types shared across walklab."""


class ValidationError(ValueError):
    """Invalid model parameters or argument preconditions."""


class DomainError(ValueError):
    """Argument outside the domain of convergence of a transform."""


class BudgetError(RuntimeError):
    """A computation would exceed its state / step / precision budget."""
