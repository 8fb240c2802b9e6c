"""Exception types shared across the package."""


class InvalidConfiguration(ValueError):
    """A parameter or config field is out of its allowed domain."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ContractViolation(ValueError):
    """An input breaks a precondition of the called operation."""
