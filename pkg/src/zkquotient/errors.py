"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range user input."""


class ContractError(RuntimeError):
    """An internal precondition was violated (d∘d ≠ 0, shape mismatch, ...)."""


class NotFreeError(InputError):
    """The subtorus does not act freely on the moment-angle complex."""

    def __init__(self, message, facet=None):
        super().__init__(message)
        self.facet = facet


class RefusalError(InputError):
    """The requested computation is not offered for these inputs."""
