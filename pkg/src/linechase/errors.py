class InvalidInput(ValueError):
    pass


class DegenerateInput(InvalidInput):
    """Raised when a construction needs a point off a line but got one on it."""


class ContractViolation(RuntimeError):
    """A policy returned a point that does not lie on the requested line."""

    def __init__(self, step, message):
        super().__init__(f"step {step}: {message}")
        self.step = step
