class ShapeError(ValueError):
    """Raised when tensor shapes do not conform to an operation."""


class ParameterError(ValueError):
    """Raised when a scalar argument is outside its valid range."""


class ConfigError(ValueError):
    """Raised for invalid experiment configuration."""


class FormatError(ValueError):
    """Raised when HOTX or HOCK bytes cannot be decoded."""


class DivergenceError(ArithmeticError):
    """Raised when training produces a non-finite loss."""

    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(f"Training diverged at epoch {epoch}" + (f": {message}" if message else ""))
