"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid model or simulation parameter."""


class DegenerateInputError(ValueError):
    """Input geometry the algorithms cannot handle (e.g. coincident seeds)."""


class UnsupportedOrderError(ValueError):
    """Typical-vehicle order not realisable in the requested street model."""


class ConfigError(ValueError):
    """Experiment configuration failed validation."""


class IntegrationError(RuntimeError):
    """Quadrature did not reach the requested tolerance.

    Carries the best estimate and the achieved error bound so callers can
    still report a flagged partial result.
    """

    def __init__(self, message, estimate=float("nan"), bound=float("inf")):
        super().__init__(f"{message} (estimate={estimate!r}, bound={bound!r})")
        self.estimate = estimate
        self.bound = bound
