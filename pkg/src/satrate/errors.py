"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical failures (bracketing, precision) with 3.
"""


class ConfigurationError(ValueError):
    """Invalid scenario file, constellation label, or run configuration."""


class SchemaError(ConfigurationError):
    """A CSV file does not carry the expected columns or has no data."""


class GaussianInputError(ConfigurationError):
    """A constellation-enumeration estimator was called with Gaussian inputs.

    Gaussian-input runs are handled by the closed-form module
    (`satrate.gaussian`), which knows the exact conditional densities.
    """


class NumericsError(RuntimeError):
    """A numerical procedure failed (inconsistent estimates, etc.)."""


class BracketingError(NumericsError):
    """A root-finding bracket does not straddle the target value.

    `side` is "floor" when the target is already met at the lower bracket
    edge (no finite cutoff above it) and "ceiling" when the target is
    unreachable at the upper edge.
    """

    def __init__(self, message, side):
        super().__init__(message)
        self.side = side


class PrecisionError(NumericsError):
    """Monte-Carlo noise prevented convergence to the requested tolerance."""
