"""Exception hierarchy shared by all modules."""


class ChromaticTilingError(Exception):
    """Base class for every error raised by this package."""


class SpecError(ChromaticTilingError, ValueError):
    """A fractal specification is malformed."""


class InvalidBaseError(SpecError):
    pass


class EmptyMaskError(SpecError):
    pass


class MaskRangeError(SpecError):
    pass


class BudgetExceededError(ChromaticTilingError):
    """Rasterization would produce more cells than the configured budget."""


class EmptySetError(ChromaticTilingError, ValueError):
    pass


class InsufficientScalesError(ChromaticTilingError, ValueError):
    pass


class InvalidDimensionError(ChromaticTilingError, ValueError):
    pass


class InvalidRadiusRangeError(ChromaticTilingError, ValueError):
    pass


class BudgetExhausted(ChromaticTilingError):
    """The exact coloring search ran out of nodes before proving optimality.

    ``lower`` and ``upper`` bracket the chromatic number; ``best`` is the
    best proper coloring found (a ``ColoringResult``).
    """

    def __init__(self, lower, upper, best, nodes):
        super().__init__(
            f"node budget exhausted after {nodes} nodes; "
            f"chromatic number in [{lower}, {upper}]"
        )
        self.lower = lower
        self.upper = upper
        self.best = best
        self.nodes = nodes
