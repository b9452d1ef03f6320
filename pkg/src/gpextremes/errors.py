"""Exception types shared across the package."""


class GpxError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GpxError, ValueError):
    """A scalar argument is outside its documented range."""


class DomainError(GpxError, ValueError):
    """A site does not belong to the domain of a kernel."""


class StructureError(GpxError, ValueError):
    """A kernel matrix violates a structural requirement (symmetry,
    zero diagonal, nonnegativity, or transitivity of finiteness)."""


class BlockError(GpxError, ValueError):
    """An anchor site and a queried site live in different finiteness
    blocks, so no jointly Gaussian representation exists."""


class FactorizationError(GpxError, ValueError):
    """Cholesky factorization failed even after the jitter ladder.

    Attributes
    ----------
    pivot : float
        Value of the first nonpositive pivot on the final attempt.
    pivot_index : int
        Row index of that pivot.
    """

    def __init__(self, message: str, pivot: float, pivot_index: int):
        super().__init__(message)
        self.pivot = pivot
        self.pivot_index = pivot_index


class WindowError(GpxError, ValueError):
    """A rescaled evaluation window left the domain of the underlying
    process (for instance a negative time for a one-sided motion)."""


class TruncationError(GpxError, RuntimeError):
    """A series or point-process enumeration was cut off before its
    stopping rule was satisfied.

    The ``diagnostics`` dict carries whatever the sampler knew at the
    point of failure (points used, unconverged count, tail bound).
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DataError(GpxError, ValueError):
    """Sample data handed to a statistical routine is unusable
    (empty, non-finite, or too small for the requested method)."""


class ConfigError(GpxError, ValueError):
    """An experiment configuration failed validation.

    ``problems`` lists every violated field, not just the first one.
    """

    def __init__(self, problems: list[str]):
        super().__init__("invalid configuration: " + "; ".join(problems))
        self.problems = list(problems)
