"""Exception types shared across the package."""


class FgError(Exception):
    """Base class for all fgsym errors."""


class LengthMismatch(FgError):
    """Potential table length does not match the product of range sizes."""


class NonPositivePotential(FgError):
    """Potentials must be strictly positive."""


class UnknownRv(FgError):
    """A factor references a random variable missing from the graph."""


class IndexOutOfRange(FgError):
    """Assignment or row index outside the factor's table."""


class NotAPermutation(FgError):
    """The given position mapping is not a bijection on the argument list."""


class StateSpaceTooLarge(FgError):
    """Brute-force enumeration would exceed the configured state cap."""


class RvMismatch(FgError):
    """Two graphs do not share the same random variables."""


class UnknownBucket(FgError):
    """Count vector is not a bucket of the given argument group."""


class ArityMismatch(FgError):
    """Factors with different arities cannot be compared by permutation."""


class RangeMismatch(FgError):
    """Position mapping does not preserve argument ranges."""


class MultisetMismatch(FgError):
    """Bucket potential multisets differ; no rearrangement exists."""


class InvalidEvidence(FgError):
    """Evidence references an unknown variable or an out-of-range value."""


class DetectionBudgetExceeded(FgError):
    """A colour-passing detector ran out of budget; no verdict available."""


class DegenerateInstance(FgError):
    """Requested benchmark instance cannot be constructed."""


class ParseError(FgError):
    """Malformed factor-graph text input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
