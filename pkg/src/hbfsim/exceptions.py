"""Exception types raised across the simulator."""


class HbfsimError(ValueError):
    """Base class for all simulator errors."""


class NonFiniteError(HbfsimError):
    """Input contains NaN or Inf entries."""


class NonHermitianError(HbfsimError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class IndefiniteMatrixError(HbfsimError):
    """Matrix has an eigenvalue below the negative tolerance."""


class NotPositiveDefiniteError(HbfsimError):
    """Matrix is not positive definite."""


class DimensionMismatchError(HbfsimError):
    """Operand shapes are incompatible."""


class DomainError(HbfsimError):
    """Scalar argument outside its admissible interval."""


class NotDivisibleError(HbfsimError):
    """Cluster size does not divide the array size."""


class IndexOutOfRangeError(HbfsimError):
    """Antenna or column index outside [0, n)."""


class DuplicateIndexError(HbfsimError):
    """Index list contains repeated entries."""


class EmptyInputError(HbfsimError):
    """A nonempty sequence was required."""


class StreamCountTooLargeError(HbfsimError):
    """Requested more streams than available RF chains."""


class SingularEffectiveChannelError(HbfsimError):
    """Effective channel is too ill-conditioned to invert."""


class ZeroColumnError(HbfsimError):
    """Channel column with zero norm cannot be normalized."""


class EmptyGainsError(HbfsimError):
    """Power allocation needs at least one stream gain."""


class NonPositivePowerError(HbfsimError):
    """Total power budget must be positive."""


class LengthMismatchError(HbfsimError):
    """Paired vectors have different lengths."""


class ConfigInvalidError(HbfsimError):
    """Experiment configuration failed validation."""


class UnknownPresetError(HbfsimError):
    """No preset scenario with the requested name."""
