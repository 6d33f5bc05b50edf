"""Exception hierarchy shared by all modules."""


class SpecfibError(Exception):
    """Base class for all errors raised by this package."""


class AsymmetricTensor(SpecfibError):
    """Triple-intersection tensor is not symmetric under index permutation."""


class DimensionMismatch(SpecfibError):
    """Tensor / vector shape does not match the divisor basis."""


class RingMismatch(SpecfibError):
    """Operands belong to different rings."""


class TruncationTooLarge(SpecfibError):
    """Requested truncation degree exceeds the dimension of the product."""


class IndexOutOfRange(SpecfibError):
    """Factor index does not select a factor of the product ring."""


class NonIntegralA(SpecfibError):
    """The linear Hilbert coefficient is not an integer for the given data."""


class OddRamification(SpecfibError):
    """Ramification is odd, so the closed-form character is non-integral."""


class InconsistentKernel(SpecfibError):
    """Supplied kernel contractions disagree with the divisor-class form of c1."""


class BaseNotElliptic(SpecfibError):
    """Trivial-fibration formulas require an elliptic base curve."""


class DegreeOverflow(SpecfibError):
    """A class of degree above the truncation was required to be exact."""


class ZeroRank(SpecfibError):
    """Operation needs a strictly positive rank."""


class HypothesisViolated(SpecfibError):
    """Numerical hypothesis of the threshold formula fails for the input."""


class EmptyRange(SpecfibError):
    """A scan interval is empty."""


class ConfigError(SpecfibError):
    """Malformed or unknown content in a configuration document."""


class MissingSection(ConfigError):
    """A command needs a config section that is not present."""
