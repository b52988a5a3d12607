"""Exception hierarchy shared by every module of the codec."""


class GaleError(Exception):
    """Base class for all errors raised by galecodec."""


class MalformedCode(GaleError, ValueError):
    """A codeword or container could not be parsed (truncated or corrupt)."""


class ParameterOutOfRange(GaleError, ValueError):
    pass


class WeightsNotNormalized(ParameterOutOfRange):
    pass


class EmptyPattern(ParameterOutOfRange):
    pass


class NonPositiveInput(GaleError, ValueError):
    pass


class ExhaustiveBoundExceeded(GaleError, ValueError):
    pass


class NotAdmitted(GaleError, LookupError):
    """The string does not belong to the admitted set, so it has no rank."""


class IndexOutOfRange(GaleError, LookupError):
    """The rank exceeds the size of the admitted set."""


class InsufficientBlocks(GaleError, LookupError):
    pass


class ModelMismatch(GaleError, ValueError):
    pass


class OracleExhausted(GaleError, LookupError):
    """A machine queried an oracle index beyond the available data."""


class OutputMismatch(GaleError, AssertionError):
    pass
