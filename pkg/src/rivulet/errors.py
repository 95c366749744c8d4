"""Exception hierarchy shared by every rivulet module."""


class RivuletError(Exception):
    """Base class for all errors raised by rivulet."""


class UnknownNode(RivuletError, KeyError):
    pass


class NegativeResultingWeight(RivuletError, ValueError):
    pass


class ProbabilityOverflow(RivuletError, ValueError):
    pass


class SelfWeightInIC(RivuletError, ValueError):
    pass


class UnknownSetId(RivuletError, KeyError):
    pass


class DuplicateSetId(RivuletError, KeyError):
    pass


class EmptyCollection(RivuletError, ValueError):
    pass


class InvalidConfig(RivuletError, ValueError):
    pass


class SampleSizeMismatch(RivuletError, ValueError):
    pass


class DegenerateQuantile(RivuletError, ValueError):
    pass


class TooLargeToEnumerate(RivuletError, ValueError):
    pass


class FractionMismatch(RivuletError, ValueError):
    pass


class ParseError(RivuletError, ValueError):
    def __init__(self, line: int, reason: str, path: str | None = None):
        self.line = line
        self.reason = reason
        self.path = path
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {reason}")


class TimestampRegression(ParseError):
    pass
