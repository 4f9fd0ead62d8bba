"""Exception types raised across the package."""


class SampclustError(Exception):
    """Base class for all package errors."""


class InvalidInput(SampclustError, ValueError):
    """Malformed data: empty point sets, bad graphs, mismatched labelings."""


class InvalidParameter(SampclustError, ValueError):
    """A parameter outside its allowed range."""


class ConfigurationError(SampclustError, ValueError):
    """An inconsistent combination of settings."""


class UnreachableRepresentative(SampclustError, RuntimeError):
    """A removed vertex cannot reach any remaining vertex."""


class CorruptForest(SampclustError, RuntimeError):
    """An association chain does not end at a surviving vertex."""


class UndefinedRatio(SampclustError, ValueError):
    """A ratio metric with an empty denominator."""


class ParseError(SampclustError, ValueError):
    """A file that does not follow its format; carries the offending line."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
