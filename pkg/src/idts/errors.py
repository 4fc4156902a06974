class IDTSError(Exception):
    """Base class for every error raised by the package."""


class TermTypeError(IDTSError, TypeError):
    pass


class PositionError(IDTSError, ValueError):
    pass


class StatusError(IDTSError, ValueError):
    pass


class ValidationError(IDTSError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class RuleError(IDTSError, ValueError):
    def __init__(self, condition, message):
        super().__init__(f"condition {condition}: {message}")
        self.condition = condition


class NotARedex(IDTSError, ValueError):
    pass


class FuelExhausted(IDTSError):
    def __init__(self, message, trace=None, last=None):
        super().__init__(message)
        self.trace = trace
        self.last = last


class RecursorError(IDTSError):
    pass


class ArityError(IDTSError, ValueError):
    pass


class EncodingError(IDTSError, ValueError):
    pass


class ParseError(IDTSError):
    def __init__(self, message, line=None, column=None):
        loc = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{loc}{message}")
        self.line = line
        self.column = column
        self.bare = message
