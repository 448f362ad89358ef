"""Exception hierarchy shared by all modules."""


class SoficError(Exception):
    """Base class for every error raised by soficov."""


class LgSyntaxError(SoficError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class PreconditionError(SoficError, ValueError):
    """An operation was called on an input outside its domain."""


class NotRightResolvingError(PreconditionError):
    pass


class NotHereditaryError(PreconditionError):
    pass


class NotIrreducibleError(PreconditionError):
    pass


class NotInShiftError(PreconditionError):
    """A word or point does not belong to the presented shift."""


class CapExceededError(SoficError):
    """A resource cap (monoid size, subset count, word length) was hit."""


class ConsistencyError(SoficError, AssertionError):
    """An internal invariant that the theory guarantees failed to hold."""
