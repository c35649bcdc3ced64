"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when arguments or data violate a documented precondition."""


class FormatError(ValueError):
    """Raised when a file does not match its documented layout.

    ``offset`` carries the byte position of the offending field when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset
