"""Exception types shared across the package."""


class ParseError(ValueError):
    """A file could not be parsed; carries the position of the failure."""

    def __init__(self, message, *, path=None, line=None, offset=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if offset is not None:
            loc.append(f"byte offset {offset}")
        full = f"{message} ({', '.join(loc)})" if loc else message
        super().__init__(full)
        self.path = path
        self.line = line
        self.offset = offset


class EncodingError(ValueError):
    """A pixel value is not representable in the chosen binary encoding."""
