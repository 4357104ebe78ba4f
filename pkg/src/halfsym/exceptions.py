"""Exception types raised across halfsym."""


class HalfsymError(Exception):
    """Base class for all halfsym errors."""


class InvalidInputError(HalfsymError, ValueError):
    """Input violates a shape, size or finiteness contract."""


class InvalidPlaneError(InvalidInputError):
    """Plane normal is not unit length (or otherwise malformed)."""


class TooLargeError(InvalidInputError):
    """Exact solver refused because the problem exceeds its size cap."""


class ConvergenceError(HalfsymError, RuntimeError):
    """Iterative solver stopped before reaching the requested tolerance.

    ``gap`` holds the relative primal/dual gap achieved when it gave up.
    """

    def __init__(self, message, gap):
        super().__init__(message)
        self.gap = gap


class ParseError(HalfsymError, ValueError):
    """A point-cloud file could not be parsed.

    ``offset`` is the byte offset in the file where parsing failed.
    """

    def __init__(self, message, offset=None, path=None):
        where = []
        if path is not None:
            where.append(str(path))
        if offset is not None:
            where.append(f"byte {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.offset = offset
        self.path = path


class MissingFeatureError(HalfsymError, KeyError):
    """An external feature table has no row for the requested shape id."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DatasetError(HalfsymError):
    """Dataset preparation aborted (e.g. too many per-shape failures)."""


class CloudIOError(HalfsymError, OSError):
    """Reading or writing a point-cloud or manifest file failed."""
