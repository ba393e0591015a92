class ChebResizeError(Exception):
    """Base class for every error raised by chebresize."""


class InvalidSizeError(ChebResizeError, ValueError):
    pass


class OperatorTooLargeError(ChebResizeError, MemoryError):
    """Raised before allocation when a resize operator would not fit the configured limit."""

    def __init__(self, rows, cols, limit):
        self.rows = rows
        self.cols = cols
        self.limit = limit
        super().__init__(
            f"resize operator of {rows}x{cols} elements exceeds the limit of {limit} elements"
        )


class DuplicateNodeError(ChebResizeError, ZeroDivisionError):
    pass


class ShapeMismatchError(ChebResizeError, ValueError):
    pass


class WindowTooLargeError(ChebResizeError, ValueError):
    pass


class ChannelMismatchError(ChebResizeError, ValueError):
    pass


class DivisibilityError(ChebResizeError, ValueError):
    pass


class DegenerateTargetError(ChebResizeError, ValueError):
    pass


class EmptyCorpusError(ChebResizeError):
    pass


class ImageFormatError(ChebResizeError):
    message = "image format error"

    def __init__(self, detail=None, path=None):
        self.detail = detail
        self.path = path
        text = self.message
        if detail:
            text = f"{text}: {detail}"
        if path:
            text = f"{text} ({path})"
        super().__init__(text)


class UnsupportedFormatError(ImageFormatError):
    message = "unsupported format"


class UnsupportedBitDepthError(ImageFormatError):
    message = "unsupported bit depth"


class UnsupportedMaxvalError(ImageFormatError):
    message = "unsupported maxval"


class AlphaChannelError(ImageFormatError):
    message = "alpha channel not supported"


class MalformedHeaderError(ImageFormatError):
    message = "malformed header"
