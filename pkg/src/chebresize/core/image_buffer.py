import numpy as np

from .errors import ChannelMismatchError, InvalidSizeError

BIT_DEPTH = 8
MAX_LEVEL = 255


def quantize(samples):
    """Round half away from zero, then clamp to [0, 255]; returns uint8."""
    samples = np.asarray(samples, dtype=np.float64)
    magnitude = np.abs(samples)
    rounded = np.floor(magnitude)
    rounded += (magnitude - rounded) >= 0.5
    rounded *= np.sign(samples)
    return np.clip(rounded, 0, MAX_LEVEL).astype(np.uint8)


class ImageBuffer:
    """
    Planar image: 1 (gray) or 3 (RGB) channels of float64 samples,
    stored as an array of shape (channels, height, width).

    Rows are the first interpolation axis (n or N), columns the second (m or M).
    The buffer is immutable; every transformation returns a new one.
    """

    __slots__ = ("_samples",)

    def __init__(self, samples):
        data = np.array(samples, dtype=np.float64)
        if data.ndim == 2:
            data = data[np.newaxis, :, :]
        if data.ndim != 3 or data.shape[0] not in (1, 3):
            raise ChannelMismatchError(
                f"expected 1 or 3 channel planes, got array of shape {np.shape(samples)}"
            )
        if data.shape[1] < 1 or data.shape[2] < 1:
            raise InvalidSizeError(f"image must be at least 1x1, got {data.shape[1]}x{data.shape[2]}")
        data.setflags(write=False)
        self._samples = data

    @classmethod
    def from_interleaved(cls, pixels):
        """Build from a (height, width) gray or (height, width, 3) RGB array."""
        pixels = np.asarray(pixels)
        if pixels.ndim == 3:
            if pixels.shape[2] != 3:
                raise ChannelMismatchError(f"expected 3 interleaved channels, got {pixels.shape[2]}")
            return cls(np.moveaxis(pixels, 2, 0))
        return cls(pixels)

    @property
    def samples(self):
        return self._samples

    @property
    def channels(self):
        return self._samples.shape[0]

    @property
    def height(self):
        return self._samples.shape[1]

    @property
    def width(self):
        return self._samples.shape[2]

    @property
    def size(self):
        """(rows, columns) = (n, m)."""
        return self._samples.shape[1], self._samples.shape[2]

    @property
    def is_rgb(self):
        return self.channels == 3

    @property
    def bit_depth(self):
        return BIT_DEPTH

    def channel(self, index):
        return self._samples[index]

    def quantized(self):
        """uint8 view of the samples, shape (channels, height, width)."""
        return quantize(self._samples)

    def to_quantized(self):
        return ImageBuffer(self.quantized())

    def to_interleaved(self):
        """uint8 pixels as (height, width) or (height, width, 3)."""
        q = self.quantized()
        if self.channels == 1:
            return q[0]
        return np.ascontiguousarray(np.moveaxis(q, 0, 2))

    def __repr__(self):
        kind = "RGB" if self.is_rgb else "gray"
        return f"ImageBuffer({self.height}x{self.width}, {kind})"
