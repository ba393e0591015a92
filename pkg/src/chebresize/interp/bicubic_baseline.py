"""
Keys cubic convolution resizer on cell-centred pixel coordinates, with
kernel widening on downscale and replicated borders. Used as the
comparison method and to generate benchmark inputs.
"""
import math

import numpy as np
from scipy import sparse
from direct.directnotify.DirectNotifyGlobal import directNotify

from ..core.errors import InvalidSizeError, OperatorTooLargeError
from ..core.image_buffer import ImageBuffer
from .cheb_core import DEFAULT_MAX_OPERATOR_ELEMENTS

notify = directNotify.newCategory("Bicubic")

KEYS_A = -0.5


class CubicKernel:
    support = 2.0

    def __init__(self, a=KEYS_A, antialias_scale=1.0):
        if antialias_scale < 1.0:
            raise ValueError("antialias_scale must be >= 1")
        self.a = a
        self.antialias_scale = antialias_scale

    @property
    def radius(self):
        """Half-width of the (possibly widened) kernel in source pixels."""
        return self.support * self.antialias_scale

    def __call__(self, t):
        a = self.a
        x = np.abs(np.asarray(t, dtype=np.float64))
        x2, x3 = x * x, x * x * x
        near = (a + 2.0) * x3 - (a + 3.0) * x2 + 1.0
        far = a * x3 - 5.0 * a * x2 + 8.0 * a * x - 4.0 * a
        return np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))

    def widened(self, t):
        s = self.antialias_scale
        return self(np.asarray(t, dtype=np.float64) / s) / s

    def __repr__(self):
        return f"CubicKernel(a={self.a}, antialias_scale={self.antialias_scale})"


def axis_weights(n, N, a=KEYS_A, antialias=True, max_elements=DEFAULT_MAX_OPERATOR_ELEMENTS):
    """
    Sparse N x n matrix whose rows hold the normalized taps of every output sample.
    Raises OperatorTooLargeError when N * taps exceeds max_elements.
    """
    if n < 1 or N < 1:
        raise InvalidSizeError(f"axis sizes must be positive, got {n} -> {N}")
    scale = N / n
    kernel = CubicKernel(a, 1.0 / scale if (antialias and scale < 1.0) else 1.0)

    centers = (np.arange(N) + 0.5) / scale - 0.5
    first = np.floor(centers - kernel.radius).astype(np.int64)
    taps = int(math.ceil(2.0 * kernel.radius)) + 2
    if N * taps > max_elements:
        raise OperatorTooLargeError(N, taps, max_elements)
    offsets = first[:, np.newaxis] + np.arange(taps)[np.newaxis, :]

    weights = kernel.widened(centers[:, np.newaxis] - offsets)
    sources = np.clip(offsets, 0, n - 1)
    rows = np.repeat(np.arange(N), taps)

    matrix = sparse.coo_matrix(
        (weights.ravel(), (rows, sources.ravel())), shape=(N, n)
    ).tocsr()
    row_sums = np.asarray(matrix.sum(axis=1)).ravel()
    return sparse.diags(1.0 / row_sums) @ matrix


def resize_bicubic(image, target, quantize_output=True, antialias=True, a=KEYS_A,
                   max_elements=DEFAULT_MAX_OPERATOR_ELEMENTS):
    N, M = target
    n, m = image.size
    row_weights = axis_weights(n, N, a, antialias, max_elements)
    col_weights = axis_weights(m, M, a, antialias, max_elements)
    notify.debug(f"bicubic {n}x{m} -> {N}x{M} (antialias={antialias})")

    planes = []
    for channel in image.samples:
        partial = row_weights @ channel
        planes.append(np.asarray((col_weights @ partial.T).T))
    result = ImageBuffer(np.stack(planes))
    return result.to_quantized() if quantize_output else result
