"""
Full-reference quality metrics: MSE, PSNR and SSIM (global or 8x8 windowed),
for gray and RGB ImageBuffers. RGB SSIM is evaluated on BT.601 luma.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from direct.directnotify.DirectNotifyGlobal import directNotify

from ..core.errors import ChannelMismatchError, ShapeMismatchError, WindowTooLargeError
from ..core.image_buffer import MAX_LEVEL, ImageBuffer

notify = directNotify.newCategory("Metrics")

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class SsimMode(str, Enum):
    GLOBAL = "global"
    WINDOWED = "windowed"


@dataclass(frozen=True)
class SsimParams:
    dynamic_range: float = 255.0
    k1: float = 0.01
    k2: float = 0.03
    mode: SsimMode = SsimMode.GLOBAL
    window: int = 8
    squared_stabilizers: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", SsimMode(self.mode))

    @property
    def c1(self):
        c = self.k1 * self.dynamic_range
        return c * c if self.squared_stabilizers else c

    @property
    def c2(self):
        c = self.k2 * self.dynamic_range
        return c * c if self.squared_stabilizers else c


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr: float
    ssim: float
    ssim_mode: SsimMode = SsimMode.GLOBAL
    elapsed: float = None

    @property
    def is_exact(self):
        return self.mse == 0.0


def _planes(image, use_quantized):
    if use_quantized:
        return image.quantized().astype(np.float64)
    return image.samples


def _check_pair(reference, candidate):
    if reference.channels != candidate.channels or reference.size != candidate.size:
        raise ShapeMismatchError(
            f"cannot compare {reference.height}x{reference.width}x{reference.channels} "
            f"with {candidate.height}x{candidate.width}x{candidate.channels}"
        )


def mse(reference, candidate, use_quantized=True):
    """Sum of squared channel differences over channels * height * width."""
    _check_pair(reference, candidate)
    diff = _planes(reference, use_quantized) - _planes(candidate, use_quantized)
    return float(np.mean(diff * diff))


def psnr_from_mse(error):
    if error == 0.0:
        return math.inf
    return 20.0 * math.log10(MAX_LEVEL / math.sqrt(error))


def psnr(reference, candidate, use_quantized=True):
    return psnr_from_mse(mse(reference, candidate, use_quantized))


def format_psnr(value, digits=4):
    """'Inf' for exact results, fixed decimals otherwise."""
    if math.isinf(value):
        return "Inf"
    return f"{value:.{digits}f}"


def rgb_to_luma(image):
    """Full-range BT.601 Y of an RGB buffer, unquantized."""
    if not image.is_rgb:
        raise ChannelMismatchError("luma conversion needs an RGB image")
    r, g, b = image.samples
    wr, wg, wb = LUMA_WEIGHTS
    return ImageBuffer(wr * r + wg * g + wb * b)


def _ssim_formula(mean_x, mean_y, var_x, var_y, cov, c1, c2):
    luminance = (2.0 * (mean_x * mean_y) + c1) / (mean_x * mean_x + mean_y * mean_y + c1)
    structure = (2.0 * cov + c2) / (var_x + var_y + c2)
    return luminance * structure


def _global_ssim(x, y, params):
    mean_x, mean_y = x.mean(), y.mean()
    dx, dy = x - mean_x, y - mean_y
    return _ssim_formula(
        mean_x, mean_y, np.mean(dx * dx), np.mean(dy * dy), np.mean(dx * dy),
        params.c1, params.c2,
    )


def _window_sums(plane, w):
    table = np.zeros((plane.shape[0] + 1, plane.shape[1] + 1))
    table[1:, 1:] = plane.cumsum(axis=0).cumsum(axis=1)
    return table[w:, w:] - table[:-w, w:] - table[w:, :-w] + table[:-w, :-w]


def _windowed_ssim(x, y, params):
    w = params.window
    if x.shape[0] < w or x.shape[1] < w:
        raise WindowTooLargeError(f"SSIM window {w} exceeds image of {x.shape[0]}x{x.shape[1]}")
    area = float(w * w)
    mean_x = _window_sums(x, w) / area
    mean_y = _window_sums(y, w) / area
    var_x = _window_sums(x * x, w) / area - mean_x * mean_x
    var_y = _window_sums(y * y, w) / area - mean_y * mean_y
    cov = _window_sums(x * y, w) / area - mean_x * mean_y
    values = _ssim_formula(mean_x, mean_y, var_x, var_y, cov, params.c1, params.c2)
    return float(values.mean())


def ssim(reference, candidate, params=None, use_quantized=True):
    params = params or SsimParams()
    _check_pair(reference, candidate)
    if reference.is_rgb:
        ref_plane = rgb_to_luma(ImageBuffer(_planes(reference, use_quantized))).samples[0]
        cand_plane = rgb_to_luma(ImageBuffer(_planes(candidate, use_quantized))).samples[0]
    else:
        ref_plane = _planes(reference, use_quantized)[0]
        cand_plane = _planes(candidate, use_quantized)[0]
    if params.mode is SsimMode.WINDOWED:
        return _windowed_ssim(ref_plane, cand_plane, params)
    return float(_global_ssim(ref_plane, cand_plane, params))


def evaluate(reference, candidate, params=None, use_quantized=True, elapsed=None):
    params = params or SsimParams()
    error = mse(reference, candidate, use_quantized)
    return MetricsReport(
        mse=error,
        psnr=psnr_from_mse(error),
        ssim=ssim(reference, candidate, params, use_quantized),
        ssim_mode=params.mode,
        elapsed=elapsed,
    )
