import os
import sys

import numpy as np
import pytest

SRC_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
if SRC_DIR not in sys.path:
    sys.path.insert(0, SRC_DIR)

from chebresize.core.image_buffer import ImageBuffer  # noqa: E402
from chebresize.interp import cheb_core  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def fresh_operator_cache():
    cheb_core.configure_operator_cache(cheb_core.DEFAULT_CACHE_SIZE)
    yield
    cheb_core.clear_operator_cache()


def random_image(rng, rows, cols, rgb=False):
    shape = (3, rows, cols) if rgb else (rows, cols)
    return ImageBuffer(rng.integers(0, 256, size=shape).astype(np.float64))


def smooth_image(rows, cols, rgb=False):
    """Quantized sinusoidal pattern with values inside [40, 215]."""
    y = np.linspace(0.0, 1.0, rows)[:, np.newaxis]
    x = np.linspace(0.0, 1.0, cols)[np.newaxis, :]
    plane = 127.5 + 80.0 * np.sin(2.0 * np.pi * x) * np.cos(np.pi * y)
    if rgb:
        plane = np.stack([plane, 255.0 - plane, np.full_like(plane, 128.0)])
    return ImageBuffer(plane).to_quantized()


@pytest.fixture
def make_random_image(rng):
    def factory(rows, cols, rgb=False):
        return random_image(rng, rows, cols, rgb)
    return factory
