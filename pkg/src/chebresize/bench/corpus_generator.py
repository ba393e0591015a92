import os

import numpy as np
from direct.directnotify.DirectNotifyGlobal import directNotify

from ..core.image_buffer import ImageBuffer
from ..utils.img_io import write_image

notify = directNotify.newCategory("CorpusGenerator")

DEFAULT_SEED = 20240601
DEFAULT_COUNT = 10

# (rows, cols); odd, even and BSDS-like sizes
CORPUS_SIZES = (
    (81, 121), (121, 81), (64, 64), (75, 100), (96, 72),
    (90, 90), (63, 99), (100, 75), (72, 96), (99, 63),
)


class NoiseGenerator:
    """Seeded value noise on a random lattice, smoothed with the quintic fade."""

    def __init__(self, rng):
        self.rng = rng

    @staticmethod
    def _fade(t):
        return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)

    def value_noise(self, shape, frequency):
        """Noise in [-1, 1] with `frequency` lattice cells across the shorter side."""
        rows, cols = shape
        cell = min(rows, cols) / frequency
        y = np.arange(rows) / cell
        x = np.arange(cols) / cell
        lattice = self.rng.uniform(-1.0, 1.0, (int(y[-1]) + 2, int(x[-1]) + 2))

        iy, ix = y.astype(np.int64), x.astype(np.int64)
        fy, fx = self._fade(y - iy)[:, np.newaxis], self._fade(x - ix)[np.newaxis, :]
        n00 = lattice[np.ix_(iy, ix)]
        n01 = lattice[np.ix_(iy, ix + 1)]
        n10 = lattice[np.ix_(iy + 1, ix)]
        n11 = lattice[np.ix_(iy + 1, ix + 1)]
        top = n00 + (n01 - n00) * fx
        bottom = n10 + (n11 - n10) * fx
        return top + (bottom - top) * fy

    def fbm(self, shape, octaves=5, persistence=0.5, lacunarity=2.0, base_frequency=3.0):
        """Fractional Brownian motion: octaves of value noise, normalized to [-1, 1]."""
        total = np.zeros(shape)
        amplitude, frequency, max_value = 1.0, base_frequency, 0.0
        for _ in range(octaves):
            total += self.value_noise(shape, frequency) * amplitude
            max_value += amplitude
            amplitude *= persistence
            frequency *= lacunarity
        return total / max(max_value, 1e-6)


def _gradient(shape, rng):
    rows, cols = shape
    angle = rng.uniform(0.0, 2.0 * np.pi)
    y = np.linspace(-1.0, 1.0, rows)[:, np.newaxis]
    x = np.linspace(-1.0, 1.0, cols)[np.newaxis, :]
    return np.cos(angle) * x + np.sin(angle) * y


def _blobs(shape, rng, count=4):
    rows, cols = shape
    y = np.arange(rows)[:, np.newaxis]
    x = np.arange(cols)[np.newaxis, :]
    field = np.zeros(shape)
    for _ in range(count):
        cy, cx = rng.uniform(0, rows), rng.uniform(0, cols)
        radius = rng.uniform(0.1, 0.3) * min(rows, cols)
        sign = rng.choice((-1.0, 1.0))
        field += sign * np.exp(-((y - cy) ** 2 + (x - cx) ** 2) / (2.0 * radius ** 2))
    return field


def _to_levels(field, low=16.0, high=239.0):
    span = field.max() - field.min()
    if span == 0:
        return np.full(field.shape, (low + high) / 2.0)
    return low + (field - field.min()) * (high - low) / span


def synthesize_image(shape, rng, rgb=False):
    noise = NoiseGenerator(rng)
    base = 0.6 * noise.fbm(shape) + 0.25 * _gradient(shape, rng) + 0.3 * _blobs(shape, rng)
    if not rgb:
        return ImageBuffer(_to_levels(base)).to_quantized()
    planes = []
    for _ in range(3):
        tint = 0.25 * noise.fbm(shape, octaves=3) + 0.15 * _gradient(shape, rng)
        planes.append(_to_levels(base + tint))
    return ImageBuffer(np.stack(planes)).to_quantized()


def make_corpus(directory, count=DEFAULT_COUNT, seed=DEFAULT_SEED):
    """Write `count` deterministic images (gray PGM and RGB PPM alternating); returns their paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for index in range(count):
        rng = np.random.default_rng([seed, index])
        shape = CORPUS_SIZES[index % len(CORPUS_SIZES)]
        rgb = index % 2 == 1
        image = synthesize_image(shape, rng, rgb)
        name = f"synthetic_{index:02d}.{'ppm' if rgb else 'pgm'}"
        paths.append(write_image(image, os.path.join(directory, name)))
    notify.info(f"wrote {count} images to {directory} (seed {seed})")
    return paths
