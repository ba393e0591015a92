import math
import time

import numpy as np
import pytest

from chebresize.core.errors import DivisibilityError, InvalidSizeError
from chebresize.core.image_buffer import ImageBuffer, quantize
from chebresize.interp import cheb_core
from chebresize.interp.cheb_core import make_chebyshev_grid
from chebresize.interp.resize_engine import (
    Direction, EngineOptions, Method, ResizeSpec, decimate_odd, resize, resize_equispaced_lagrange,
    resize_lci, resize_many, resolve_target,
)
from chebresize.quality import metrics

from conftest import random_image, smooth_image


class TestImageBuffer:
    def test_quantize_rounds_half_away_from_zero(self):
        values = np.array([0.5, 1.5, 2.4999, 254.5, 255.5, -0.5, -3.0, 300.0])
        assert quantize(values).tolist() == [1, 2, 2, 255, 255, 0, 0, 255]

    def test_quantize_just_below_half(self):
        below = np.nextafter(0.5, 0.0)
        assert quantize([below, -below]).tolist() == [0, 0]
        assert quantize(np.nextafter(254.5, 0.0)) == 254

    def test_gray_promoted_to_planes(self):
        image = ImageBuffer(np.zeros((4, 6)))
        assert image.channels == 1 and image.size == (4, 6)
        assert image.height == 4 and image.width == 6

    def test_interleaved_rgb(self):
        pixels = np.arange(2 * 3 * 3, dtype=np.uint8).reshape(2, 3, 3)
        image = ImageBuffer.from_interleaved(pixels)
        assert image.is_rgb
        assert np.array_equal(image.to_interleaved(), pixels)

    def test_buffer_is_immutable(self):
        image = ImageBuffer(np.ones((2, 2)))
        with pytest.raises(ValueError):
            image.samples[0, 0, 0] = 5.0


class TestResolveTarget:
    def test_target_passthrough(self):
        assert resolve_target(ResizeSpec.for_target((300, 400)), (10, 10)) == (300, 400)

    def test_down_floor(self):
        assert resolve_target(ResizeSpec.for_factor(3, "down"), (481, 321)) == (160, 107)

    def test_up_integer(self):
        assert resolve_target(ResizeSpec.for_factor(2, "up"), (100, 100)) == (200, 200)

    def test_non_integer_factor_is_exact(self):
        # 10 * 1.1 is 11.000000000000002 in floats, the rational rule gives 11
        assert resolve_target(ResizeSpec.for_factor(1.1, "up"), (10, 10)) == (11, 11)
        assert resolve_target(ResizeSpec.for_factor(2.5, "down"), (100, 7)) == (40, 2)

    def test_clamps_single_vanishing_axis(self):
        assert resolve_target(ResizeSpec.for_factor(4, "down"), (100, 3)) == (25, 1)

    def test_rejects_both_vanishing(self):
        with pytest.raises(InvalidSizeError):
            resolve_target(ResizeSpec.for_factor(10, "down"), (3, 3))

    def test_spec_validation(self):
        with pytest.raises(InvalidSizeError):
            ResizeSpec(factor=2.0)
        with pytest.raises(InvalidSizeError):
            ResizeSpec(factor=2.0, direction="up", target=(3, 3))
        with pytest.raises(InvalidSizeError):
            ResizeSpec.for_factor(-1.0, "up")
        with pytest.raises(InvalidSizeError):
            ResizeSpec.for_target((0, 5))


class TestResizeLci:
    def test_identity_on_quantized_images(self, rng):
        for index in range(50):
            rows, cols = (int(v) for v in rng.integers(1, 65, 2))
            image = random_image(rng, rows, cols, rgb=index % 2 == 1)
            assert np.array_equal(resize_lci(image, image.size).samples, image.samples)

    def test_constant_image(self):
        image = ImageBuffer(np.full((13, 17), 128.0))
        for target in ((5, 9), (26, 34), (13, 40), (1, 1)):
            assert np.all(resize_lci(image, target).samples == 128.0)

    def test_nine_to_three_picks_centres(self, rng):
        image = random_image(rng, 9, 9)
        result = resize_lci(image, (3, 3))
        expected = image.samples[0][np.ix_([1, 4, 7], [1, 4, 7])]
        assert np.array_equal(result.samples[0], expected)

    @pytest.mark.parametrize("s", [3, 5, 7, 9])
    def test_odd_factor_equals_decimation(self, rng, s):
        for _ in range(5):
            N, M = (int(v) for v in rng.integers(8, 41, 2))
            image = random_image(rng, s * N, s * M, rgb=bool(rng.integers(0, 2)))
            result = resize_lci(image, (N, M))
            reference = decimate_odd(image, s)
            assert np.array_equal(result.samples, reference.samples)
            scores = metrics.evaluate(reference, result)
            assert scores.mse == 0.0 and math.isinf(scores.psnr) and scores.ssim == 1.0

    def test_mixed_odd_factors_are_exact(self, rng):
        # 3 on rows, 5 on columns: matrix path, unit columns on both axes
        image = random_image(rng, 27, 15)
        mixed = resize_lci(image, (9, 3), quantize_output=False)
        np.testing.assert_array_equal(mixed.samples[0], image.samples[0][np.ix_(range(1, 27, 3), range(2, 15, 5))])

    def test_mse_bound_under_noise(self, rng):
        for trial in range(50):
            s = (3, 5)[trial % 2]
            delta = (1.0, 5.0, 20.0)[trial % 3]
            N, M = (int(v) for v in rng.integers(2, 12, 2))
            clean = random_image(rng, s * N, s * M)
            noisy = ImageBuffer(clean.samples + rng.uniform(-delta, delta, clean.samples.shape))
            output = resize_lci(noisy, (N, M), quantize_output=False)
            lhs = metrics.mse(decimate_odd(clean, s), output, use_quantized=False)
            rhs = s * s * metrics.mse(clean, noisy, use_quantized=False)
            assert lhs <= rhs + 1e-9

    def test_bivariate_polynomial_reproduction(self, rng):
        n = m = 12
        xs, ys = make_chebyshev_grid(n).nodes, make_chebyshev_grid(m).nodes
        coefficients = rng.uniform(-1.0, 1.0, (9, 9))
        samples = np.polynomial.polynomial.polygrid2d(xs, ys, coefficients)
        image = ImageBuffer(samples)
        for _ in range(5):
            N, M = (int(v) for v in rng.integers(1, 33, 2))
            result = resize_lci(image, (N, M), quantize_output=False)
            expected = np.polynomial.polynomial.polygrid2d(
                make_chebyshev_grid(N).nodes, make_chebyshev_grid(M).nodes, coefficients)
            np.testing.assert_allclose(result.samples[0], expected, atol=1e-7)

    def test_separability(self, rng):
        image = random_image(rng, 20, 14)
        direct = resize_lci(image, (31, 9), quantize_output=False)
        staged = resize_lci(resize_lci(image, (31, 14), quantize_output=False), (31, 9), quantize_output=False)
        np.testing.assert_allclose(direct.samples, staged.samples, atol=1e-9)

    def test_channel_independence(self, rng):
        image = random_image(rng, 18, 22, rgb=True)
        result = resize_lci(image, (25, 11))
        for c in range(3):
            single = resize_lci(ImageBuffer(image.channel(c)), (25, 11))
            assert np.array_equal(result.channel(c), single.channel(0))

    def test_quantized_output_stays_in_range(self, rng):
        image = random_image(rng, 16, 16)
        result = resize_lci(image, (40, 40))
        assert result.samples.min() >= 0 and result.samples.max() <= 255
        assert np.array_equal(result.samples, np.round(result.samples))

    def test_fct_backend_gives_same_pixels(self, rng):
        image = random_image(rng, 30, 24, rgb=True)
        direct = resize_lci(image, (45, 16), quantize_output=False)
        fct = resize_lci(image, (45, 16), quantize_output=False,
                         options=EngineOptions(backend=cheb_core.OperatorBackend.FCT))
        np.testing.assert_allclose(fct.samples, direct.samples, atol=1e-9)

    @pytest.mark.slow
    def test_rgb_512_to_256_is_fast(self, rng):
        image = random_image(rng, 512, 512, rgb=True)
        started = time.perf_counter()
        resize_lci(image, (256, 256))
        assert time.perf_counter() - started < 0.25

    @pytest.mark.slow
    def test_high_odd_factor(self, rng):
        image = random_image(rng, 1323, 1323)
        started = time.perf_counter()
        result = resize_lci(image, (63, 63))
        assert time.perf_counter() - started < 10.0
        assert metrics.mse(decimate_odd(image, 21), result) == 0.0


class TestDecimateOdd:
    def test_three_by_three_centre(self):
        image = ImageBuffer(np.arange(9, dtype=np.float64).reshape(3, 3))
        assert decimate_odd(image, 3).samples.tolist() == [[[4.0]]]

    def test_nine_by_six(self):
        image = ImageBuffer(np.arange(54, dtype=np.float64).reshape(9, 6))
        result = decimate_odd(image, 3)
        assert result.size == (3, 2)
        assert np.array_equal(result.samples[0], image.samples[0][np.ix_([1, 4, 7], [1, 4])])

    def test_fifteen_by_five(self):
        image = ImageBuffer(np.arange(225, dtype=np.float64).reshape(15, 15))
        result = decimate_odd(image, 5)
        assert np.array_equal(result.samples[0], image.samples[0][np.ix_([2, 7, 12], [2, 7, 12])])

    def test_rejects_even_factor(self):
        with pytest.raises(DivisibilityError):
            decimate_odd(ImageBuffer(np.zeros((4, 4))), 2)

    def test_rejects_non_divisible(self):
        with pytest.raises(DivisibilityError):
            decimate_odd(ImageBuffer(np.zeros((9, 10))), 3)


class TestEquispaced:
    def test_same_size_identity(self, rng):
        image = random_image(rng, 12, 9)
        assert np.array_equal(resize_equispaced_lagrange(image, (12, 9)).samples, image.samples)

    def test_runge_blowup_against_chebyshev(self):
        image = smooth_image(64, 64)
        equispaced = resize_equispaced_lagrange(image, (128, 128), quantize_output=False).samples[0]
        border = np.ones((128, 128), dtype=bool)
        border[4:-4, 4:-4] = False
        assert np.abs(equispaced[border]).max() > 1e3

        chebyshev = resize_lci(image, (128, 128), quantize_output=False).samples
        assert chebyshev.min() >= -5.0 and chebyshev.max() <= 260.0

        clamped = resize_equispaced_lagrange(image, (128, 128)).samples
        assert clamped.min() >= 0 and clamped.max() <= 255


class TestDispatch:
    def test_resize_uses_method_registry(self, rng):
        image = random_image(rng, 20, 20)
        up = resize(image, ResizeSpec.for_factor(2, Direction.UP, Method.BICUBIC))
        assert up.size == (40, 40)
        down = resize(image, ResizeSpec.for_target((10, 7), Method.LCI))
        assert down.size == (10, 7)

    def test_resize_many_shares_operator(self, rng):
        images = [random_image(rng, 16, 16) for _ in range(4)]
        results = resize_many(images, ResizeSpec.for_target((24, 24)))
        assert [r.size for r in results] == [(24, 24)] * 4
        info = cheb_core.operator_cache_info()
        assert info.misses == 1 and info.hits == 3
