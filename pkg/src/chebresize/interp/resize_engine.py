"""
Image resizing front door: resolves a ResizeSpec to an explicit target
size and dispatches to one of the registered methods.

LCI output is V1.T @ C @ V2 for every channel C, with the resize matrices
from cheb_core. Equal odd factors on both axes take the decimation path.
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from direct.directnotify.DirectNotifyGlobal import directNotify

from ..core.errors import DivisibilityError, InvalidSizeError
from ..core.image_buffer import ImageBuffer
from . import cheb_core
from .bicubic_baseline import KEYS_A, resize_bicubic
from .cheb_core import NodeFamily, OperatorBackend

notify = directNotify.newCategory("ResizeEngine")


class Method(str, Enum):
    LCI = "lci"
    BICUBIC = "bicubic"
    EQUISPACED_LAGRANGE = "equispaced_lagrange"


class Direction(str, Enum):
    UP = "up"
    DOWN = "down"


METHOD_LABELS = {
    Method.LCI: "LCI",
    Method.BICUBIC: "BIC-like",
    Method.EQUISPACED_LAGRANGE: "Equispaced",
}


@dataclass(frozen=True)
class ResizeSpec:
    """Either factor + direction or an explicit (N, M) target."""

    factor: float = None
    direction: Direction = None
    target: tuple = None
    method: Method = Method.LCI
    quantize_output: bool = True

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if (self.factor is None) == (self.target is None):
            raise InvalidSizeError("give exactly one of a scale factor or a target size")
        if self.target is not None:
            N, M = (int(v) for v in self.target)
            if N < 1 or M < 1:
                raise InvalidSizeError(f"target size must be at least 1x1, got {N}x{M}")
            object.__setattr__(self, "target", (N, M))
        else:
            if not self.factor > 0 or math.isinf(self.factor):
                raise InvalidSizeError(f"scale factor must be a positive real, got {self.factor}")
            if self.direction is None:
                raise InvalidSizeError("a scale factor needs an explicit direction (up or down)")
            object.__setattr__(self, "direction", Direction(self.direction))

    @classmethod
    def for_factor(cls, factor, direction, method=Method.LCI, quantize_output=True):
        return cls(factor=factor, direction=direction, method=method, quantize_output=quantize_output)

    @classmethod
    def for_target(cls, target, method=Method.LCI, quantize_output=True):
        return cls(target=tuple(target), method=method, quantize_output=quantize_output)


@dataclass(frozen=True)
class EngineOptions:
    backend: OperatorBackend = OperatorBackend.DIRECT
    max_operator_elements: int = cheb_core.DEFAULT_MAX_OPERATOR_ELEMENTS
    equispaced_max_size: int = 300
    bicubic_a: float = KEYS_A
    antialias: bool = True

    @classmethod
    def from_settings(cls, settings_manager, backend=None):
        get = settings_manager.get_constant
        return cls(
            backend=OperatorBackend(backend or get('operators', 'backend', 'direct')),
            max_operator_elements=get('limits', 'max_operator_elements', cls.max_operator_elements),
            equispaced_max_size=get('limits', 'equispaced_max_size', cls.equispaced_max_size),
            bicubic_a=get('bicubic', 'a', KEYS_A),
            antialias=bool(get('bicubic', 'antialias', True)),
        )


DEFAULT_OPTIONS = EngineOptions()


def exact_factor(s):
    """Rational value of a user factor, so 2.5 -> 5/2 and floor sizes are exact."""
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(repr(float(s)))


def scaled_size(size, s, direction):
    factor = exact_factor(s)
    if Direction(direction) is Direction.UP:
        return math.floor(size * factor)
    return math.floor(size / factor)


def resolve_target(spec, source):
    n, m = source
    if spec.target is not None:
        return spec.target

    N = scaled_size(n, spec.factor, spec.direction)
    M = scaled_size(m, spec.factor, spec.direction)
    if N < 1 and M < 1:
        raise InvalidSizeError(
            f"scaling {n}x{m} {spec.direction.value} by {spec.factor} leaves no pixels"
        )
    if N < 1 or M < 1:
        notify.warning(f"target {N}x{M} clamped to at least one pixel per axis")
        N, M = max(N, 1), max(M, 1)
    return N, M


def _apply_operator(image, operator):
    return ImageBuffer(np.stack([operator.apply(channel) for channel in image.samples]))


def _finish(result, quantize_output):
    return result.to_quantized() if quantize_output else result


def common_odd_factor(source, target):
    """The shared odd factor s > 1 with n = sN and m = sM, or None."""
    (n, m), (N, M) = source, target
    if n % N or m % M:
        return None
    s = n // N
    if s != m // M or s < 3 or s % 2 == 0:
        return None
    return s


def check_odd_factor(s):
    """Return s as an int, or raise DivisibilityError unless it is an odd integer >= 3."""
    if int(s) != s or s < 3 or s % 2 == 0:
        raise DivisibilityError(f"decimation factor must be an odd integer >= 3, got {s}")
    return int(s)


def decimate_odd(image, s):
    """Keep rows/cols (s(2k-1)+1)/2 (1-based); exact LCI for n = sN, m = sM."""
    s = check_odd_factor(s)
    n, m = image.size
    if n % s or m % s:
        raise DivisibilityError(f"image of {n}x{m} is not divisible by {s}")
    rows = s * np.arange(n // s) + (s - 1) // 2
    cols = s * np.arange(m // s) + (s - 1) // 2
    return ImageBuffer(image.samples[:, rows][:, :, cols])


def resize_lci(image, target, quantize_output=True, options=DEFAULT_OPTIONS):
    N, M = target
    s = common_odd_factor(image.size, (N, M))
    if s is not None:
        notify.debug(f"odd factor {s}: decimating {image.height}x{image.width}")
        return _finish(decimate_odd(image, s), quantize_output)

    n, m = image.size
    operator = cheb_core.build_resize_operator(
        n, m, N, M, NodeFamily.CHEBYSHEV, options.backend, options.max_operator_elements
    )
    return _finish(_apply_operator(image, operator), quantize_output)


def resize_equispaced_lagrange(image, target, quantize_output=True, options=DEFAULT_OPTIONS):
    """Same pipeline on equispaced nodes; unstable beyond small sizes."""
    N, M = target
    n, m = image.size
    if max(n, m) > options.equispaced_max_size:
        notify.warning(
            f"equispaced Lagrange on {n}x{m} exceeds {options.equispaced_max_size}; output is numerically meaningless"
        )
    operator = cheb_core.build_resize_operator(
        n, m, N, M, NodeFamily.EQUISPACED, options.backend, options.max_operator_elements
    )
    return _finish(_apply_operator(image, operator), quantize_output)


def _resize_bicubic(image, target, quantize_output=True, options=DEFAULT_OPTIONS):
    return resize_bicubic(image, target, quantize_output, options.antialias, options.bicubic_a,
                          options.max_operator_elements)


METHODS = {
    Method.LCI: resize_lci,
    Method.BICUBIC: _resize_bicubic,
    Method.EQUISPACED_LAGRANGE: resize_equispaced_lagrange,
}


def resize(image, spec, options=DEFAULT_OPTIONS):
    target = resolve_target(spec, image.size)
    return METHODS[spec.method](image, target, spec.quantize_output, options)


def resize_many(images, spec, options=DEFAULT_OPTIONS):
    """Resize a sequence; images of equal size share one cached operator pair."""
    return [resize(image, spec, options) for image in images]
