import os
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np
from direct.directnotify.DirectNotifyGlobal import directNotify
from panda3d.core import Filename, PNMFileTypeRegistry, PNMImage, StringStream

from ..core.errors import (
    AlphaChannelError, ChannelMismatchError, MalformedHeaderError,
    UnsupportedBitDepthError, UnsupportedFormatError, UnsupportedMaxvalError,
)
from ..core.image_buffer import MAX_LEVEL, ImageBuffer
from ..quality.metrics import rgb_to_luma

notify = directNotify.newCategory("ImgIO")

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# magic -> (channels, binary)
PNM_MAGICS = {
    b"P2": (1, False),
    b"P3": (3, False),
    b"P5": (1, True),
    b"P6": (3, True),
}

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


class ImageFormat(str, Enum):
    PGM = "pgm"
    PPM = "ppm"
    PNG = "png"


EXTENSION_FORMATS = {
    ".pgm": ImageFormat.PGM,
    ".ppm": ImageFormat.PPM,
    ".png": ImageFormat.PNG,
}


@dataclass(frozen=True)
class ImageFile:
    path: str
    format: ImageFormat
    decoded: ImageBuffer


def _header_tokens(data, count, path):
    """First `count` whitespace separated header tokens and the offset after the last one."""
    tokens, pos = [], 0
    for _ in range(count):
        match = _TOKEN.match(data, pos)
        if not match:
            raise MalformedHeaderError("header ends early", path)
        tokens.append(match.group(1))
        pos = match.end()
    return tokens, pos


def decode_pnm(data, path=None):
    """Decode P2/P3/P5/P6 bytes with maxval 255 into an ImageBuffer."""
    magic = data[:2]
    if magic not in PNM_MAGICS:
        raise UnsupportedFormatError(f"netpbm type {magic!r}", path)
    channels, binary = PNM_MAGICS[magic]

    tokens, pos = _header_tokens(data, 4, path)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise MalformedHeaderError("non-numeric size or maxval", path) from None
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"size {width}x{height}", path)
    if maxval > MAX_LEVEL:
        raise UnsupportedBitDepthError(f"maxval {maxval}", path)
    if maxval != MAX_LEVEL:
        raise UnsupportedMaxvalError(f"maxval {maxval}", path)

    count = width * height * channels
    if binary:
        raster = np.frombuffer(data[pos + 1:pos + 1 + count], dtype=np.uint8)
        if raster.size < count:
            raise MalformedHeaderError(f"raster holds {raster.size} of {count} samples", path)
    else:
        try:
            raster = np.array(data[pos:].split(), dtype=np.int64)
        except ValueError:
            raise MalformedHeaderError("non-numeric sample", path) from None
        if raster.size < count:
            raise MalformedHeaderError(f"raster holds {raster.size} of {count} samples", path)
        raster = raster[:count]
        if raster.min() < 0 or raster.max() > maxval:
            raise MalformedHeaderError("sample outside [0, maxval]", path)

    pixels = raster.astype(np.uint8).reshape(height, width, channels)
    return ImageBuffer(np.moveaxis(pixels, 2, 0))


def encode_pnm(image, binary=True):
    pixels = image.to_interleaved()
    channels = image.channels
    magic = {(1, False): b"P2", (3, False): b"P3", (1, True): b"P5", (3, True): b"P6"}[(channels, binary)]
    header = b"%s\n%d %d\n%d\n" % (magic, image.width, image.height, MAX_LEVEL)
    if binary:
        return header + pixels.tobytes()
    rows = pixels.reshape(image.height, image.width * channels)
    body = b"\n".join(b" ".join(b"%d" % v for v in row) for row in rows)
    return header + body + b"\n"


def decode_png(path):
    image = PNMImage()
    if not image.read(Filename.fromOsSpecific(path)):
        raise MalformedHeaderError("PNG could not be decoded", path)
    if image.getMaxval() != MAX_LEVEL:
        raise UnsupportedBitDepthError(f"maxval {image.getMaxval()}", path)
    if image.hasAlpha():
        raise AlphaChannelError(path=path)

    stream = StringStream()
    if not image.write(stream, "image.pnm"):
        raise UnsupportedFormatError("PNG could not be converted", path)
    return decode_pnm(stream.getData(), path)


def encode_png(image, path):
    staging = PNMImage()
    if not staging.read(StringStream(encode_pnm(image)), "image.pnm"):
        raise UnsupportedFormatError("could not stage PNG data", path)
    png_type = PNMFileTypeRegistry.getGlobalPtr().getTypeFromExtension("png")
    if not staging.write(Filename.fromOsSpecific(path), png_type):
        raise OSError(f"could not write {path}")


def sniff_format(data, path=None):
    if data.startswith(PNG_SIGNATURE):
        return ImageFormat.PNG
    magic = data[:2]
    if magic in PNM_MAGICS:
        return ImageFormat.PGM if PNM_MAGICS[magic][0] == 1 else ImageFormat.PPM
    if magic[:1] == b"P" and magic[1:2].isdigit():
        raise UnsupportedFormatError(f"netpbm type {magic!r}", path)
    raise UnsupportedFormatError("not a PGM, PPM or PNG file", path)


def read_image_file(path):
    path = os.fspath(path)
    with open(path, "rb") as f:
        data = f.read()
    image_format = sniff_format(data, path)
    if image_format is ImageFormat.PNG:
        decoded = decode_png(path)
    else:
        decoded = decode_pnm(data, path)
    notify.debug(f"read {path}: {decoded}")
    return ImageFile(path, image_format, decoded)


def read_image(path):
    return read_image_file(path).decoded


def format_for_path(path, image=None):
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".pnm" and image is not None:
        return ImageFormat.PPM if image.is_rgb else ImageFormat.PGM
    if ext not in EXTENSION_FORMATS:
        raise UnsupportedFormatError(f"extension '{ext}'", os.fspath(path))
    return EXTENSION_FORMATS[ext]


def write_image(image, path, format=None, luma_convert=False, binary=True):
    """Write the quantized view of `image`; RGB to PGM needs luma_convert."""
    path = os.fspath(path)
    image_format = ImageFormat(format) if format else format_for_path(path, image)

    if image_format is ImageFormat.PGM and image.is_rgb:
        if not luma_convert:
            raise ChannelMismatchError(f"cannot write an RGB image as PGM without luma conversion ({path})")
        image = rgb_to_luma(image.to_quantized())
    elif image_format is ImageFormat.PPM and not image.is_rgb:
        raise ChannelMismatchError(f"cannot write a gray image as PPM ({path})")

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    if image_format is ImageFormat.PNG:
        encode_png(image, path)
    else:
        with open(path, "wb") as f:
            f.write(encode_pnm(image, binary))
    notify.debug(f"wrote {path} as {image_format.value}")
    return path


def list_images(directory, extensions=(".pgm", ".ppm", ".pnm", ".png")):
    """Sorted paths of the files in `directory` whose extension is listed."""
    extensions = {ext.lower() for ext in extensions}
    names = sorted(
        name for name in os.listdir(directory)
        if os.path.splitext(name)[1].lower() in extensions
        and os.path.isfile(os.path.join(directory, name))
    )
    return [os.path.join(directory, name) for name in names]
