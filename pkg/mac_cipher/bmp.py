"""
Minimal reader/writer for uncompressed 24-bit BMP images.

Pixels are exposed top row first as an (height, width, 3) uint8 array in
R, G, B order, whatever the on-disk row order. Files are always written
bottom-up with the 54-byte header block.
"""
import logging
import struct
from dataclasses import dataclass

import numpy as np

from . import constants
from .cipher import CipherMode, decrypt, encrypt
from .exceptions import (
    BadSignature,
    BmpError,
    Truncated,
    UnsupportedBitDepth,
    UnsupportedCompression,
)
from .key import MacKey

logger = logging.getLogger(__name__)

_FILE_HEADER = struct.Struct('<2sIHHI')
_INFO_HEADER = struct.Struct('<IiiHHIIiiII')
_HEADER_SIZE = constants.BMP_FILE_HEADER_SIZE + constants.BMP_INFO_HEADER_SIZE
_PIXELS_PER_METER = 2835  # 72 DPI


def row_stride(width: int) -> int:
    """Bytes per stored row: 3 * width rounded up to a multiple of 4."""
    return (width * 3 + 3) // 4 * 4


@dataclass(eq=False)
class BmpImage:
    width: int
    height: int
    pixels: np.ndarray
    pixel_data_offset: int = _HEADER_SIZE
    row_stride: int = 0

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 3):
            raise BmpError(f"Pixel grid {self.pixels.shape} does not match {self.width}x{self.height}")
        if not self.row_stride:
            self.row_stride = row_stride(self.width)

    def __eq__(self, other):
        if not isinstance(other, BmpImage):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(self.pixels, other.pixels)

    @classmethod
    def from_pixels(cls, pixels) -> 'BmpImage':
        pixels = np.asarray(pixels, dtype=np.uint8)
        height, width = pixels.shape[:2]
        return cls(width=width, height=height, pixels=pixels)

    def pixel(self, row: int, col: int) -> tuple:
        return tuple(int(c) for c in self.pixels[row, col])


def parse_bmp(data: bytes) -> BmpImage:
    if data[:2] != constants.BMP_SIGNATURE:
        raise BadSignature(f"Not a BMP file (signature {bytes(data[:2])!r})")
    if len(data) < _HEADER_SIZE:
        raise Truncated(f"BMP headers need {_HEADER_SIZE} bytes, got {len(data)}")

    _, _, _, _, offset = _FILE_HEADER.unpack_from(data, 0)
    (info_size, width, height, planes, bits_per_pixel,
     compression, _, _, _, _, _) = _INFO_HEADER.unpack_from(data, constants.BMP_FILE_HEADER_SIZE)

    if info_size < constants.BMP_INFO_HEADER_SIZE:
        raise BmpError(f"Unsupported info header size {info_size}")
    if bits_per_pixel != constants.BMP_BITS_PER_PIXEL or planes != 1:
        raise UnsupportedBitDepth(f"Only 24-bit single-plane BMPs are supported (bpp={bits_per_pixel}, planes={planes})")
    if compression != 0:
        raise UnsupportedCompression(f"Compressed BMPs are not supported (compression={compression})")
    if width <= 0 or height == 0:
        raise BmpError(f"Invalid BMP dimensions {width}x{height}")
    if offset < constants.BMP_FILE_HEADER_SIZE + info_size:
        raise BmpError(f"Pixel data offset {offset} overlaps the headers")

    top_down = height < 0
    height = abs(height)
    stride = row_stride(width)
    if offset + stride * height > len(data):
        raise Truncated(f"Pixel array needs {offset + stride * height} bytes, file has {len(data)}")
    if offset > constants.BMP_FILE_HEADER_SIZE + info_size:
        logger.debug(f"BMP has {offset - constants.BMP_FILE_HEADER_SIZE - info_size} bytes between headers and pixels")

    rows = np.frombuffer(data, dtype=np.uint8, count=stride * height, offset=offset).reshape(height, stride)
    pixels = rows[:, :width * 3].reshape(height, width, 3)[:, :, ::-1]
    if not top_down:
        pixels = pixels[::-1]

    logger.debug(f"Parsed {width}x{height} BMP ({'top-down' if top_down else 'bottom-up'}, offset {offset})")
    return BmpImage(width=width, height=height, pixels=pixels.copy(),
                    pixel_data_offset=offset, row_stride=stride)


def write_bmp(image: BmpImage) -> bytes:
    stride = row_stride(image.width)
    image_size = stride * image.height

    rows = np.zeros((image.height, stride), dtype=np.uint8)
    rows[:, :image.width * 3] = image.pixels[::-1, :, ::-1].reshape(image.height, image.width * 3)

    file_header = _FILE_HEADER.pack(constants.BMP_SIGNATURE, _HEADER_SIZE + image_size, 0, 0, _HEADER_SIZE)
    info_header = _INFO_HEADER.pack(constants.BMP_INFO_HEADER_SIZE, image.width, image.height, 1,
                                    constants.BMP_BITS_PER_PIXEL, 0, image_size,
                                    _PIXELS_PER_METER, _PIXELS_PER_METER, 0, 0)
    return file_header + info_header + rows.tobytes()


def encrypt_bmp_body(data: bytes, key: MacKey) -> bytes:
    """
    Encrypts everything from the pixel data offset to the end of the file in
    Raw mode. The headers are copied verbatim, so the result is still a
    viewable BMP of the same size.
    """
    offset = parse_bmp(data).pixel_data_offset
    return bytes(data[:offset]) + encrypt(data[offset:], key, CipherMode.RAW)


def decrypt_bmp_body(data: bytes, key: MacKey) -> bytes:
    offset = parse_bmp(data).pixel_data_offset
    return bytes(data[:offset]) + decrypt(data[offset:], key, CipherMode.RAW)


def gradient_image(width: int = 64, height: int = 64, step: int = 4) -> BmpImage:
    """Horizontal gradient: every channel of column c is (c * step) mod 256."""
    values = (np.arange(width) * step % 256).astype(np.uint8)
    row = np.repeat(values[:, None], 3, axis=1)
    return BmpImage.from_pixels(np.tile(row, (height, 1, 1)))
