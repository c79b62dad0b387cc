import random
import struct
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mac_cipher.analysis import Direction, histogram, histogram_distance, image_correlation
from mac_cipher.bmp import (
    BmpImage,
    decrypt_bmp_body,
    encrypt_bmp_body,
    gradient_image,
    parse_bmp,
    row_stride,
    write_bmp,
)
from mac_cipher.exceptions import (
    BadSignature,
    BmpError,
    Truncated,
    UnsupportedBitDepth,
    UnsupportedCompression,
)
from mac_cipher.key import MacKey, parse_mac

WORKED_KEY = parse_mac("00:A0:C9:14:C8:29")
# Best case for the gradient: its XOR pattern cancels the 4-per-column step
BEST_CASE_KEY = parse_mac("80:00:00:F8:78:00")


def bmp_bytes(width, height, pixel_data, bpp=24, compression=0, offset=54, planes=1):
    size = offset + len(pixel_data)
    file_header = struct.pack('<2sIHHI', b'BM', size, 0, 0, offset)
    info_header = struct.pack('<IiiHHIIiiII', 40, width, height, planes, bpp, compression,
                              len(pixel_data), 2835, 2835, 0, 0)
    return file_header + info_header + bytes(offset - 54) + pixel_data


class TestParse(unittest.TestCase):

    def test_hand_assembled_two_by_one(self):
        # red, blue stored as BGR plus two pad bytes
        data = bmp_bytes(2, 1, bytes([0, 0, 255, 255, 0, 0, 0, 0]))
        self.assertEqual(len(data), 62)
        image = parse_bmp(data)
        self.assertEqual((image.width, image.height), (2, 1))
        self.assertEqual(image.row_stride, 8)
        self.assertEqual(image.pixel_data_offset, 54)
        self.assertEqual(image.pixel(0, 0), (255, 0, 0))
        self.assertEqual(image.pixel(0, 1), (0, 0, 255))

    def test_bottom_up_and_top_down(self):
        # two rows: stored first row is white, second black
        rows = bytes([255] * 3 + [0]) + bytes([0] * 3 + [0])
        bottom_up = parse_bmp(bmp_bytes(1, 2, rows))
        top_down = parse_bmp(bmp_bytes(1, -2, rows))
        self.assertEqual(bottom_up.pixel(1, 0), (255, 255, 255))
        self.assertEqual(bottom_up.pixel(0, 0), (0, 0, 0))
        self.assertEqual(top_down.pixel(0, 0), (255, 255, 255))
        self.assertEqual(top_down.height, 2)

    def test_gap_after_headers(self):
        image = parse_bmp(bmp_bytes(1, 1, bytes([1, 2, 3, 0]), offset=70))
        self.assertEqual(image.pixel_data_offset, 70)
        self.assertEqual(image.pixel(0, 0), (3, 2, 1))

    def test_errors(self):
        good = bmp_bytes(2, 1, bytes(8))
        cases = [
            (b'PK\x03\x04' + good[4:], BadSignature),
            (good[:30], Truncated),
            (good[:-1], Truncated),
            (bmp_bytes(2, 1, bytes(8), bpp=8), UnsupportedBitDepth),
            (bmp_bytes(2, 1, bytes(8), planes=2), UnsupportedBitDepth),
            (bmp_bytes(2, 1, bytes(8), compression=1), UnsupportedCompression),
            (bmp_bytes(0, 1, bytes(8)), BmpError),
            (bmp_bytes(2, 1, bytes(8), offset=54)[:10] + struct.pack('<I', 20) + good[14:], BmpError),
        ]
        for data, error in cases:
            with self.subTest(error=error.__name__):
                with self.assertRaises(error):
                    parse_bmp(data)

    def test_error_family(self):
        for error in (BadSignature, Truncated, UnsupportedBitDepth, UnsupportedCompression):
            self.assertTrue(issubclass(error, BmpError))


class TestWrite(unittest.TestCase):

    def test_one_white_pixel(self):
        data = write_bmp(BmpImage.from_pixels(np.full((1, 1, 3), 255, dtype=np.uint8)))
        self.assertEqual(len(data), 58)
        self.assertEqual(data[:2], b'BM')
        self.assertEqual(data[54:], b'\xff\xff\xff\x00')

    def test_row_stride(self):
        for width in range(1, 40):
            stride = row_stride(width)
            self.assertEqual(stride % 4, 0)
            self.assertTrue(0 <= stride - 3 * width < 4)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 64).flatmap(
        lambda w: st.integers(1, 64).flatmap(
            lambda h: arrays(np.uint8, (h, w, 3)))))
    def test_round_trip(self, pixels):
        image = BmpImage.from_pixels(pixels)
        self.assertEqual(parse_bmp(write_bmp(image)), image)

    def test_pad_bytes_are_zero(self):
        image = BmpImage.from_pixels(np.full((3, 1, 3), 7, dtype=np.uint8))
        data = write_bmp(image)
        for row in range(3):
            self.assertEqual(data[54 + row * 4 + 3], 0)


class TestBodyEncryption(unittest.TestCase):

    def setUp(self):
        self.source = write_bmp(gradient_image())

    def test_headers_and_length_preserved(self):
        encrypted = encrypt_bmp_body(self.source, WORKED_KEY)
        self.assertEqual(len(encrypted), len(self.source))
        self.assertEqual(encrypted[:54], self.source[:54])
        image = parse_bmp(encrypted)
        self.assertEqual((image.width, image.height, image.pixel_data_offset), (64, 64, 54))

    def test_round_trip(self):
        encrypted = encrypt_bmp_body(self.source, WORKED_KEY)
        self.assertEqual(decrypt_bmp_body(encrypted, WORKED_KEY), self.source)

    def test_odd_sized_body(self):
        image = BmpImage.from_pixels(np.arange(5 * 3 * 3, dtype=np.uint8).reshape(3, 5, 3))
        data = write_bmp(image)
        key = parse_mac("00:A0:C9:14:C8:29")
        self.assertEqual(decrypt_bmp_body(encrypt_bmp_body(data, key), key), data)

    def encrypted_correlation(self, key):
        encrypted = encrypt_bmp_body(self.source, key)
        return image_correlation(parse_bmp(encrypted), Direction.HORIZONTAL)

    def test_gradient_statistics(self):
        source_image = parse_bmp(self.source)
        source_r = image_correlation(source_image, Direction.HORIZONTAL)
        self.assertGreaterEqual(source_r, 0.9)
        source_counts = histogram(source_image.pixels)

        rng = random.Random(64)
        keys = [WORKED_KEY, parse_mac("22:91:D8:CD:C3:10")] + [MacKey(rng.getrandbits(48).to_bytes(6, 'big')) for _ in range(8)]
        for key in keys:
            with self.subTest(key=str(key)):
                encrypted = encrypt_bmp_body(self.source, key)
                encrypted_image = parse_bmp(encrypted)
                r = image_correlation(encrypted_image, Direction.HORIZONTAL)
                # pixels that share a vector stay adjacent, so typical keys land well above 0.1
                self.assertLessEqual(abs(r), 0.7)
                self.assertGreaterEqual(source_r - abs(r), 0.3)
                self.assertGreater(histogram_distance(source_counts, histogram(encrypted_image.pixels)), 0)
                decrypted_image = parse_bmp(decrypt_bmp_body(encrypted, key))
                self.assertEqual(histogram(decrypted_image.pixels), source_counts)

    def test_measured_correlations(self):
        self.assertAlmostEqual(self.encrypted_correlation(WORKED_KEY), -0.244, delta=0.001)
        self.assertAlmostEqual(self.encrypted_correlation(parse_mac("22:91:D8:CD:C3:10")), 0.287, delta=0.001)

    def test_best_case_key(self):
        # column XORs cancel the within-vector gradient step
        self.assertLessEqual(abs(self.encrypted_correlation(BEST_CASE_KEY)), 0.1)


class TestGradient(unittest.TestCase):

    def test_shape_and_values(self):
        image = gradient_image()
        self.assertEqual((image.width, image.height), (64, 64))
        self.assertEqual(image.pixel(10, 3), (12, 12, 12))
        self.assertEqual(image.pixel(0, 63), (252, 252, 252))


if __name__ == '__main__':
    unittest.main()
