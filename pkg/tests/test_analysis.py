import json
import random
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from mac_cipher.analysis import (
    AnalysisReport,
    Direction,
    analyze,
    correlation,
    diff_ratio,
    grayscale,
    histogram,
    histogram_csv,
    histogram_distance,
    image_correlation,
    key_sensitivity,
    neighbor_pairs,
    snr,
)
from mac_cipher.bmp import BmpImage, write_bmp
from mac_cipher.cipher import CipherMode
from mac_cipher.exceptions import (
    DegenerateImage,
    EmptyInput,
    IdenticalSignals,
    LengthMismatch,
    TooFewPairs,
    ZeroVariance,
)
from mac_cipher.key import parse_mac

from worked_example import ENCRYPTED, KEY_TEXT, SNR_DENOMINATOR, SNR_NUMERATOR, SOURCE

GRID = [[1, 2], [3, 4]]


class TestSnr(unittest.TestCase):

    def test_worked_example(self):
        self.assertAlmostEqual(snr(SOURCE, ENCRYPTED), SNR_NUMERATOR / SNR_DENOMINATOR, delta=1e-9)
        self.assertAlmostEqual(snr(SOURCE, ENCRYPTED), 1.288, places=3)

    def test_sums_by_hand(self):
        numerator = sum(e * e for e in ENCRYPTED)
        denominator = sum((e - s) ** 2 for s, e in zip(SOURCE, ENCRYPTED))
        self.assertEqual((numerator, denominator), (SNR_NUMERATOR, SNR_DENOMINATOR))

    def test_single_term(self):
        self.assertEqual(snr(bytes(8), b'\x02' + bytes(7)), 1.0)

    def test_identical(self):
        with self.assertRaises(IdenticalSignals):
            snr(SOURCE, SOURCE)

    def test_errors(self):
        with self.assertRaises(LengthMismatch):
            snr(b'ab', b'abc')
        with self.assertRaises(EmptyInput):
            snr(b'', b'')

    def test_large_values_stay_exact(self):
        data = b'\xff' * 100000
        self.assertEqual(snr(bytes(100000), data), 1.0)


class TestHistogram(unittest.TestCase):

    def test_empty(self):
        self.assertEqual(histogram(b''), [0] * 256)

    def test_counts(self):
        counts = histogram(bytes([0, 0, 255]))
        self.assertEqual(counts[0], 2)
        self.assertEqual(counts[255], 1)
        self.assertEqual(sum(counts), 3)

    @given(st.binary(max_size=4096))
    def test_sums_to_length(self, data):
        counts = histogram(data)
        self.assertEqual(len(counts), 256)
        self.assertEqual(sum(counts), len(data))

    def test_csv(self):
        text = histogram_csv(histogram(b'\x01\x01'))
        lines = text.splitlines()
        self.assertEqual(len(lines), 256)
        self.assertEqual(lines[0], "0,0")
        self.assertEqual(lines[1], "1,2")
        self.assertTrue(text.endswith("\n"))

    def test_distance(self):
        self.assertEqual(histogram_distance(histogram(b'\x00'), histogram(b'\x01')), 2)
        self.assertEqual(histogram_distance(histogram(b'ab'), histogram(b'ba')), 0)


class TestNeighborPairs(unittest.TestCase):

    def test_small_grid(self):
        self.assertEqual(neighbor_pairs(GRID, Direction.HORIZONTAL), [(1, 2), (3, 4)])
        self.assertEqual(neighbor_pairs(GRID, Direction.VERTICAL), [(1, 3), (2, 4)])
        self.assertEqual(neighbor_pairs(GRID, Direction.DIAGONAL), [(1, 4)])

    def test_counts(self):
        grid = np.arange(7 * 5).reshape(5, 7)
        height, width = grid.shape
        self.assertEqual(len(neighbor_pairs(grid, Direction.HORIZONTAL)), height * (width - 1))
        self.assertEqual(len(neighbor_pairs(grid, Direction.VERTICAL)), (height - 1) * width)
        self.assertEqual(len(neighbor_pairs(grid, Direction.DIAGONAL)), (height - 1) * (width - 1))

    def test_degenerate(self):
        for grid in ([[1, 2, 3]], [[1], [2]]):
            with self.assertRaises(DegenerateImage):
                neighbor_pairs(grid, Direction.HORIZONTAL)


class TestCorrelation(unittest.TestCase):

    def test_perfect(self):
        self.assertAlmostEqual(correlation([(v, v) for v in range(10)]), 1.0, delta=1e-12)
        self.assertAlmostEqual(correlation([(v, -v) for v in range(10)]), -1.0, delta=1e-12)

    def test_independent(self):
        self.assertAlmostEqual(correlation([(0, 0), (1, 0), (0, 1), (1, 1)]), 0.0, delta=1e-12)

    def test_errors(self):
        with self.assertRaises(TooFewPairs):
            correlation([(1, 2)])
        with self.assertRaises(ZeroVariance):
            correlation([(1, 2), (1, 3), (1, 4)])

    def test_symmetry_and_affine_invariance(self):
        rng = random.Random(9)
        for _ in range(50):
            pairs = [(rng.randint(0, 255), rng.randint(0, 255)) for _ in range(100)]
            r = correlation(pairs)
            self.assertLessEqual(abs(r), 1.0)
            self.assertAlmostEqual(correlation([(y, x) for x, y in pairs]), r, delta=1e-12)
            a, b, c, d = rng.uniform(0.5, 3), rng.uniform(-10, 10), rng.uniform(0.5, 3), rng.uniform(-10, 10)
            self.assertAlmostEqual(correlation([(a * x + b, c * y + d) for x, y in pairs]), r, delta=1e-12)

    def test_image_correlation_uses_grayscale(self):
        pixels = np.zeros((4, 4, 3), dtype=np.uint8)
        pixels[:, :, 0] = np.arange(4) * 30
        image = BmpImage.from_pixels(pixels)
        self.assertEqual(grayscale(image)[0].tolist(), [0, 10, 20, 30])
        self.assertAlmostEqual(image_correlation(image, Direction.HORIZONTAL), 1.0, delta=1e-12)


class TestDiffRatio(unittest.TestCase):

    def test_cases(self):
        self.assertEqual(diff_ratio(b'abc', b'abc'), 0.0)
        data = bytes(range(256))
        self.assertEqual(diff_ratio(data, bytes(255 - b for b in data)), 1.0)
        self.assertEqual(diff_ratio(b'ab', b'ax'), 0.5)

    def test_random(self):
        rng = random.Random(1)
        a = bytes(rng.getrandbits(8) for _ in range(10240))
        b = bytes(rng.getrandbits(8) for _ in range(10240))
        self.assertAlmostEqual(diff_ratio(a, b), 255 / 256, delta=0.01)

    def test_errors(self):
        with self.assertRaises(LengthMismatch):
            diff_ratio(b'a', b'ab')
        with self.assertRaises(EmptyInput):
            diff_ratio(b'', b'')


class TestKeySensitivity(unittest.TestCase):

    def test_one_ratio_per_bit(self):
        rng = random.Random(2)
        plaintext = bytes(rng.getrandbits(8) for _ in range(1024))
        for mode in CipherMode:
            ratios = key_sensitivity(plaintext, parse_mac(KEY_TEXT), mode)
            self.assertEqual(len(ratios), 48)
            self.assertTrue(all(0.0 < r <= 1.0 for r in ratios))

    def test_empty(self):
        with self.assertRaises(EmptyInput):
            key_sensitivity(b'', parse_mac(KEY_TEXT))


class TestReport(unittest.TestCase):

    def test_byte_analysis(self):
        report = analyze(SOURCE, ENCRYPTED)
        self.assertAlmostEqual(report.snr, SNR_NUMERATOR / SNR_DENOMINATOR, delta=1e-9)
        self.assertEqual(sum(report.histogram_source), len(SOURCE))
        self.assertEqual(report.correlation, {})
        self.assertGreater(report.diff_ratio, 0.5)

    def test_identical_inputs_have_no_snr(self):
        with self.assertLogs('mac_cipher.analysis', level='WARNING'):
            report = analyze(SOURCE, SOURCE)
        self.assertIsNone(report.snr)
        self.assertEqual(report.diff_ratio, 0.0)

    def test_image_analysis(self):
        pixels = np.zeros((8, 8, 3), dtype=np.uint8)
        pixels[:, :, :] = (np.arange(8) * 16)[None, :, None]
        source = write_bmp(BmpImage.from_pixels(pixels))
        other = write_bmp(BmpImage.from_pixels(pixels[:, ::-1]))
        report = analyze(source, other, image=True)
        self.assertEqual(set(report.correlation), set(Direction))
        self.assertAlmostEqual(report.source_correlation[Direction.HORIZONTAL], 1.0, delta=1e-12)
        self.assertEqual(sum(report.histogram_source), 8 * 8 * 3)

    def test_image_size_mismatch(self):
        small = write_bmp(BmpImage.from_pixels(np.zeros((2, 2, 3), dtype=np.uint8)))
        large = write_bmp(BmpImage.from_pixels(np.zeros((3, 2, 3), dtype=np.uint8)))
        with self.assertRaises(LengthMismatch):
            analyze(small, large, image=True)

    def test_document(self):
        report = AnalysisReport(snr=1.5, diff_ratio=0.25, correlation={Direction.HORIZONTAL: -0.125})
        document = json.loads(report.to_document())
        self.assertEqual(list(document), ['snr', 'corr_horizontal', 'corr_vertical', 'corr_diagonal', 'diff_ratio'])
        self.assertEqual(document['snr'], 1.5)
        self.assertEqual(document['corr_horizontal'], -0.125)
        self.assertIsNone(document['corr_vertical'])
        self.assertIn('"snr": 1.500000', report.to_document())

    def test_dict_round_trip(self):
        report = analyze(SOURCE, ENCRYPTED)
        report.correlation = {Direction.DIAGONAL: 0.5}
        restored = AnalysisReport.from_dict(json.loads(json.dumps(report.to_dict())))
        self.assertEqual(restored, report)


if __name__ == '__main__':
    unittest.main()
