"""
Evaluation metrics for the cipher: SNR, histograms, correlation of
neighbouring pixels and the key-sensitivity difference ratio.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import constants
from .bmp import BmpImage, parse_bmp
from .cipher import CipherMode, decrypt, encrypt
from .exceptions import (
    DegenerateImage,
    EmptyInput,
    IdenticalSignals,
    LengthMismatch,
    MacCipherError,
    TooFewPairs,
    ZeroVariance,
)
from .key import MacKey, flip_bit

logger = logging.getLogger(__name__)


class Direction(Enum):
    HORIZONTAL = 'horizontal'
    VERTICAL = 'vertical'
    DIAGONAL = 'diagonal'


# Row/column offset of the second pixel of each pair
_OFFSETS = {
    Direction.HORIZONTAL: (0, 1),
    Direction.VERTICAL: (1, 0),
    Direction.DIAGONAL: (1, 1),
}


@dataclass
class AnalysisReport:
    snr: float = None
    histogram_source: list = field(default_factory=list)
    histogram_encrypted: list = field(default_factory=list)
    correlation: dict = field(default_factory=dict)         # Direction -> r of the encrypted data
    source_correlation: dict = field(default_factory=dict)  # Direction -> r of the source data
    diff_ratio: float = None

    def to_document(self) -> str:
        """Flat key/value document, fixed field order, 6 decimals."""
        fields = [('snr', self.snr)]
        fields += [(f"corr_{d.value}", self.correlation.get(d)) for d in Direction]
        fields.append(('diff_ratio', self.diff_ratio))
        lines = [f'  "{name}": {_format_number(value)}' for name, value in fields]
        return "{\n" + ",\n".join(lines) + "\n}\n"

    def to_dict(self) -> dict:
        return {
            'snr': self.snr,
            'diff_ratio': self.diff_ratio,
            'correlation': {d.value: r for d, r in self.correlation.items()},
            'source_correlation': {d.value: r for d, r in self.source_correlation.items()},
            'histogram_source': list(self.histogram_source),
            'histogram_encrypted': list(self.histogram_encrypted),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'AnalysisReport':
        return cls(
            snr=data.get('snr'),
            diff_ratio=data.get('diff_ratio'),
            correlation={Direction(k): v for k, v in data.get('correlation', {}).items()},
            source_correlation={Direction(k): v for k, v in data.get('source_correlation', {}).items()},
            histogram_source=data.get('histogram_source', []),
            histogram_encrypted=data.get('histogram_encrypted', []),
        )


def _format_number(value) -> str:
    return "null" if value is None else f"{value:.6f}"


def _as_bytes_array(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return data.reshape(-1).astype(np.int64)
    return np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int64)


def _check_pair(a, b) -> tuple:
    a, b = _as_bytes_array(a), _as_bytes_array(b)
    if len(a) != len(b):
        raise LengthMismatch(f"Inputs differ in length ({len(a)} vs {len(b)})")
    if len(a) == 0:
        raise EmptyInput("Inputs are empty")
    return a, b


def snr(source, encrypted) -> float:
    """
    sum(E^2) / sum((E - S)^2), no logarithm.

    Both sums are accumulated in int64: each term is at most 255**2 < 2**16,
    so up to 2**40 bytes the totals stay below 2**56 and are exact. The only
    floating-point step is the final division.
    """
    s, e = _check_pair(source, encrypted)
    diff = e - s
    numerator = int(np.dot(e, e))
    denominator = int(np.dot(diff, diff))
    if denominator == 0:
        raise IdenticalSignals("Source and encrypted data are identical")
    return numerator / denominator


def histogram(data) -> list:
    """counts[v] = occurrences of byte value v."""
    values = _as_bytes_array(data)
    return np.bincount(values, minlength=256).tolist()


def histogram_csv(counts) -> str:
    return "".join(f"{value},{count}\n" for value, count in enumerate(counts))


def histogram_distance(a, b) -> int:
    """L1 distance between two histograms."""
    return int(sum(abs(x - y) for x, y in zip(a, b)))


def grayscale(image) -> np.ndarray:
    """floor((R + G + B) / 3) per pixel."""
    pixels = image.pixels if isinstance(image, BmpImage) else np.asarray(image)
    return (pixels.astype(np.uint16).sum(axis=2) // 3).astype(np.uint8)


def _pair_arrays(grid, direction: Direction) -> tuple:
    grid = np.asarray(grid)
    if grid.ndim != 2 or grid.shape[0] < 2 or grid.shape[1] < 2:
        raise DegenerateImage(f"Correlation needs a grid of at least 2x2, got shape {grid.shape}")
    dr, dc = _OFFSETS[direction]
    height, width = grid.shape
    first = grid[:height - dr, :width - dc]
    second = grid[dr:, dc:]
    return first.reshape(-1), second.reshape(-1)


def neighbor_pairs(image, direction: Direction) -> list:
    """All (x, y) pairs of neighbouring values in the given direction."""
    first, second = _pair_arrays(image, direction)
    return list(zip(first.tolist(), second.tolist()))


def _pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 2:
        raise TooFewPairs(f"Correlation needs at least 2 pairs, got {len(x)}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0 or syy == 0:
        raise ZeroVariance("One of the series is constant")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def correlation(pairs) -> float:
    """Pearson correlation coefficient over (x, y) pairs."""
    pairs = list(pairs)
    if len(pairs) < 2:
        raise TooFewPairs(f"Correlation needs at least 2 pairs, got {len(pairs)}")
    x, y = zip(*pairs)
    return _pearson(x, y)


def image_correlation(image, direction: Direction) -> float:
    """Correlation of neighbouring grayscale pixels of a BmpImage or 2-D grid."""
    grid = grayscale(image) if isinstance(image, BmpImage) or np.ndim(image) == 3 else image
    return _pearson(*_pair_arrays(grid, direction))


def diff_ratio(a, b) -> float:
    """Fraction of positions where a and b differ."""
    a, b = _check_pair(a, b)
    return np.count_nonzero(a != b) / len(a)


def key_sensitivity(plaintext: bytes, key: MacKey, mode: CipherMode = CipherMode.CONTAINER) -> list:
    """
    For every bit of the key: encrypt with the key, decrypt with the key
    with that bit flipped, and measure how much of the plaintext is lost.
    """
    if not plaintext:
        raise EmptyInput("Key sensitivity needs a non-empty plaintext")
    ciphertext = encrypt(plaintext, key, mode)
    ratios = []
    for bit in range(constants.KEYSPACE_BITS):
        recovered = decrypt(ciphertext, flip_bit(key, bit), mode)
        ratios.append(diff_ratio(plaintext, recovered))
    logger.debug(f"Key sensitivity: min {min(ratios):.6f}, max {max(ratios):.6f}")
    return ratios


def _correlations(image: BmpImage, label: str) -> dict:
    result = {}
    for direction in Direction:
        try:
            result[direction] = image_correlation(image, direction)
        except MacCipherError as e:
            logger.warning(f"No {direction.value} correlation for {label} image: {e}")
    return result


def analyze(source: bytes, encrypted: bytes, image: bool = False) -> AnalysisReport:
    """
    Builds the full report. For images the metrics run over the pixel values
    (row padding excluded) and correlations are computed for both images.
    """
    report = AnalysisReport()

    if image:
        source_image, encrypted_image = parse_bmp(source), parse_bmp(encrypted)
        if (source_image.width, source_image.height) != (encrypted_image.width, encrypted_image.height):
            raise LengthMismatch(
                f"Image sizes differ ({source_image.width}x{source_image.height} vs "
                f"{encrypted_image.width}x{encrypted_image.height})")
        source_values, encrypted_values = source_image.pixels, encrypted_image.pixels
        report.source_correlation = _correlations(source_image, 'source')
        report.correlation = _correlations(encrypted_image, 'encrypted')
    else:
        source_values, encrypted_values = source, encrypted

    report.diff_ratio = diff_ratio(source_values, encrypted_values)
    try:
        report.snr = snr(source_values, encrypted_values)
    except IdenticalSignals as e:
        logger.warning(f"SNR undefined: {e}")

    report.histogram_source = histogram(source_values)
    report.histogram_encrypted = histogram(encrypted_values)
    return report
