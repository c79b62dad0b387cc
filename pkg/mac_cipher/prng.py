"""
Deterministic pseudorandom generator and permutation builder.

The generator is a 64-bit linear congruential generator:

    state <- (state * 6364136223846793005 + 1442695040888963407) mod 2**64
    output = state >> 33

The state is advanced before each output, so output k (1-based) of a
generator seeded with s is the high 31 bits of

    A**k * s + C * (A**(k-1) + ... + A + 1)   (mod 2**64)

which is what the vectorized helpers evaluate with numpy's wrapping uint64
arithmetic. Reductions to a range use plain modulo; the bias is accepted,
determinism is the contract. None of this is cryptographically strong.
"""
import itertools
import logging
from functools import lru_cache

import numpy as np

from . import constants
from .exceptions import NotAPermutation, ZeroBound

logger = logging.getLogger(__name__)

# Below this size the scalar generator is faster than building numpy arrays
_VECTORIZE_THRESHOLD = 256

# Sizes whose every shuffle outcome fits in a small lookup table (8! rows)
_TABLE_MAX_SIZE = 8

_A = np.uint64(constants.LCG_MULTIPLIER)
_C = np.uint64(constants.LCG_INCREMENT)
_SHIFT = np.uint64(constants.LCG_OUTPUT_SHIFT)


class Lcg64:
    """Single-owner generator state. Not thread-safe; use one per thread."""

    def __init__(self, seed: int = 0):
        self.state = seed & constants.LCG_MASK

    def next(self) -> int:
        self.state = (self.state * constants.LCG_MULTIPLIER + constants.LCG_INCREMENT) & constants.LCG_MASK
        return self.state >> constants.LCG_OUTPUT_SHIFT

    def below(self, n: int) -> int:
        if n <= 0:
            raise ZeroBound(f"Bound must be positive, got {n}")
        return self.next() % n


def lcg_next(gen: Lcg64) -> int:
    return gen.next()


def rand_below(gen: Lcg64, n: int) -> int:
    return gen.below(n)


def lcg_outputs(seed: int, count: int) -> np.ndarray:
    """First `count` outputs of a generator seeded with `seed`, as uint64."""
    if count <= 0:
        return np.zeros(0, dtype=np.uint64)
    multipliers = np.cumprod(np.full(count, _A, dtype=np.uint64))
    geometric = np.ones(count, dtype=np.uint64)
    geometric[1:] = multipliers[:-1]
    geometric = np.cumsum(geometric, dtype=np.uint64)
    states = multipliers * np.uint64(seed & constants.LCG_MASK) + geometric * _C
    return states >> _SHIFT


def _fisher_yates(seed: int, n: int) -> list:
    perm = list(range(n))
    if n < 2:
        return perm

    if n < _VECTORIZE_THRESHOLD:
        gen = Lcg64(seed)
        for i in range(n - 1, 0, -1):
            j = gen.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    bounds = np.arange(n, 1, -1).astype(np.uint64)
    draws = (lcg_outputs(seed, n - 1) % bounds).tolist()
    for i, j in zip(range(n - 1, 0, -1), draws):
        perm[i], perm[j] = perm[j], perm[i]
    logger.debug(f"Built permutation of {n} indices from seed {seed:#x}")
    return perm


def shuffle_indices(seed: int, n: int) -> list:
    """
    Fisher-Yates permutation of range(n) driven by a fresh Lcg64(seed):
    for i = n-1 down to 1, swap positions i and rand_below(gen, i + 1).
    """
    return _fisher_yates(seed, n)


def shuffle_array(seed: int, n: int) -> np.ndarray:
    """shuffle_indices as an intp array, for indexing whole buffers."""
    return np.fromiter(_fisher_yates(seed, n), dtype=np.intp, count=n)


@lru_cache(maxsize=None)
def _swap_table(size: int) -> np.ndarray:
    """
    Every permutation the shuffle can produce for `size` elements, indexed by
    its draws read as a mixed-radix number (first draw most significant).
    """
    table = []
    for draws in itertools.product(*(range(bound) for bound in range(size, 1, -1))):
        perm = list(range(size))
        for i, j in zip(range(size - 1, 0, -1), draws):
            perm[i], perm[j] = perm[j], perm[i]
        table.append(perm)
    return np.array(table, dtype=np.uint8)


def shuffle_rows(first_seed: int, count: int, size: int) -> np.ndarray:
    """
    Permutations for `count` consecutive seeds first_seed, first_seed+1, ...
    Row r equals shuffle_indices(first_seed + r, size).
    """
    if count == 0 or size < 2:
        dtype = np.uint8 if size <= 256 else np.intp
        return np.tile(np.arange(size, dtype=dtype), (count, 1))

    states = np.uint64(first_seed) + np.arange(count, dtype=np.uint64)

    if size <= _TABLE_MAX_SIZE:
        # all draws at once, then one lookup per row
        code = np.zeros(count, dtype=np.intp)
        for i in range(size - 1, 0, -1):
            states = states * _A + _C
            code = code * (i + 1) + ((states >> _SHIFT) % np.uint64(i + 1)).astype(np.intp)
        return _swap_table(size)[code]

    dtype = np.uint8 if size <= 256 else np.intp
    perms = np.tile(np.arange(size, dtype=dtype), (count, 1))
    rows = np.arange(count)
    for i in range(size - 1, 0, -1):
        states = states * _A + _C
        j = ((states >> _SHIFT) % np.uint64(i + 1)).astype(np.intp)
        at_i = perms[:, i].copy()
        perms[:, i] = perms[rows, j]
        perms[rows, j] = at_i
    return perms


def invert_permutation(p) -> list:
    """Returns q with q[p[i]] == i."""
    n = len(p)
    inverse = [-1] * n
    for i, target in enumerate(p):
        if not isinstance(target, (int, np.integer)) or not 0 <= target < n or inverse[target] != -1:
            raise NotAPermutation(f"Entry {target!r} at position {i} is out of range or repeated")
        inverse[target] = i
    return inverse


def compose(p, q) -> list:
    """(p . q)[i] = p[q[i]]"""
    return [p[i] for i in q]
