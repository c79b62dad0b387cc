"""
The encryption pipeline and its inverse.

Plaintext is split into 6-byte vectors (chromosomes). Each vector i
(1-based) has its genes permuted by shuffle_indices(i, 6) (crossover), is
XORed with the key (mutation), and finally the list of vectors is permuted
by shuffle_indices(key as 48-bit integer, vector count) (re-sequencing).

Crossover is seeded by the vector number alone and therefore does not depend
on the key. The whole scheme is weak: the key is a MAC address that is sent
in the clear, and nothing authenticates the ciphertext.
"""
import logging
import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import constants
from .exceptions import (
    BadMagic,
    LengthMismatch,
    TruncatedEnvelope,
    UnsupportedVersion,
)
from .key import MacKey
from .prng import invert_permutation, shuffle_array, shuffle_indices, shuffle_rows
from .utils import read_file, write_atomic

logger = logging.getLogger(__name__)

_HEADER = struct.Struct('>4sB3sQ')
_RESERVED = b'\x00\x00\x00'
_SIZE = constants.VECTOR_SIZE


class CipherMode(Enum):
    CONTAINER = 'container'  # envelope + zero padding
    RAW = 'raw'              # length-preserving, no header


@dataclass(frozen=True)
class Chromosome:
    genes: bytes

    def __post_init__(self):
        if len(self.genes) != _SIZE:
            raise LengthMismatch(f"A chromosome holds {_SIZE} genes, got {len(self.genes)}")
        object.__setattr__(self, 'genes', bytes(self.genes))

    def __iter__(self):
        return iter(self.genes)

    def __getitem__(self, index):
        return self.genes[index]


@dataclass(frozen=True)
class CipherEnvelope:
    original_length: int
    ciphertext: bytes
    version: int = constants.ENVELOPE_VERSION

    def to_bytes(self) -> bytes:
        return _HEADER.pack(constants.ENVELOPE_MAGIC, self.version, _RESERVED, self.original_length) + self.ciphertext

    @classmethod
    def from_bytes(cls, data: bytes) -> 'CipherEnvelope':
        if len(data) < constants.ENVELOPE_HEADER_SIZE:
            raise TruncatedEnvelope(f"Envelope needs {constants.ENVELOPE_HEADER_SIZE} header bytes, got {len(data)}")

        magic, version, reserved, original_length = _HEADER.unpack_from(data)
        if magic != constants.ENVELOPE_MAGIC:
            raise BadMagic(f"Bad envelope magic {magic!r}")
        if version != constants.ENVELOPE_VERSION:
            raise UnsupportedVersion(f"Unsupported envelope version {version}")
        if reserved != _RESERVED:
            logger.warning(f"Envelope reserved bytes are not zero: {reserved.hex()}")

        ciphertext = bytes(data[constants.ENVELOPE_HEADER_SIZE:])
        expected = padded_length(original_length)
        if len(ciphertext) != expected:
            raise LengthMismatch(
                f"Ciphertext is {len(ciphertext)} bytes, original length {original_length} needs {expected}")
        return cls(original_length=original_length, ciphertext=ciphertext, version=version)


@dataclass
class EncryptionTrace:
    """Intermediate tables of one encryption, in the order the pipeline produces them."""
    vectors: list = field(default_factory=list)
    crossed: list = field(default_factory=list)
    mutated: list = field(default_factory=list)
    order: list = field(default_factory=list)  # 1-based vector numbers, in output order
    resequenced: list = field(default_factory=list)

    def ciphertext(self) -> bytes:
        return b''.join(v.genes for v in self.resequenced)


def padded_length(length: int) -> int:
    return -(-length // _SIZE) * _SIZE


def resequence_seed(key: MacKey) -> int:
    """The key as a big-endian integer, zero-extended to 64 bits."""
    return key.as_int()


# --- Per-vector operations ---

def split_vectors(data: bytes) -> tuple:
    """Returns (list of Chromosome, tail) with len(tail) == len(data) % 6."""
    full = len(data) - len(data) % _SIZE
    vectors = [Chromosome(data[i:i + _SIZE]) for i in range(0, full, _SIZE)]
    return vectors, bytes(data[full:])


def crossover_vector(v: Chromosome, vector_number: int) -> Chromosome:
    p = shuffle_indices(vector_number, _SIZE)
    return Chromosome(bytes(v[k] for k in p))


def uncrossover_vector(v: Chromosome, vector_number: int) -> Chromosome:
    p = invert_permutation(shuffle_indices(vector_number, _SIZE))
    return Chromosome(bytes(v[k] for k in p))


def mutate_vector(v: Chromosome, key: MacKey) -> Chromosome:
    return Chromosome(bytes(g ^ k for g, k in zip(v, key)))


def resequence(vectors: list, key: MacKey) -> list:
    order = shuffle_indices(resequence_seed(key), len(vectors))
    return [vectors[i] for i in order]


def unresequence(vectors: list, key: MacKey) -> list:
    inverse = invert_permutation(shuffle_indices(resequence_seed(key), len(vectors)))
    return [vectors[i] for i in inverse]


# --- Vectorized pipeline over whole buffers ---

def _key_row(key: MacKey) -> np.ndarray:
    return np.frombuffer(key.octets, dtype=np.uint8)


def _encrypt_vectors(body: bytes, key: MacKey) -> bytes:
    vectors = np.frombuffer(body, dtype=np.uint8).reshape(-1, _SIZE)
    count = len(vectors)
    if count == 0:
        return b''

    crossed = np.take_along_axis(vectors, shuffle_rows(1, count, _SIZE), axis=1)
    mutated = crossed ^ _key_row(key)
    order = shuffle_array(resequence_seed(key), count)
    logger.debug(f"Encrypted {count} vectors")
    return mutated[order].tobytes()


def _decrypt_vectors(body: bytes, key: MacKey) -> bytes:
    vectors = np.frombuffer(body, dtype=np.uint8).reshape(-1, _SIZE)
    count = len(vectors)
    if count == 0:
        return b''

    order = shuffle_array(resequence_seed(key), count)
    mutated = np.empty_like(vectors)
    mutated[order] = vectors
    crossed = mutated ^ _key_row(key)
    plain = np.empty_like(crossed)
    np.put_along_axis(plain, shuffle_rows(1, count, _SIZE), crossed, axis=1)
    logger.debug(f"Decrypted {count} vectors")
    return plain.tobytes()


def _xor_tail(tail: bytes, key: MacKey) -> bytes:
    return bytes(b ^ k for b, k in zip(tail, key))


def encrypt(plaintext: bytes, key: MacKey, mode: CipherMode = CipherMode.CONTAINER) -> bytes:
    plaintext = bytes(plaintext)
    if mode is CipherMode.CONTAINER:
        padded = plaintext + bytes(padded_length(len(plaintext)) - len(plaintext))
        envelope = CipherEnvelope(original_length=len(plaintext), ciphertext=_encrypt_vectors(padded, key))
        return envelope.to_bytes()

    full = len(plaintext) - len(plaintext) % _SIZE
    return _encrypt_vectors(plaintext[:full], key) + _xor_tail(plaintext[full:], key)


def decrypt(data: bytes, key: MacKey, mode: CipherMode = CipherMode.CONTAINER) -> bytes:
    data = bytes(data)
    if mode is CipherMode.CONTAINER:
        envelope = CipherEnvelope.from_bytes(data)
        return _decrypt_vectors(envelope.ciphertext, key)[:envelope.original_length]

    full = len(data) - len(data) % _SIZE
    return _decrypt_vectors(data[:full], key) + _xor_tail(data[full:], key)


def encrypt_trace(plaintext: bytes, key: MacKey) -> EncryptionTrace:
    """
    Runs the pipeline one vector at a time and keeps every intermediate
    table. The plaintext must be a whole number of vectors.
    """
    if len(plaintext) % _SIZE:
        raise LengthMismatch(f"Traced plaintext must be a multiple of {_SIZE} bytes, got {len(plaintext)}")

    trace = EncryptionTrace()
    trace.vectors, _ = split_vectors(plaintext)
    trace.crossed = [crossover_vector(v, i) for i, v in enumerate(trace.vectors, start=1)]
    trace.mutated = [mutate_vector(v, key) for v in trace.crossed]
    trace.order = [i + 1 for i in shuffle_indices(resequence_seed(key), len(trace.mutated))]
    trace.resequenced = resequence(trace.mutated, key)
    return trace


def encrypt_file(in_path: str, out_path: str, key: MacKey, mode: CipherMode = CipherMode.CONTAINER) -> int:
    data = encrypt(read_file(in_path), key, mode)
    write_atomic(out_path, data)
    logger.info(f"Encrypted {in_path} -> {out_path} ({mode.value}, {len(data)} bytes)")
    return len(data)


def decrypt_file(in_path: str, out_path: str, key: MacKey, mode: CipherMode = CipherMode.CONTAINER) -> int:
    data = decrypt(read_file(in_path), key, mode)
    write_atomic(out_path, data)
    logger.info(f"Decrypted {in_path} -> {out_path} ({mode.value}, {len(data)} bytes)")
    return len(data)
