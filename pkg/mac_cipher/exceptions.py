"""
Exception hierarchy for the MAC-keyed cipher toolkit.

Every error raised by the package derives from MacCipherError. The family
classes (KeyResolutionError, EnvelopeError, ...) are what the CLI maps to
exit codes.
"""


class MacCipherError(Exception):
    """Base class for all package errors."""


# --- Key ---

class KeyResolutionError(MacCipherError):
    """A key could not be parsed or read from the host."""


class MalformedMac(KeyResolutionError, ValueError):
    pass


class InterfaceNotFound(KeyResolutionError):
    pass


class NoHardwareAddress(KeyResolutionError):
    pass


class BitIndexOutOfRange(MacCipherError, ValueError):
    pass


# --- PRNG ---

class ZeroBound(MacCipherError, ValueError):
    pass


class NotAPermutation(MacCipherError, ValueError):
    pass


# --- Cipher envelope ---

class EnvelopeError(MacCipherError):
    """The container framing is invalid."""


class BadMagic(EnvelopeError):
    pass


class UnsupportedVersion(EnvelopeError):
    pass


class TruncatedEnvelope(EnvelopeError):
    pass


class LengthMismatch(EnvelopeError, ValueError):
    """Two lengths that must agree do not (envelope fields or metric inputs)."""


# --- Analysis ---

class AnalysisError(MacCipherError):
    """A metric cannot be computed for the given input."""


class IdenticalSignals(AnalysisError):
    pass


class EmptyInput(AnalysisError, ValueError):
    pass


class DegenerateImage(AnalysisError):
    pass


class ZeroVariance(AnalysisError):
    pass


class TooFewPairs(AnalysisError):
    pass


# --- BMP ---

class BmpError(MacCipherError):
    """The bitmap is not a supported 24-bit uncompressed BMP."""


class BadSignature(BmpError):
    pass


class UnsupportedBitDepth(BmpError):
    pass


class UnsupportedCompression(BmpError):
    pass


class Truncated(BmpError):
    pass


# --- Wire ---

class ProtocolError(MacCipherError):
    """The demo transfer protocol failed."""


class ProtocolViolation(ProtocolError):
    pass


class BindFailure(ProtocolError):
    pass


class ConnectFailure(ProtocolError):
    pass


class DecryptFailure(ProtocolError):
    pass


class RemoteDecryptFailure(ProtocolError):
    pass


class StoreFailure(ProtocolError):
    """The receiver decrypted the payload but could not write it out."""
