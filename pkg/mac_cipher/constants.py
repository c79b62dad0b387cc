"""
Constants and default values for the MAC-keyed cipher toolkit.

This module centralizes all default configuration values and format
constants to ensure a single source of truth.
"""

# Key
MAC_LENGTH = 6  # Octets in a MAC address
KEYSPACE_BITS = MAC_LENGTH * 8

# Cipher
VECTOR_SIZE = MAC_LENGTH  # Genes per chromosome, same length as the key
ENVELOPE_MAGIC = b"MGE1"
ENVELOPE_VERSION = 1
ENVELOPE_HEADER_SIZE = 16

# PRNG (64-bit LCG, output is the high 31 bits of the new state)
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
LCG_MASK = (1 << 64) - 1
LCG_OUTPUT_SHIFT = 33

# BMP
BMP_SIGNATURE = b"BM"
BMP_FILE_HEADER_SIZE = 14
BMP_INFO_HEADER_SIZE = 40
BMP_BITS_PER_PIXEL = 24

# Wire
HELLO_MAGIC = b"MKX1"
FILE_MAGIC = b"MKF1"
STATUS_OK = 0x00
STATUS_DECRYPT_ERROR = 0x01
DEFAULT_PORT = 5151
DEFAULT_TIMEOUT = 30  # Seconds, applied to every blocking read
DEFAULT_MAX_PAYLOAD = 64 * 1024 * 1024  # Bytes
CHUNK_SIZE = 65536

# Reporting
DEFAULT_REPORT_DIR = "reports"
DEFAULT_REPORT_FORMATS = ['markdown']

# Logging
DEFAULT_LOG_LEVEL = "INFO"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
