"""
The 6-byte MAC-address key: parse, format, perturb and read from the host.

Octets are kept in printed order (leftmost octet first) everywhere.
"""
import logging
import os
import re
from dataclasses import dataclass
from enum import Enum

from . import constants
from .exceptions import (
    BitIndexOutOfRange,
    InterfaceNotFound,
    MalformedMac,
    NoHardwareAddress,
)

logger = logging.getLogger(__name__)

SYSFS_NET_ROOT = '/sys/class/net'

_MAC_PATTERN = re.compile(r'[0-9A-Fa-f]{2}([:-])(?:[0-9A-Fa-f]{2}\1){4}[0-9A-Fa-f]{2}')


class MacStyle(Enum):
    COLON = ':'
    HYPHEN = '-'


@dataclass(frozen=True)
class MacKey:
    octets: bytes

    def __post_init__(self):
        if len(self.octets) != constants.MAC_LENGTH:
            raise MalformedMac(f"MAC key must be {constants.MAC_LENGTH} bytes, got {len(self.octets)}")
        object.__setattr__(self, 'octets', bytes(self.octets))

    def __iter__(self):
        return iter(self.octets)

    def __getitem__(self, index):
        return self.octets[index]

    def __len__(self) -> int:
        return constants.MAC_LENGTH

    def __str__(self) -> str:
        return format_mac(self)

    def as_int(self) -> int:
        """48-bit big-endian value of the key."""
        return int.from_bytes(self.octets, 'big')

    def decimal_vector(self) -> list:
        return list(self.octets)


def parse_mac(text: str) -> MacKey:
    """
    Parses "MM:MM:MM:SS:SS:SS" or "MM-MM-MM-SS-SS-SS" (hex, any case).
    Separators must be uniform; surrounding whitespace is rejected.
    """
    if not isinstance(text, str) or not _MAC_PATTERN.fullmatch(text):
        raise MalformedMac(f"Not a MAC address: {text!r}")
    return MacKey(bytes(int(part, 16) for part in re.split(r'[:-]', text)))


def format_mac(key: MacKey, style: MacStyle = MacStyle.COLON) -> str:
    return style.value.join(f"{octet:02X}" for octet in key.octets)


def flip_bit(key: MacKey, bit_index: int) -> MacKey:
    """
    Returns a copy of the key with one bit inverted.
    Bit 0 is the most significant bit of octet 0, bit 47 the least
    significant bit of octet 5.
    """
    if not 0 <= bit_index < constants.KEYSPACE_BITS:
        raise BitIndexOutOfRange(f"Bit index {bit_index} outside 0..{constants.KEYSPACE_BITS - 1}")
    octets = bytearray(key.octets)
    octets[bit_index // 8] ^= 0x80 >> (bit_index % 8)
    return MacKey(bytes(octets))


def keyspace_bits() -> int:
    return constants.KEYSPACE_BITS


def brute_force_keys() -> int:
    """Number of candidate keys an exhaustive search has to try."""
    return 1 << constants.KEYSPACE_BITS


def _read_address(interface_dir: str):
    try:
        with open(os.path.join(interface_dir, 'address'), 'r') as f:
            return f.readline().strip()
    except OSError as e:
        logger.debug(f"No address file in {interface_dir}: {e}")
        return None


def get_system_mac(interface_name: str, sysfs_root: str = SYSFS_NET_ROOT) -> MacKey:
    """
    Reads the hardware address of a network interface from sysfs.
    Loopback and other interfaces without a usable address raise
    NoHardwareAddress.
    """
    if not interface_name or os.sep in interface_name or interface_name in ('.', '..'):
        raise InterfaceNotFound(f"Invalid interface name: {interface_name!r}")

    interface_dir = os.path.join(sysfs_root, interface_name)
    if not os.path.isdir(interface_dir):
        raise InterfaceNotFound(f"Network interface '{interface_name}' not found")

    address = _read_address(interface_dir)
    if not address:
        raise NoHardwareAddress(f"Interface '{interface_name}' reports no hardware address")

    try:
        key = parse_mac(address)
    except MalformedMac:
        # e.g. infiniband or tunnel devices with longer link-layer addresses
        raise NoHardwareAddress(f"Interface '{interface_name}' has no 48-bit hardware address ({address})")

    if not any(key.octets):
        raise NoHardwareAddress(f"Interface '{interface_name}' has an all-zero address")

    logger.debug(f"Interface {interface_name} hardware address: {key}")
    return key


def list_interfaces(sysfs_root: str = SYSFS_NET_ROOT) -> list:
    """
    Enumerates host interfaces as (name, MacKey or None) pairs, sorted by name.
    """
    try:
        names = sorted(os.listdir(sysfs_root))
    except OSError as e:
        logger.warning(f"Could not enumerate interfaces under {sysfs_root}: {e}")
        return []

    interfaces = []
    for name in names:
        try:
            interfaces.append((name, get_system_mac(name, sysfs_root=sysfs_root)))
        except (InterfaceNotFound, NoHardwareAddress):
            interfaces.append((name, None))
    return interfaces
