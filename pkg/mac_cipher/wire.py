"""
Demonstration transfer protocol: the receiver discloses its MAC, the sender
encrypts the file under it, the receiver decrypts with its own address.

    receiver -> sender   "MKX1" + 6 MAC bytes
    sender   -> receiver "MKF1" + u64-BE payload length + Container ciphertext
    receiver -> sender   1 status byte (0x00 ok, 0x01 decrypt or write error)

The MAC travels in the clear and is the whole key, so anyone who sees the
hello frame can decrypt the transfer. This is a property of the scheme.
"""
import logging
import socket
import struct
from dataclasses import dataclass

from pubsub import pub

from . import constants
from .cipher import CipherMode, decrypt, encrypt
from .exceptions import (
    BindFailure,
    ConnectFailure,
    DecryptFailure,
    EnvelopeError,
    ProtocolError,
    ProtocolViolation,
    RemoteDecryptFailure,
    StoreFailure,
)
from .key import MacKey, get_system_mac
from .utils import read_file, write_atomic

logger = logging.getLogger(__name__)

TOPIC_RECEIVED = "mac_cipher.transfer.received"
TOPIC_FAILED = "mac_cipher.transfer.failed"


def _received_message(path, size, peer):
    """Plaintext of `size` bytes from `peer` was written to `path`."""


def _failed_message(reason, peer):
    """A transfer from `peer` was rejected."""


_topics = pub.getDefaultTopicMgr()
_topics.getOrCreateTopic(TOPIC_RECEIVED, _received_message)
_topics.getOrCreateTopic(TOPIC_FAILED, _failed_message)


_LENGTH = struct.Struct('>Q')


@dataclass(frozen=True)
class HelloFrame:
    mac: MacKey

    SIZE = len(constants.HELLO_MAGIC) + constants.MAC_LENGTH

    def to_bytes(self) -> bytes:
        return constants.HELLO_MAGIC + self.mac.octets

    @classmethod
    def from_bytes(cls, data: bytes) -> 'HelloFrame':
        if len(data) != cls.SIZE or data[:4] != constants.HELLO_MAGIC:
            raise ProtocolViolation(f"Bad hello frame {bytes(data[:4])!r}")
        return cls(MacKey(data[4:]))


@dataclass(frozen=True)
class FileFrame:
    payload: bytes

    HEADER_SIZE = len(constants.FILE_MAGIC) + _LENGTH.size

    def to_bytes(self) -> bytes:
        return constants.FILE_MAGIC + _LENGTH.pack(len(self.payload)) + self.payload


def recv_exact(sock: socket.socket, size: int) -> bytes:
    """Reads exactly `size` bytes; a short read, reset or timeout is a protocol violation."""
    buf = bytearray()
    while len(buf) < size:
        try:
            chunk = sock.recv(min(constants.CHUNK_SIZE, size - len(buf)))
        except socket.timeout:
            raise ProtocolViolation(f"Timed out after {len(buf)} of {size} bytes")
        except OSError as e:
            raise ProtocolViolation(f"Connection lost after {len(buf)} of {size} bytes: {e}")
        if not chunk:
            raise ProtocolViolation(f"Connection closed after {len(buf)} of {size} bytes")
        buf.extend(chunk)
    return bytes(buf)


def resolve_key(key_source) -> MacKey:
    """A MacKey is used as is; a string names a network interface."""
    if isinstance(key_source, MacKey):
        return key_source
    return get_system_mac(key_source)


class ReceiverServer:
    """
    Binds once, then handles connections strictly one after another.
    Each connection carries exactly one file.
    """

    def __init__(self, key: MacKey, output_path: str, port: int = constants.DEFAULT_PORT, host: str = '0.0.0.0',
                 timeout: float = constants.DEFAULT_TIMEOUT, max_payload: int = constants.DEFAULT_MAX_PAYLOAD):
        self.key = key
        self.output_path = output_path
        self.host = host
        self.port = port
        self.timeout = timeout
        self.max_payload = max_payload
        self.sock = None

    def bind(self) -> int:
        """Binds and listens; returns the bound port (useful with port 0)."""
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            sock.bind((self.host, self.port))
            sock.listen(1)
        except OSError as e:
            sock.close()
            raise BindFailure(f"Cannot listen on {self.host}:{self.port}: {e}")
        self.sock = sock
        self.port = sock.getsockname()[1]
        logger.info(f"Receiver listening on {self.host}:{self.port}")
        return self.port

    def close(self) -> None:
        if self.sock:
            self.sock.close()
            self.sock = None

    def accept_one(self) -> int:
        """Accepts one connection and handles it; returns the plaintext size written."""
        if not self.sock:
            self.bind()
        conn, addr = self.sock.accept()
        peer = f"{addr[0]}:{addr[1]}"
        logger.info(f"Sender connected from {peer}")
        with conn:
            conn.settimeout(self.timeout)
            try:
                size = self._handle(conn)
            except ProtocolError as e:
                logger.error(f"Transfer from {peer} failed: {e}")
                pub.sendMessage(TOPIC_FAILED, reason=str(e), peer=peer)
                raise
        pub.sendMessage(TOPIC_RECEIVED, path=self.output_path, size=size, peer=peer)
        return size

    def serve(self, max_connections: int = None) -> int:
        """
        Handles connections until `max_connections` transfers have been
        attempted (forever when None). Failed transfers are logged and do not
        stop the loop. Returns the number of successful transfers.
        """
        handled = succeeded = 0
        while max_connections is None or handled < max_connections:
            handled += 1
            try:
                self.accept_one()
                succeeded += 1
            except ProtocolError:
                continue
        return succeeded

    def _handle(self, conn: socket.socket) -> int:
        conn.sendall(HelloFrame(self.key).to_bytes())

        header = recv_exact(conn, FileFrame.HEADER_SIZE)
        if header[:4] != constants.FILE_MAGIC:
            raise ProtocolViolation(f"Bad file frame magic {header[:4]!r}")
        (payload_length,) = _LENGTH.unpack_from(header, 4)
        if payload_length > self.max_payload:
            logger.warning(f"Rejecting payload of {payload_length} bytes (limit {self.max_payload})")
            raise ProtocolViolation(f"Payload length {payload_length} exceeds {self.max_payload}")

        payload = recv_exact(conn, payload_length)
        try:
            plaintext = decrypt(payload, self.key, CipherMode.CONTAINER)
        except EnvelopeError as e:
            conn.sendall(bytes([constants.STATUS_DECRYPT_ERROR]))
            raise DecryptFailure(f"Could not decrypt payload: {e}")

        try:
            write_atomic(self.output_path, plaintext)
        except OSError as e:
            conn.sendall(bytes([constants.STATUS_DECRYPT_ERROR]))
            raise StoreFailure(f"Cannot write {self.output_path}: {e}")
        conn.sendall(bytes([constants.STATUS_OK]))
        logger.info(f"Received {len(plaintext)} bytes into {self.output_path}")
        return len(plaintext)


def serve_receive(port: int, key_source, output_path: str, host: str = '0.0.0.0',
                  timeout: float = constants.DEFAULT_TIMEOUT,
                  max_payload: int = constants.DEFAULT_MAX_PAYLOAD) -> int:
    """Receives one file on `port`; returns the number of plaintext bytes written."""
    key = resolve_key(key_source)
    server = ReceiverServer(key, output_path, port=port, host=host, timeout=timeout, max_payload=max_payload)
    server.bind()
    try:
        return server.accept_one()
    finally:
        server.close()


def send_file(host: str, port: int, input_path: str, timeout: float = constants.DEFAULT_TIMEOUT) -> int:
    """
    Sends a file to a receiver, encrypted under the MAC the receiver
    announces. Returns the receiver's status byte (0x00).
    """
    data = read_file(input_path)
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except OSError as e:
        raise ConnectFailure(f"Cannot connect to {host}:{port}: {e}")

    with sock:
        sock.settimeout(timeout)
        hello = HelloFrame.from_bytes(recv_exact(sock, HelloFrame.SIZE))
        logger.info(f"Receiver announced key {hello.mac}")

        frame = FileFrame(encrypt(data, hello.mac, CipherMode.CONTAINER))
        try:
            sock.sendall(frame.to_bytes())
        except OSError as e:
            raise ProtocolViolation(f"Connection lost while sending: {e}")

        status = recv_exact(sock, 1)[0]

    if status == constants.STATUS_DECRYPT_ERROR:
        raise RemoteDecryptFailure("Receiver could not decrypt or store the payload")
    if status != constants.STATUS_OK:
        raise ProtocolViolation(f"Unknown status byte {status:#04x}")
    logger.info(f"Sent {len(data)} bytes from {input_path} ({len(frame.payload)} bytes on the wire)")
    return status
