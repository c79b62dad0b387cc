import argparse
import logging
import os
import sys

import yaml
from pubsub import pub

from . import constants
from . import wire
from .analysis import analyze, histogram, histogram_csv, key_sensitivity
from .bmp import decrypt_bmp_body, encrypt_bmp_body
from .cipher import CipherMode, decrypt_file, encrypt_file, encrypt_trace
from .exceptions import (
    BindFailure,
    ConnectFailure,
    KeyResolutionError,
    MacCipherError,
)
from .key import MacStyle, brute_force_keys, format_mac, get_system_mac, keyspace_bits, list_interfaces, parse_mac
from .reporter import AnalysisReporter
from .utils import get_val, read_file, write_atomic

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_KEY = 5


def load_config(config_file: str) -> dict:
    if config_file and os.path.exists(config_file):
        try:
            with open(config_file, 'r') as f:
                config = yaml.safe_load(f) or {}
            if not isinstance(config, dict):
                raise ValueError("top level must be a mapping")
        except Exception as e:
            logger.error(f"Error loading config file: {e}")
            return {}
        for forbidden in ('key', 'mac'):
            if forbidden in config:
                logger.warning(f"Ignoring '{forbidden}' in {config_file}: keys are given per invocation only")
                config.pop(forbidden)
        return config
    return {}


def setup_logging(level_name: str) -> None:
    level = getattr(logging, str(level_name).upper(), logging.INFO)
    logging.basicConfig(level=level, format=constants.LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)
    logger.debug(f"Log level set to: {logging.getLevelName(level)}")


def _add_key_options(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--key', help='MAC address used as the key (MM:MM:MM:SS:SS:SS or MM-MM-MM-SS-SS-SS)')
    group.add_argument('--iface', help='Use the hardware address of this network interface as the key')


class CliParser(argparse.ArgumentParser):
    """Reports usage errors as `error: <message>` with exit status 2."""

    def error(self, message):
        self.exit(EXIT_USAGE, f"error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog='mac-cipher', description='MAC-address keyed file and image cipher')
    parser.add_argument('--config', default='config.yaml', help='YAML configuration file (default: config.yaml)')
    parser.add_argument('--log-level', help='Logging level (overrides log_level from the config)')
    sub = parser.add_subparsers(dest='command', required=True)

    for name, help_text in (('encrypt', 'Encrypt a file'), ('decrypt', 'Decrypt a file')):
        p = sub.add_parser(name, help=help_text)
        _add_key_options(p)
        p.add_argument('--raw', action='store_true', help='Length-preserving raw mode (no envelope)')
        p.add_argument('input')
        p.add_argument('output')

    for name, help_text in (('encrypt-bmp', 'Encrypt the pixel data of a BMP image'),
                            ('decrypt-bmp', 'Decrypt the pixel data of a BMP image')):
        p = sub.add_parser(name, help=help_text)
        _add_key_options(p)
        p.add_argument('input')
        p.add_argument('output')

    p = sub.add_parser('analyze', help='Compare a source and an encrypted file')
    p.add_argument('--source', required=True)
    p.add_argument('--encrypted', required=True)
    p.add_argument('--bmp', action='store_true', help='Treat both inputs as BMP images')
    p.add_argument('--report', action='store_true', help='Also write a Markdown/HTML/JSON report into report_dir')
    p.add_argument('--report-dir', help='Write the report into this directory (implies --report)')

    p = sub.add_parser('histogram', help='Print the byte histogram of a file as CSV')
    p.add_argument('input')

    p = sub.add_parser('keyinfo', help='Show a key in all its representations')
    _add_key_options(p, required=False)
    p.add_argument('--list', action='store_true', help='List network interfaces and their addresses')

    p = sub.add_parser('sensitivity', help='Decrypt with every one-bit-wrong key and measure the damage')
    _add_key_options(p)
    p.add_argument('--raw', action='store_true')
    p.add_argument('input')

    p = sub.add_parser('trace', help='Print the intermediate tables of the pipeline')
    _add_key_options(p)
    p.add_argument('input')

    p = sub.add_parser('recv', help='Receive files encrypted under this host\'s MAC')
    p.add_argument('--port', type=int)
    _add_key_options(p)
    p.add_argument('--out', required=True)
    p.add_argument('--host', default='0.0.0.0', help='Address to bind (default: all)')
    p.add_argument('--count', type=int, default=1, help='Transfers to handle before exiting, 0 = forever')
    p.add_argument('--timeout', type=float)

    p = sub.add_parser('send', help='Send a file to a receiver')
    p.add_argument('--host', required=True)
    p.add_argument('--port', type=int)
    p.add_argument('--timeout', type=float)
    p.add_argument('input')

    return parser


def resolve_key(args):
    if args.key is not None:
        return parse_mac(args.key)
    return get_system_mac(args.iface)


def _mode(args) -> CipherMode:
    return CipherMode.RAW if args.raw else CipherMode.CONTAINER


def _cmd_encrypt(args, config):
    encrypt_file(args.input, args.output, resolve_key(args), _mode(args))


def _cmd_decrypt(args, config):
    decrypt_file(args.input, args.output, resolve_key(args), _mode(args))


def _cmd_encrypt_bmp(args, config):
    key = resolve_key(args)
    write_atomic(args.output, encrypt_bmp_body(read_file(args.input), key))


def _cmd_decrypt_bmp(args, config):
    key = resolve_key(args)
    write_atomic(args.output, decrypt_bmp_body(read_file(args.input), key))


def _cmd_analyze(args, config):
    report = analyze(read_file(args.source), read_file(args.encrypted), image=args.bmp)
    sys.stdout.write(report.to_document())
    if args.report or args.report_dir:
        report_dir = args.report_dir or get_val(config, 'report_dir', constants.DEFAULT_REPORT_DIR)
        reporter = AnalysisReporter(report_dir=report_dir, config=config)
        reporter.generate_report(report, source_name=args.source, encrypted_name=args.encrypted)


def _cmd_histogram(args, config):
    sys.stdout.write(histogram_csv(histogram(read_file(args.input))))


def _cmd_keyinfo(args, config):
    if args.list:
        for name, key in list_interfaces():
            print(f"{name}\t{format_mac(key) if key else '-'}")
        if args.key is None and args.iface is None:
            return

    if args.key is None and args.iface is None:
        print("error: keyinfo needs --key, --iface or --list", file=sys.stderr)
        return EXIT_USAGE

    key = resolve_key(args)
    print(format_mac(key, MacStyle.COLON))
    print(f"keyspace: {keyspace_bits()} bits")
    print(f"hyphen: {format_mac(key, MacStyle.HYPHEN)}")
    print(f"decimal: {' '.join(str(octet) for octet in key)}")
    print(f"integer: {key.as_int():#014x}")
    print(f"brute force: {brute_force_keys()} keys")


def _cmd_sensitivity(args, config):
    key = resolve_key(args)
    ratios = key_sensitivity(read_file(args.input), key, _mode(args))
    print("bit,diff_ratio")
    for bit, ratio in enumerate(ratios):
        print(f"{bit},{ratio:.6f}")
    print(f"# min {min(ratios):.6f} mean {sum(ratios) / len(ratios):.6f} max {max(ratios):.6f}")


def _print_table(title, rows, numbered=None):
    print(title)
    for number, row in zip(numbered or range(1, len(rows) + 1), rows):
        print(f"{number}\t" + "\t".join(str(g) for g in row))
    print()


def _cmd_trace(args, config):
    key = resolve_key(args)
    trace = encrypt_trace(read_file(args.input), key)
    print(f"Key: {' '.join(str(octet) for octet in key)}\n")
    _print_table("Vectors", trace.vectors)
    _print_table("After crossover", trace.crossed)
    _print_table("After mutation", trace.mutated)
    _print_table("After re-sequencing", trace.resequenced, numbered=trace.order)


def _on_transfer_received(path, size, peer):
    logger.info(f"Transfer complete: {size} bytes from {peer} written to {path}")


def _on_transfer_failed(reason, peer):
    logger.warning(f"Transfer from {peer} rejected: {reason}")


def _cmd_recv(args, config):
    key = resolve_key(args)
    pub.subscribe(_on_transfer_received, wire.TOPIC_RECEIVED)
    pub.subscribe(_on_transfer_failed, wire.TOPIC_FAILED)

    server = wire.ReceiverServer(
        key, args.out,
        port=args.port if args.port is not None else get_val(config, 'wire.port', constants.DEFAULT_PORT),
        host=args.host,
        timeout=args.timeout if args.timeout is not None else get_val(config, 'wire.timeout', constants.DEFAULT_TIMEOUT),
        max_payload=get_val(config, 'wire.max_payload', constants.DEFAULT_MAX_PAYLOAD),
    )
    server.bind()
    max_connections = args.count if args.count > 0 else None
    try:
        succeeded = server.serve(max_connections)
    except KeyboardInterrupt:
        logger.info("Stopping receiver...")
        return EXIT_OK
    finally:
        server.close()

    if max_connections is None or succeeded == max_connections:
        return EXIT_OK
    if succeeded:
        # files from the successful transfers stay in place
        logger.warning(f"{max_connections - succeeded} of {max_connections} transfers failed")
        return EXIT_OK
    print(f"error: all {max_connections} transfers failed", file=sys.stderr)
    return EXIT_FORMAT


def _cmd_send(args, config):
    port = args.port if args.port is not None else get_val(config, 'wire.port', constants.DEFAULT_PORT)
    timeout = args.timeout if args.timeout is not None else get_val(config, 'wire.timeout', constants.DEFAULT_TIMEOUT)
    wire.send_file(args.host, port, args.input, timeout=timeout)


COMMANDS = {
    'encrypt': _cmd_encrypt,
    'decrypt': _cmd_decrypt,
    'encrypt-bmp': _cmd_encrypt_bmp,
    'decrypt-bmp': _cmd_decrypt_bmp,
    'analyze': _cmd_analyze,
    'histogram': _cmd_histogram,
    'keyinfo': _cmd_keyinfo,
    'sensitivity': _cmd_sensitivity,
    'trace': _cmd_trace,
    'recv': _cmd_recv,
    'send': _cmd_send,
}


def exit_code_for(error: Exception) -> int:
    if isinstance(error, KeyResolutionError):
        return EXIT_KEY
    if isinstance(error, (BindFailure, ConnectFailure, OSError)):
        return EXIT_IO
    return EXIT_FORMAT


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    config = load_config(args.config)
    setup_logging(args.log_level or config.get('log_level', constants.DEFAULT_LOG_LEVEL))

    try:
        code = COMMANDS[args.command](args, config)
    except (MacCipherError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    return code if code is not None else EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
