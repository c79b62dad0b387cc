import logging
import os
import tempfile

logger = logging.getLogger(__name__)


def get_val(obj: object, key: str, default: any = None) -> any:
    """
    Safely retrieves a value from a dictionary or object.
    Handles nested access if key contains dots (e.g. 'wire.timeout').
    """
    try:
        if '.' in key:
            current = obj
            for part in key.split('.'):
                current = get_val(current, part)
                if current is None:
                    return default
            return current

        if isinstance(obj, dict):
            return obj.get(key, default)
        return getattr(obj, key, default)
    except Exception:
        return default


def read_file(path: str) -> bytes:
    with open(path, 'rb') as f:
        return f.read()


def write_atomic(path: str, data: bytes) -> None:
    """
    Writes data to a temporary file next to `path` and renames it into place,
    so a failed run never leaves a partial output file.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
    logger.debug(f"Wrote {len(data)} bytes to {path}")
