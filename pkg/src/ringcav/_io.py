import csv
import hashlib
import io
import os
import tempfile
from pathlib import Path


def csv_bytes(header, rows):
    """RFC 4180 CSV, numbers in full-precision scientific notation."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else f"{float(v):.17e}" for v in row])
    return buf.getvalue().encode()


def atomic_write(path, data):
    """Write bytes via a temp file in the same directory and rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def sha256(data):
    return hashlib.sha256(data).hexdigest()
