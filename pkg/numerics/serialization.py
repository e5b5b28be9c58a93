"""
Binary checkpoint container.

Layout (little-endian):
    b"SGGC"  u32 version
    u32 length, UTF-8 config block of key=value lines
    u32 record count
    per record: u32 name length, UTF-8 name, u32 rank, u64[rank] dims, f32 payload

Records are written in the order given; loading preserves that order so
save -> load -> save reproduces the same bytes.
"""

import logging
import struct
from pathlib import Path

import numpy as np

from core.exceptions import CheckpointError

logger = logging.getLogger(__name__)

MAGIC = b"SGGC"
VERSION = 1


def encode_header(items):
    lines = []
    for key, value in items:
        value = str(value)
        if "=" in key or "\n" in key or "\n" in value:
            raise CheckpointError(f"header entry cannot be stored: {key!r}")
        lines.append(f"{key}={value}\n")
    return "".join(lines).encode("utf-8")


def decode_header(raw):
    items = {}
    for line in raw.decode("utf-8").splitlines():
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CheckpointError(f"malformed header line: {line!r}")
        items[key] = value
    return items


def write_container(path, header_items, records):
    """Write `records` (iterable of (name, array)) after the key=value header."""
    records = list(records)
    header = encode_header(header_items)
    chunks = [MAGIC, struct.pack("<I", VERSION), struct.pack("<I", len(header)), header]
    chunks.append(struct.pack("<I", len(records)))
    for name, array in records:
        encoded = name.encode("utf-8")
        array = np.asarray(array)
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}Q", *array.shape))
        chunks.append(np.ascontiguousarray(array, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(chunks))
    logger.debug(f"Wrote {len(records)} records to {path}")


class _Reader:
    def __init__(self, data, path):
        self.data = data
        self.offset = 0
        self.path = path

    def take(self, size):
        if self.offset + size > len(self.data):
            raise CheckpointError(f"{self.path}: truncated checkpoint at byte {self.offset}")
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def read_container(path):
    """Return (header dict, list of (name, float32 array))."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    reader = _Reader(data, path)
    if reader.take(4) != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    (version,) = reader.unpack("<I")
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    (header_len,) = reader.unpack("<I")
    header = decode_header(reader.take(header_len))
    (count,) = reader.unpack("<I")
    records = []
    for _ in range(count):
        (name_len,) = reader.unpack("<I")
        name = reader.take(name_len).decode("utf-8")
        (rank,) = reader.unpack("<I")
        dims = reader.unpack(f"<{rank}Q") if rank else ()
        size = int(np.prod(dims)) if dims else 1
        payload = np.frombuffer(reader.take(4 * size), dtype="<f4").astype(np.float32).reshape(dims)
        records.append((name, payload))
    if reader.offset != len(data):
        raise CheckpointError(f"{path}: {len(data) - reader.offset} trailing bytes")
    return header, records
