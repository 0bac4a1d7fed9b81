"""Versioned binary checkpoint container.

Layout, all integers little-endian:

| bytes        | content                                               |
|--------------|-------------------------------------------------------|
| 8            | magic `BBNCKPT\\0`                                     |
| 4            | uint32 format version                                 |
| 4            | uint32 header length L                                |
| L            | UTF-8 JSON header: metadata and the tensor table      |
| sum(nbytes)  | tensor data, C order, little-endian, in table order   |
| 4            | uint32 CRC32 of everything before it                  |

Each tensor table entry holds name, dtype, shape, offset (into the data
section), nbytes and trainable. The header is written with sorted keys so
save → load → save reproduces the file byte for byte.
"""

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from ballbot_nav.config import CheckpointError, logger
from ballbot_nav.nn.store import ParameterStore

MAGIC = b"BBNCKPT\0"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sII")
_CRC = struct.Struct("<I")
HEADER_KEYS = {"metadata", "tensors"}
ENTRY_KEYS = {"name", "dtype", "shape", "offset", "nbytes", "trainable"}


def encode_checkpoint(
    tensors: dict[str, np.ndarray],
    metadata: dict | None = None,
    trainable: dict[str, bool] | None = None,
) -> bytes:
    """Serialise named arrays and JSON-serialisable metadata to bytes"""

    trainable = trainable or {}
    table, chunks, offset = [], [], 0
    for name, value in tensors.items():
        arr = np.ascontiguousarray(value)
        arr = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
        data = arr.tobytes()
        table.append(
            {
                "name": name,
                "dtype": arr.dtype.str,
                "shape": list(arr.shape),
                "offset": offset,
                "nbytes": len(data),
                "trainable": bool(trainable.get(name, True)),
            }
        )
        chunks.append(data)
        offset += len(data)

    header = json.dumps(
        {"metadata": metadata or {}, "tensors": table},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    body = _PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)) + header + b"".join(chunks)
    return body + _CRC.pack(zlib.crc32(body))


def _check_header(header) -> None:
    if not isinstance(header, dict) or not HEADER_KEYS <= header.keys():
        raise CheckpointError(
            "Checkpoint header is corrupt: it needs a metadata and a tensors entry"
        )
    if not isinstance(header["tensors"], list) or not all(
        isinstance(entry, dict) and ENTRY_KEYS <= entry.keys()
        for entry in header["tensors"]
    ):
        raise CheckpointError("Checkpoint header is corrupt: bad tensor table")


def decode_checkpoint(
    blob: bytes,
) -> tuple[dict[str, np.ndarray], dict, dict[str, bool]]:
    """Parse bytes written by `encode_checkpoint`.

    Returns:
        (tensors, metadata, trainable flags)

    Raises:
        CheckpointError: wrong magic, unsupported version, a malformed header,
            truncation or a checksum mismatch.
    """

    if len(blob) < _PREFIX.size + _CRC.size:
        raise CheckpointError("Checkpoint is truncated")
    magic, version, header_len = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointError("Not a ballbot-nav checkpoint")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"Checkpoint format version {version} is not supported "
            f"(expected {FORMAT_VERSION})"
        )

    header_end = _PREFIX.size + header_len
    if header_end + _CRC.size > len(blob):
        raise CheckpointError("Checkpoint is truncated")
    try:
        header = json.loads(blob[_PREFIX.size : header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"Checkpoint header is corrupt: {e}")

    _check_header(header)
    data_len = sum(entry["nbytes"] for entry in header["tensors"])
    if header_end + data_len + _CRC.size != len(blob):
        raise CheckpointError("Checkpoint is truncated")
    body = blob[: -_CRC.size]
    (crc,) = _CRC.unpack(blob[-_CRC.size :])
    if zlib.crc32(body) != crc:
        raise CheckpointError("Checkpoint checksum mismatch, the file is corrupt")

    tensors, trainable = {}, {}
    for entry in header["tensors"]:
        start = header_end + entry["offset"]
        count = int(np.prod(entry["shape"], dtype=np.int64))
        dtype = np.dtype(entry["dtype"])
        arr = np.frombuffer(body, dtype=dtype, count=count, offset=start)
        tensors[entry["name"]] = arr.reshape(entry["shape"]).copy()
        trainable[entry["name"]] = entry["trainable"]
    return tensors, header["metadata"], trainable


def save_checkpoint(
    path: str | Path,
    tensors: dict[str, np.ndarray],
    metadata: dict | None = None,
    trainable: dict[str, bool] | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(tensors, metadata, trainable))
    logger.info(f"Checkpoint with {len(tensors)} tensors written to {path}")
    return path


def load_checkpoint(
    path: str | Path,
) -> tuple[dict[str, np.ndarray], dict, dict[str, bool]]:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"Checkpoint {path} does not exist")
    return decode_checkpoint(path.read_bytes())


def save_store(store: ParameterStore, path: str | Path) -> Path:
    """Write every parameter of a store with the store metadata"""

    trainable = {p.name: p.trainable for p in store}
    return save_checkpoint(path, store.state_dict(), store.metadata, trainable)


def load_store(path: str | Path) -> ParameterStore:
    """Rebuild a store from a checkpoint, keeping dtypes and trainable flags"""

    tensors, metadata, trainable = load_checkpoint(path)
    dtypes = {arr.dtype for arr in tensors.values()}
    store = ParameterStore(
        dtype=dtypes.pop() if len(dtypes) == 1 else np.float64, metadata=metadata
    )
    for name, value in tensors.items():
        store.add(name, value, trainable=trainable[name])
    return store
