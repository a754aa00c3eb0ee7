"""Versioned binary weight container with an architecture guard.

Layout: magic "SPDY", format version (u32), FNV-1a 64-bit hash of the
architecture description, entry count (u32), then per entry a length-prefixed
UTF-8 name, rank + dims (u32 each) and raw little-endian float32 data. The
hash is checked before any entry is parsed, so a mismatched architecture can
never partially load.

Bookkeeping (embedded config text, normalization stats, epoch/step, schedule
state) rides along as float32 tensors under reserved "__meta__/" names.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .config import architecture_text, config_to_text, parse_config

MAGIC = b"SPDY"
VERSION = 1
META_PREFIX = "__meta__/"


class CheckpointError(ValueError):
    pass


def fnv1a_64(data):
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def save_tensors(path, named_arrays, arch_hash):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<Q", arch_hash))
        fh.write(struct.pack("<I", len(named_arrays)))
        for name, array in named_arrays.items():
            # asarray keeps 0-d shape; ascontiguousarray would promote to 1-d
            data = np.asarray(array, dtype="<f4")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<I", data.ndim))
            for dim in data.shape:
                fh.write(struct.pack("<I", dim))
            fh.write(data.tobytes())


def _read_exact(fh, n, path, what):
    buf = fh.read(n)
    if len(buf) != n:
        raise CheckpointError(f"{path}: truncated while reading {what}")
    return buf


def load_tensors(path, expected_hash=None):
    """Read the container; returns (name -> float32 array, stored hash)."""
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
        version, = struct.unpack("<I", _read_exact(fh, 4, path, "version"))
        if version != VERSION:
            raise CheckpointError(
                f"{path}: format version {version}, expected {VERSION}")
        stored, = struct.unpack("<Q", _read_exact(fh, 8, path, "hash"))
        if expected_hash is not None and stored != expected_hash:
            raise CheckpointError(
                f"{path}: architecture hash mismatch "
                f"(stored {stored:#018x}, expected {expected_hash:#018x})")
        count, = struct.unpack("<I", _read_exact(fh, 4, path, "entry count"))
        arrays = {}
        for _ in range(count):
            name_len, = struct.unpack("<I", _read_exact(fh, 4, path, "name"))
            name = _read_exact(fh, name_len, path, "name").decode("utf-8")
            rank, = struct.unpack("<I", _read_exact(fh, 4, path, "rank"))
            shape = tuple(
                struct.unpack("<I", _read_exact(fh, 4, path, "dims"))[0]
                for _ in range(rank))
            n_bytes = 4 * int(np.prod(shape, dtype=np.int64)) if rank else 4
            raw = _read_exact(fh, n_bytes, path, f"data of {name!r}")
            arrays[name] = np.frombuffer(raw, dtype="<f4").reshape(shape)
    return arrays, stored


def _text_to_array(text):
    return np.frombuffer(text.encode("utf-8"), dtype=np.uint8).astype(np.float32)


def _array_to_text(array):
    return np.asarray(array).astype(np.uint8).tobytes().decode("utf-8")


def save_checkpoint(path, model, cfg, kind, epoch=0, step=0, stats=None,
                    extra=None):
    """Write model weights + buffers + run bookkeeping under one hash."""
    arch_hash = fnv1a_64(architecture_text(cfg, kind))
    entries = {}
    for name, p in model.named_parameters():
        entries[name] = p.data
    for name, buf in model.named_buffers():
        entries[f"buffer/{name}"] = np.asarray(buf, dtype=np.float32)
    entries[META_PREFIX + "kind"] = _text_to_array(kind)
    entries[META_PREFIX + "config_text"] = _text_to_array(config_to_text(cfg))
    entries[META_PREFIX + "progress"] = np.array([epoch, step], dtype=np.float32)
    if stats is not None:
        entries[META_PREFIX + "stats"] = np.asarray(stats, dtype=np.float32)
    for key, value in (extra or {}).items():
        entries[META_PREFIX + key] = np.asarray(value, dtype=np.float32)
    save_tensors(path, entries, arch_hash)


def load_checkpoint(path, model, cfg, kind):
    """Copy weights into `model`; returns the bookkeeping dict.

    The stored architecture hash must match the (cfg, kind) hash; nothing is
    copied otherwise.
    """
    expected = fnv1a_64(architecture_text(cfg, kind))
    arrays, _ = load_tensors(path, expected_hash=expected)

    meta = {"extra": {}}
    params = dict(model.named_parameters())
    buffers = dict(model.named_buffers())
    for name, array in arrays.items():
        if name.startswith(META_PREFIX):
            key = name[len(META_PREFIX):]
            if key in ("kind", "config_text"):
                meta[key] = _array_to_text(array)
            elif key == "progress":
                meta["epoch"], meta["step"] = int(array[0]), int(array[1])
            elif key == "stats":
                meta["stats"] = (float(array[0]), float(array[1]))
            else:
                meta["extra"][key] = np.asarray(array)
        elif name.startswith("buffer/"):
            key = name[len("buffer/"):]
            if key not in buffers:
                raise CheckpointError(f"{path}: unknown buffer {key!r}")
            model.set_buffer(key, array.astype(buffers[key].dtype))
        else:
            if name not in params:
                raise CheckpointError(f"{path}: unknown parameter {name!r}")
            if params[name].data.shape != array.shape:
                raise CheckpointError(
                    f"{path}: shape mismatch for {name!r}: "
                    f"{array.shape} vs {params[name].data.shape}")
            params[name].data = array.astype(np.float32).copy()
    if meta.get("kind", kind) != kind:
        raise CheckpointError(
            f"{path}: holds a {meta['kind']} model, wanted {kind}")
    return meta


def peek_config(path):
    """Reconstruct the embedded PipelineConfig without touching any model."""
    arrays, stored = load_tensors(path)
    key = META_PREFIX + "config_text"
    if key not in arrays:
        raise CheckpointError(f"{path}: no embedded config")
    cfg = parse_config(_array_to_text(arrays[key]), source=f"{path}(embedded)")
    kind = _array_to_text(arrays[META_PREFIX + "kind"])
    return cfg, kind, stored
