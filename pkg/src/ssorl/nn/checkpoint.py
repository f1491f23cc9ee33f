"""Flat binary checkpoint format for parameter sets.

Layout (all integers little-endian uint32, values little-endian float64):

    magic   6 bytes  b"SSORL1"
    version u32      currently 1
    count   u32      number of parameters
    then per parameter:
        name_len u32, name (utf-8), rank u32, extents u32 * rank,
        values f64 * prod(extents)
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ssorl.errors import ContractViolation
from ssorl.nn.params import ParamSet

MAGIC = b"SSORL1"
VERSION = 1


def save_checkpoint(ps: ParamSet, path: str | Path):
    chunks = [MAGIC, struct.pack("<II", VERSION, len(ps.params))]
    for name, t in ps.params.items():
        raw_name = name.encode("utf-8")
        arr = np.ascontiguousarray(t.data, dtype="<f8")
        chunks.append(struct.pack("<I", len(raw_name)))
        chunks.append(raw_name)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_checkpoint(path: str | Path) -> dict[str, np.ndarray]:
    buf = Path(path).read_bytes()
    if buf[:6] != MAGIC:
        raise ContractViolation(f"{path}: bad magic {buf[:6]!r}")
    version, count = struct.unpack_from("<II", buf, 6)
    if version != VERSION:
        raise ContractViolation(f"{path}: unsupported version {version}")
    off = 14
    out: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", buf, off)
        off += 4
        name = buf[off : off + name_len].decode("utf-8")
        off += name_len
        (rank,) = struct.unpack_from("<I", buf, off)
        off += 4
        shape = struct.unpack_from(f"<{rank}I", buf, off)
        off += 4 * rank
        n = int(np.prod(shape)) if rank else 1
        arr = np.frombuffer(buf, dtype="<f8", count=n, offset=off).reshape(shape)
        off += 8 * n
        out[name] = arr.astype(np.float64)
    return out


def restore_paramset(path: str | Path) -> ParamSet:
    ps = ParamSet()
    for name, arr in load_checkpoint(path).items():
        ps.add(name, arr)
    return ps
