"""Trajectory dataset serialization.

Binary record stream (integers little-endian uint32 unless noted, floats
little-endian float64):

    magic    7 bytes  b"SSTRAJ1"
    version  u32
    env_id   u32 length + utf-8 bytes
    state_dim, action_dim, horizon  u32 each
    action_low, action_high         f64 * action_dim each
    provenance  u32 length + utf-8 JSON
    count    u32
    per trajectory:
        n_steps u32, has_actions u8,
        policy_id u32 length + utf-8, seed i64, return f64, source_index i64,
        states f64 * (n_steps+1)*state_dim,
        actions f64 * n_steps*action_dim   (only when has_actions),
        rewards f64 * n_steps

A lossless JSON-lines form (one header object, then one object per
trajectory) exists for inspection; float64 round-trips exactly through
repr-based JSON floats.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ssorl.envs.core import Dataset, Trajectory
from ssorl.errors import ContractViolation

MAGIC = b"SSTRAJ1"
VERSION = 1


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


def save_dataset(ds: Dataset, path: str | Path):
    chunks = [MAGIC, struct.pack("<I", VERSION), _pack_str(ds.env_id)]
    chunks.append(struct.pack("<III", ds.state_dim, ds.action_dim, ds.horizon))
    chunks.append(np.ascontiguousarray(ds.action_low, dtype="<f8").tobytes())
    chunks.append(np.ascontiguousarray(ds.action_high, dtype="<f8").tobytes())
    chunks.append(_pack_str(json.dumps(ds.provenance, sort_keys=True)))
    chunks.append(struct.pack("<I", len(ds.trajectories)))
    for traj in ds.trajectories:
        traj.validate()
        T = traj.length
        chunks.append(struct.pack("<IB", T, 1 if traj.has_actions else 0))
        chunks.append(_pack_str(str(traj.meta.get("policy_id", ""))))
        chunks.append(
            struct.pack(
                "<qdq",
                int(traj.meta.get("seed", -1)),
                float(traj.meta.get("return", traj.total_return)),
                int(traj.meta.get("source_index", -1)),
            )
        )
        chunks.append(np.ascontiguousarray(traj.states, dtype="<f8").tobytes())
        if traj.has_actions:
            chunks.append(np.ascontiguousarray(traj.actions, dtype="<f8").tobytes())
        chunks.append(np.ascontiguousarray(traj.rewards, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.off = 0

    def take(self, fmt: str):
        vals = struct.unpack_from(fmt, self.buf, self.off)
        self.off += struct.calcsize(fmt)
        return vals

    def take_str(self) -> str:
        (n,) = self.take("<I")
        s = self.buf[self.off : self.off + n].decode("utf-8")
        self.off += n
        return s

    def take_floats(self, n: int) -> np.ndarray:
        arr = np.frombuffer(self.buf, dtype="<f8", count=n, offset=self.off)
        self.off += 8 * n
        return arr.astype(np.float64)


def load_dataset(path: str | Path) -> Dataset:
    buf = Path(path).read_bytes()
    if buf[:7] != MAGIC:
        raise ContractViolation(f"{path}: bad magic {buf[:7]!r}")
    r = _Reader(buf)
    r.off = 7
    (version,) = r.take("<I")
    if version != VERSION:
        raise ContractViolation(f"{path}: unsupported version {version}")
    env_id = r.take_str()
    state_dim, action_dim, horizon = r.take("<III")
    low = r.take_floats(action_dim)
    high = r.take_floats(action_dim)
    provenance = json.loads(r.take_str())
    (count,) = r.take("<I")
    trajs = []
    for _ in range(count):
        T, has_actions = r.take("<IB")
        policy_id = r.take_str()
        seed, ret, source_index = r.take("<qdq")
        states = r.take_floats((T + 1) * state_dim).reshape(T + 1, state_dim)
        actions = r.take_floats(T * action_dim).reshape(T, action_dim) if has_actions else None
        rewards = r.take_floats(T)
        meta = {"policy_id": policy_id, "seed": seed, "return": ret}
        if source_index >= 0:
            meta["source_index"] = source_index
        trajs.append(Trajectory(states=states, actions=actions, rewards=rewards, meta=meta))
    return Dataset(
        env_id=env_id,
        state_dim=state_dim,
        action_dim=action_dim,
        action_low=low,
        action_high=high,
        horizon=horizon,
        trajectories=trajs,
        provenance=provenance,
    )


def export_jsonl(ds: Dataset, path: str | Path):
    with open(path, "w") as f:
        header = {
            "env_id": ds.env_id,
            "state_dim": ds.state_dim,
            "action_dim": ds.action_dim,
            "horizon": ds.horizon,
            "action_low": ds.action_low.tolist(),
            "action_high": ds.action_high.tolist(),
            "provenance": ds.provenance,
        }
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for traj in ds.trajectories:
            rec = {
                "states": traj.states.tolist(),
                "actions": traj.actions.tolist() if traj.has_actions else None,
                "rewards": traj.rewards.tolist(),
                "meta": traj.meta,
            }
            f.write(json.dumps(rec, sort_keys=True) + "\n")


def import_jsonl(path: str | Path) -> Dataset:
    with open(path) as f:
        header = json.loads(f.readline())
        trajs = []
        for line in f:
            rec = json.loads(line)
            trajs.append(
                Trajectory(
                    states=np.asarray(rec["states"], dtype=np.float64),
                    actions=None
                    if rec["actions"] is None
                    else np.asarray(rec["actions"], dtype=np.float64),
                    rewards=np.asarray(rec["rewards"], dtype=np.float64),
                    meta=rec["meta"],
                )
            )
    return Dataset(
        env_id=header["env_id"],
        state_dim=header["state_dim"],
        action_dim=header["action_dim"],
        action_low=np.asarray(header["action_low"]),
        action_high=np.asarray(header["action_high"]),
        horizon=header["horizon"],
        trajectories=trajs,
        provenance=header["provenance"],
    )
