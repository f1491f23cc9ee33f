"""Transition windows: the state context an inverse dynamics model sees.

An asymmetric window for transition t covers (s_{t-k}, ..., s_t, s_{t+1});
the symmetric variant appends (s_{t+2}, ..., s_{t+1+k}). Early windows are
front-padded by repeating the first state, symmetric windows are
tail-padded by repeating the final state, so every window of one
configuration has a fixed length (k+2 or 2k+2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ssorl.envs.core import Trajectory
from ssorl.errors import ContractViolation


@dataclass
class TransitionWindow:
    states: np.ndarray  # (k+2, state_dim) or (2k+2, state_dim)
    action: np.ndarray | None  # target action a_t, absent for unlabelled data
    t: int  # 1-based transition index within the trajectory
    traj_index: int

    @property
    def flat_states(self) -> np.ndarray:
        return self.states.reshape(-1)


def window_length(k: int, symmetric: bool) -> int:
    return 2 * k + 2 if symmetric else k + 2


def extract_windows(
    trajectories: list[Trajectory], k: int, symmetric: bool = False
) -> list[TransitionWindow]:
    """One window per (trajectory, t) for t in 1..|traj|."""
    if k < 0:
        raise ContractViolation(f"k must be >= 0, got {k}")
    out: list[TransitionWindow] = []
    for idx, traj in enumerate(trajectories):
        states = traj.states
        T = traj.length
        for t in range(1, T + 1):
            rows = [states[max(i, 0)] for i in range(t - 1 - k, t + 1)]
            if symmetric and k > 0:
                rows += [states[min(i, T)] for i in range(t + 1, t + 1 + k)]
            action = traj.actions[t - 1] if traj.has_actions else None
            out.append(
                TransitionWindow(
                    states=np.asarray(rows, dtype=np.float64),
                    action=action,
                    t=t,
                    traj_index=idx,
                )
            )
    return out


def windows_to_arrays(
    windows: list[TransitionWindow],
) -> tuple[np.ndarray, np.ndarray | None, np.ndarray]:
    """Stack windows into (inputs, actions, timesteps) for batched training.

    `actions` is None when any window is unlabelled.
    """
    X = np.stack([w.flat_states for w in windows])
    ts = np.array([w.t for w in windows])
    if all(w.action is not None for w in windows):
        A = np.stack([w.action for w in windows])
    else:
        A = None
    return X, A, ts
