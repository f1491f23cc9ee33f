"""A line environment engineered so one action channel is invisible to
single-transition inverse models.

State is (x, parity). The first action channel drives the dynamics
(x' = x + a_drive * dt), the second channel never does. The scripted
"alternating" behavior policy draws a per-trajectory style z in {-1, +1}
and emits (z, 0) on drive steps (parity 0) and (0, z) on dead steps
(parity 1). Recovering the dead-channel action on a dead step therefore
requires seeing at least one drive-step displacement, which a two-state
window never contains.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ssorl.envs.core import BehaviorPolicySpec, MdpSpec, compute_reference_scores

STYLE = BehaviorPolicySpec(family="alternating", markovian=False)
RANDOM = BehaviorPolicySpec(family="uniform")


@lru_cache(maxsize=None)
def make_alternating(dt: float = 0.1, horizon: int = 40) -> MdpSpec:
    def init_state(rng: np.random.Generator) -> np.ndarray:
        return np.array([rng.uniform(-1.0, 1.0), 0.0])

    def transition(state, action, rng):
        return np.array([state[0] + action[0] * dt, 1.0 - state[1]])

    def reward(state, action, next_state) -> float:
        return float(np.exp(-abs(next_state[0])))

    mdp = MdpSpec(
        env_id="alternating",
        state_dim=2,
        action_dim=2,
        action_low=np.array([-1.0, -1.0]),
        action_high=np.array([1.0, 1.0]),
        horizon=horizon,
        gamma=0.99,
        init_state=init_state,
        transition=transition,
        reward=reward,
        extras={"dt": dt},
    )
    return compute_reference_scores(mdp, STYLE, RANDOM)


def dead_step_mask(timesteps: np.ndarray) -> np.ndarray:
    """True for 1-based timesteps whose target action rides the dead channel."""
    return (np.asarray(timesteps) - 1) % 2 == 1


def alternating_style_oracle(window_states, k: int | None = None, dt: float = 0.1) -> float:
    """Bayes-optimal mean-squared error for the dead action channel of the
    window's target step.

    The target transition is the pair ending the asymmetric part of the
    window. Any drive-step pair with nonzero displacement pins the style
    exactly (best MSE 0); otherwise the symmetric two-point prior over z
    makes 0 the best prediction (MSE 1). On drive-step targets the dead
    action is identically zero, so the oracle MSE is 0.
    """
    states = np.asarray(getattr(window_states, "states", window_states), dtype=np.float64)
    if k is not None and states.shape[0] not in (k + 2, 2 * k + 2):
        raise ValueError(
            f"window of length {states.shape[0]} does not match k={k} "
            f"(expected {k + 2} or {2 * k + 2})"
        )
    # target pair: with an asymmetric window the last two rows; a symmetric
    # window of length 2k+2 has the target pair at rows (k, k+1)
    if k is not None and states.shape[0] == 2 * k + 2 and k > 0:
        target_row = k
    else:
        target_row = states.shape[0] - 2
    if states[target_row, 1] < 0.5:  # drive step: dead action is always 0
        return 0.0
    for i in range(states.shape[0] - 1):
        if states[i, 1] < 0.5 and abs(states[i + 1, 0] - states[i, 0]) > 1e-12:
            return 0.0
    return 1.0
