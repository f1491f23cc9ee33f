"""Force-actuated point mass moving to a fixed goal in a square arena.

State (x, y, vx, vy); action is a 2-d acceleration in [-1, 1]^2. Velocity
then position integrate with clamping, and the dense reward is the
exponentiated negative distance to the goal, exp(-d) in (0, 1] by default
(a sign flag selects -exp(-d) instead).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ssorl.envs.core import BehaviorPolicySpec, MdpSpec, compute_reference_scores

# noisy PD demonstrators carry a latent per-trajectory bias, so they are
# mixtures of Markovian policies rather than single Markovian ones
EXPERT = BehaviorPolicySpec(family="pd", gain=1.0, noise=0.05, markovian=False)
MEDIUM = BehaviorPolicySpec(family="pd", gain=1.0, noise=0.4, markovian=False)
CLEAN_PD = BehaviorPolicySpec(family="pd", gain=1.0, noise=0.0, markovian=True)
RANDOM = BehaviorPolicySpec(family="uniform")

TIERS = {"expert": EXPERT, "medium": MEDIUM, "random": RANDOM}


@lru_cache(maxsize=None)
def make_pointmass(
    dt: float = 0.1,
    horizon: int = 100,
    arena: float = 2.0,
    goal: tuple[float, float] = (0.5, 0.5),
    v_max: float = 2.0,
    negate_reward: bool = False,
) -> MdpSpec:
    goal_arr = np.asarray(goal, dtype=np.float64)
    sign = -1.0 if negate_reward else 1.0

    def init_state(rng: np.random.Generator) -> np.ndarray:
        # position uniform in the arena, velocity zero: inverse dynamics are
        # well-posed from the first step
        pos = rng.uniform(-arena, arena, size=2)
        return np.concatenate([pos, np.zeros(2)])

    def transition(state, action, rng):
        v = np.clip(state[2:4] + action * dt, -v_max, v_max)
        x = np.clip(state[:2] + v * dt, -arena, arena)
        return np.concatenate([x, v])

    def reward(state, action, next_state) -> float:
        d = float(np.linalg.norm(next_state[:2] - goal_arr))
        return sign * float(np.exp(-d))

    mdp = MdpSpec(
        env_id="pointmass",
        state_dim=4,
        action_dim=2,
        action_low=np.array([-1.0, -1.0]),
        action_high=np.array([1.0, 1.0]),
        horizon=horizon,
        gamma=0.99,
        init_state=init_state,
        transition=transition,
        reward=reward,
        extras={"goal": goal_arr, "dt": dt, "arena": arena, "v_max": v_max},
    )
    return compute_reference_scores(mdp, EXPERT, RANDOM)


def inverse_action(mdp: MdpSpec, state: np.ndarray, next_state: np.ndarray) -> np.ndarray:
    """Closed-form inverse dynamics a = (v' - v) / dt (exact away from the
    velocity clamp)."""
    dt = mdp.extras["dt"]
    return (next_state[2:4] - state[2:4]) / dt
