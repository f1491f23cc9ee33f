"""Core environment machinery: MDP specs, behavior policies, rollouts,
dataset generation, and return normalization."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ssorl.errors import ContractViolation


@dataclass(frozen=True)
class MdpSpec:
    """A desk-scale MDP with pure transition/reward functions.

    `transition` takes (state, action, rng); deterministic environments
    ignore the rng. `random_ref` / `expert_ref` are raw-return reference
    scores used for normalization, computed once at construction.
    """

    env_id: str
    state_dim: int
    action_dim: int
    action_low: np.ndarray
    action_high: np.ndarray
    horizon: int
    gamma: float
    init_state: Callable[[np.random.Generator], np.ndarray]
    transition: Callable[[np.ndarray, np.ndarray, np.random.Generator | None], np.ndarray]
    reward: Callable[[np.ndarray, np.ndarray, np.ndarray], float]
    random_ref: float = float("nan")
    expert_ref: float = float("nan")
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BehaviorPolicySpec:
    """Scripted data-collection policy of tunable quality.

    Families: "pd" (proportional-derivative toward the env goal),
    "alternating" (per-trajectory latent style in {-1,+1}), "uniform".
    """

    family: str
    gain: float = 1.0
    noise: float = 0.0
    markovian: bool = True

    @property
    def policy_id(self) -> str:
        if self.family == "pd":
            return f"pd_g{self.gain:g}_n{self.noise:g}"
        return self.family


@dataclass
class Trajectory:
    states: np.ndarray  # (T+1, state_dim), includes terminal state
    actions: np.ndarray | None  # (T, action_dim) or None when unlabelled
    rewards: np.ndarray  # (T,)
    meta: dict = field(default_factory=dict)

    @property
    def length(self) -> int:
        return self.rewards.shape[0]

    @property
    def has_actions(self) -> bool:
        return self.actions is not None

    @property
    def total_return(self) -> float:
        return float(self.rewards.sum())

    def validate(self):
        T = self.length
        if self.states.shape[0] != T + 1:
            raise ContractViolation(
                f"states length {self.states.shape[0]} != rewards length {T} + 1"
            )
        if self.actions is not None and self.actions.shape[0] != T:
            raise ContractViolation(
                f"actions length {self.actions.shape[0]} != rewards length {T}"
            )
        if "return" in self.meta and not np.isclose(self.meta["return"], self.total_return):
            raise ContractViolation("return metadata does not match sum of rewards")


@dataclass
class Dataset:
    env_id: str
    state_dim: int
    action_dim: int
    action_low: np.ndarray
    action_high: np.ndarray
    horizon: int
    trajectories: list[Trajectory] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.trajectories)

    def returns(self) -> np.ndarray:
        return np.array([t.total_return for t in self.trajectories])

    def with_trajectories(self, trajectories: list[Trajectory], provenance: dict | None = None):
        return Dataset(
            env_id=self.env_id,
            state_dim=self.state_dim,
            action_dim=self.action_dim,
            action_low=self.action_low,
            action_high=self.action_high,
            horizon=self.horizon,
            trajectories=trajectories,
            provenance=self.provenance if provenance is None else provenance,
        )


def dataset_for(mdp: MdpSpec, trajectories: list[Trajectory], provenance: dict | None = None) -> Dataset:
    return Dataset(
        env_id=mdp.env_id,
        state_dim=mdp.state_dim,
        action_dim=mdp.action_dim,
        action_low=mdp.action_low.copy(),
        action_high=mdp.action_high.copy(),
        horizon=mdp.horizon,
        trajectories=trajectories,
        provenance=provenance or {},
    )


# -- behavior policies ---------------------------------------------------------


class _PdPolicy:
    """Proportional-derivative controller toward the env goal.

    The noise knob models a miscalibrated demonstrator: a per-trajectory
    constant actuator bias plus slowly wandering (AR(1)) actuator noise,
    both with scale `noise`. White per-step noise would be filtered out by
    the double integrator and leave every noise level scoring the same.
    """

    _RHO = 0.95

    def __init__(self, spec: BehaviorPolicySpec, mdp: MdpSpec):
        self.spec = spec
        self.goal = np.asarray(mdp.extras["goal"])
        self.kd = mdp.extras.get("pd_derivative_gain", 2.5)
        self.bias = np.zeros(2)
        self.wander = np.zeros(2)

    def reset(self, rng: np.random.Generator):
        self.bias = self.spec.noise * rng.uniform(-1.0, 1.0, size=2)
        self.wander = np.zeros(2)

    def act(self, state: np.ndarray, t: int, rng: np.random.Generator) -> np.ndarray:
        pos, vel = state[:2], state[2:4]
        accel = self.spec.gain * (self.goal - pos) - self.kd * vel
        if self.spec.noise > 0.0:
            self.wander = self._RHO * self.wander + self.spec.noise * np.sqrt(
                1.0 - self._RHO**2
            ) * rng.standard_normal(2)
            accel = accel + self.bias + self.wander
        return accel


class _AlternatingPolicy:
    def __init__(self, spec: BehaviorPolicySpec, mdp: MdpSpec):
        self.z = 1.0

    def reset(self, rng: np.random.Generator):
        self.z = 1.0 if rng.random() < 0.5 else -1.0

    def act(self, state: np.ndarray, t: int, rng: np.random.Generator) -> np.ndarray:
        parity = state[1]
        if parity < 0.5:  # drive step: style shows in the dynamics channel
            return np.array([self.z, 0.0])
        return np.array([0.0, self.z])  # dead step: style rides the dead channel


class _UniformPolicy:
    def __init__(self, spec: BehaviorPolicySpec, mdp: MdpSpec):
        self.low = mdp.action_low
        self.high = mdp.action_high

    def reset(self, rng: np.random.Generator):
        pass

    def act(self, state: np.ndarray, t: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high)


_POLICY_FAMILIES = {"pd": _PdPolicy, "alternating": _AlternatingPolicy, "uniform": _UniformPolicy}


def make_policy(spec: BehaviorPolicySpec, mdp: MdpSpec):
    if spec.family not in _POLICY_FAMILIES:
        raise ContractViolation(f"unknown policy family {spec.family!r}")
    return _POLICY_FAMILIES[spec.family](spec, mdp)


# -- stepping and rollouts -----------------------------------------------------


def step(
    mdp: MdpSpec, state: np.ndarray, action: np.ndarray, rng: np.random.Generator | None = None
) -> tuple[np.ndarray, float]:
    """One environment step; actions outside bounds are clamped, not rejected."""
    state = np.asarray(state, dtype=np.float64)
    action = np.asarray(action, dtype=np.float64)
    if not (np.all(np.isfinite(state)) and np.all(np.isfinite(action))):
        raise ContractViolation("non-finite state or action")
    action = np.clip(action, mdp.action_low, mdp.action_high)
    nxt = mdp.transition(state, action, rng)
    r = float(mdp.reward(state, action, nxt))
    return nxt, r


def rollout(mdp: MdpSpec, policy_spec: BehaviorPolicySpec, seed: int) -> Trajectory:
    """Full-horizon trajectory, fully determined by (mdp, policy_spec, seed)."""
    rng = np.random.default_rng(seed)
    policy = make_policy(policy_spec, mdp)
    policy.reset(rng)
    s = mdp.init_state(rng)
    states = [s]
    actions = []
    rewards = []
    for t in range(1, mdp.horizon + 1):
        a = np.clip(policy.act(s, t, rng), mdp.action_low, mdp.action_high)
        s, r = step(mdp, s, a, rng)
        states.append(s)
        actions.append(a)
        rewards.append(r)
    traj = Trajectory(
        states=np.asarray(states, dtype=np.float64),
        actions=np.asarray(actions, dtype=np.float64),
        rewards=np.asarray(rewards, dtype=np.float64),
        meta={"policy_id": policy_spec.policy_id, "seed": int(seed)},
    )
    traj.meta["return"] = traj.total_return
    return traj


def generate_dataset(
    mdp: MdpSpec,
    mixture: list[tuple[BehaviorPolicySpec, float]],
    n_trajectories: int,
    seed: int,
) -> Dataset:
    """Roll out a mixture of behavior policies; proportions must sum to 1.

    Trajectory counts use largest-remainder rounding so they always total
    `n_trajectories`; each trajectory is tagged with its generating policy.
    """
    if n_trajectories <= 0:
        raise ContractViolation("n_trajectories must be positive")
    props = np.array([p for _, p in mixture], dtype=np.float64)
    if abs(props.sum() - 1.0) > 1e-9:
        raise ContractViolation(f"mixture proportions sum to {props.sum()}, expected 1")
    raw = props * n_trajectories
    counts = np.floor(raw).astype(int)
    remainder = n_trajectories - counts.sum()
    order = np.argsort(-(raw - counts), kind="stable")
    for j in range(remainder):
        counts[order[j]] += 1

    ss = np.random.SeedSequence(seed)
    children = ss.spawn(n_trajectories)
    trajs: list[Trajectory] = []
    idx = 0
    for (spec, _), count in zip(mixture, counts):
        for _ in range(count):
            child_seed = int(children[idx].generate_state(1)[0])
            traj = rollout(mdp, spec, child_seed)
            traj.meta["source_index"] = idx
            trajs.append(traj)
            idx += 1
    return dataset_for(
        mdp,
        trajs,
        provenance={
            "kind": "generated",
            "seed": int(seed),
            "n": n_trajectories,
            "mixture": [[s.policy_id, float(p)] for s, p in mixture],
        },
    )


def normalize_return(mdp: MdpSpec, raw: float | np.ndarray):
    """Map raw returns so the random reference scores 0 and the expert 1."""
    return (raw - mdp.random_ref) / (mdp.expert_ref - mdp.random_ref)


def compute_reference_scores(
    mdp: MdpSpec,
    expert_spec: BehaviorPolicySpec,
    random_spec: BehaviorPolicySpec,
    n_rollouts: int = 100,
    seed: int = 77,
) -> MdpSpec:
    """Fill in random/expert reference scores from seeded reference rollouts."""
    ss = np.random.SeedSequence(seed)
    seeds = [int(c.generate_state(1)[0]) for c in ss.spawn(2 * n_rollouts)]
    expert = np.mean([rollout(mdp, expert_spec, s).total_return for s in seeds[:n_rollouts]])
    rand = np.mean([rollout(mdp, random_spec, s).total_return for s in seeds[n_rollouts:]])
    return replace(mdp, random_ref=float(rand), expert_ref=float(expert))
