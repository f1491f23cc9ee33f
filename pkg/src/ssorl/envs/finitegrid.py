"""Small tabular MDPs with brute-force action posteriors.

These are the exact oracles for the conditional-independence structure of
inverse dynamics: with a Markovian behavior policy, the action posterior
given the whole state prefix collapses to the two-state posterior, and
future states beyond s_{t+1} are uninformative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ssorl.errors import ContractViolation


@dataclass(frozen=True)
class FiniteMdp:
    n_states: int
    n_actions: int
    P: np.ndarray  # (S, A, S) row-stochastic transition table
    p1: np.ndarray  # (S,) initial-state distribution
    horizon: int = 6

    def __post_init__(self):
        if not np.allclose(self.P.sum(axis=2), 1.0):
            raise ContractViolation("transition table rows must sum to 1")
        if not np.isclose(self.p1.sum(), 1.0):
            raise ContractViolation("initial distribution must sum to 1")


@dataclass(frozen=True)
class TabularPolicy:
    """Behavior policy as a table: Markovian B[s, a], or order-1
    B2[s_prev, s, a] with B1[s, a] covering the first step."""

    kind: str  # "markov" | "order1"
    B: np.ndarray | None = None
    B1: np.ndarray | None = None
    B2: np.ndarray | None = None

    def action_probs(self, states: list[int], i: int) -> np.ndarray:
        """Probabilities of a_i given s_1..s_i (i is 1-based)."""
        if self.kind == "markov":
            return self.B[states[i - 1]]
        if i == 1:
            return self.B1[states[0]]
        return self.B2[states[i - 2], states[i - 1]]


def make_grid_mdp(rows: int = 3, cols: int = 3, slip: float = 0.2, horizon: int = 6) -> FiniteMdp:
    """Grid world with 4 actions; the move succeeds w.p. 1-slip, otherwise
    the agent stays put. Bumping a wall also stays put."""
    S = rows * cols
    A = 4
    moves = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    P = np.zeros((S, A, S))
    for s in range(S):
        r, c = divmod(s, cols)
        for a, (dr, dc) in enumerate(moves):
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols:
                tgt = nr * cols + nc
            else:
                tgt = s
            P[s, a, tgt] += 1.0 - slip
            P[s, a, s] += slip
    p1 = np.full(S, 1.0 / S)
    return FiniteMdp(n_states=S, n_actions=A, P=P, p1=p1, horizon=horizon)


def make_invertible_chain(n_states: int = 5, n_actions: int = 3, horizon: int = 6) -> FiniteMdp:
    """Deterministic cyclic dynamics s' = (s + a + 1) mod S: distinct actions
    always lead to distinct next states, so (s, s') identifies the action."""
    P = np.zeros((n_states, n_actions, n_states))
    for s in range(n_states):
        for a in range(n_actions):
            P[s, a, (s + a + 1) % n_states] = 1.0
    p1 = np.full(n_states, 1.0 / n_states)
    return FiniteMdp(n_states=n_states, n_actions=n_actions, P=P, p1=p1, horizon=horizon)


def random_markov_policy(fm: FiniteMdp, seed: int, min_prob: float = 0.05) -> TabularPolicy:
    rng = np.random.default_rng(seed)
    B = rng.uniform(min_prob, 1.0, size=(fm.n_states, fm.n_actions))
    B /= B.sum(axis=1, keepdims=True)
    return TabularPolicy(kind="markov", B=B)


def random_order1_policy(fm: FiniteMdp, seed: int, min_prob: float = 0.05) -> TabularPolicy:
    rng = np.random.default_rng(seed)
    B1 = rng.uniform(min_prob, 1.0, size=(fm.n_states, fm.n_actions))
    B1 /= B1.sum(axis=1, keepdims=True)
    B2 = rng.uniform(min_prob, 1.0, size=(fm.n_states, fm.n_states, fm.n_actions))
    B2 /= B2.sum(axis=2, keepdims=True)
    return TabularPolicy(kind="order1", B1=B1, B2=B2)


def exact_action_posterior(
    fm: FiniteMdp, policy: TabularPolicy, states: list[int], t: int
) -> np.ndarray:
    """Exact p(a_t | s_1, ..., s_m) by brute-force enumeration over every
    latent action sequence (a_1, ..., a_{m-1}), where m = len(states).

    `states` must cover at least s_1..s_{t+1}; extra trailing states extend
    the conditioning set. Raises on sequences with zero probability.
    """
    states = [int(s) for s in states]
    m = len(states) - 1  # number of transitions
    if not 1 <= t <= m:
        raise ContractViolation(f"t={t} outside the {m} transitions of the sequence")
    # joint over all action tuples: p1[s1] * prod_i beta(a_i | s_<=i) * P[s_i, a_i, s_{i+1}]
    joint = np.array(fm.p1[states[0]])
    for i in range(1, m + 1):
        factor = policy.action_probs(states, i) * fm.P[states[i - 1], :, states[i]]
        joint = joint[..., None] * factor  # appends the a_i axis
    total = joint.sum()
    if total <= 0.0:
        raise ContractViolation("state sequence has zero probability under the MDP")
    axes = tuple(i for i in range(m) if i != t - 1)
    marginal = joint.sum(axis=axes) if axes else joint
    return marginal / total


def markov_two_state_posterior(fm: FiniteMdp, policy: TabularPolicy, s_t: int, s_next: int) -> np.ndarray:
    """p(a_t | s_t, s_{t+1}) for a Markovian behavior policy."""
    if policy.kind != "markov":
        raise ContractViolation("two-state posterior requires a Markovian policy")
    w = policy.B[s_t] * fm.P[s_t, :, s_next]
    total = w.sum()
    if total <= 0.0:
        raise ContractViolation("transition has zero probability")
    return w / total


def enumerate_reachable_sequences(
    fm: FiniteMdp, policy: TabularPolicy, max_len: int
) -> list[tuple[int, ...]]:
    """All state sequences of length 2..max_len with positive probability."""
    out: list[tuple[int, ...]] = []

    def extend(seq: list[int]):
        if len(seq) >= 2:
            out.append(tuple(seq))
        if len(seq) >= max_len:
            return
        i = len(seq)  # next transition index (1-based)
        probs = policy.action_probs(seq, i)
        reach = probs @ fm.P[seq[-1]]  # (S,) marginal next-state probabilities
        for s_next in np.nonzero(reach > 0.0)[0]:
            extend(seq + [int(s_next)])

    for s1 in np.nonzero(fm.p1 > 0.0)[0]:
        extend([int(s1)])
    return out
