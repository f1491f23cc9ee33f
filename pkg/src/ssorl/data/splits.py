"""Labelled/unlabelled dataset construction protocols.

The coupled protocol labels a uniform sample from the bottom-q% of returns
and strips actions from everything else; the decoupled protocol samples
labelled and unlabelled pools independently from return terciles. Both are
deterministic given their seed, and stripping never touches states or
rewards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ssorl.envs.core import Dataset, Trajectory
from ssorl.errors import ContractViolation

TERCILE_NAMES = ("low", "med", "high")


@dataclass
class SplitDataset:
    labelled: Dataset
    unlabelled: Dataset
    provenance: dict

    def validate(self):
        for traj in self.labelled.trajectories:
            if not traj.has_actions:
                raise ContractViolation("labelled trajectory without actions")
        for traj in self.unlabelled.trajectories:
            if traj.has_actions:
                raise ContractViolation("unlabelled trajectory with actions")
        li = {t.meta["source_index"] for t in self.labelled.trajectories}
        ui = {t.meta["source_index"] for t in self.unlabelled.trajectories}
        if li & ui:
            raise ContractViolation("labelled and unlabelled index sets overlap")


def _strip_actions(traj: Trajectory) -> Trajectory:
    return Trajectory(states=traj.states, actions=None, rewards=traj.rewards, meta=dict(traj.meta))


def _sorted_indices(returns: np.ndarray) -> np.ndarray:
    # ties broken by trajectory index for determinism
    return np.lexsort((np.arange(len(returns)), returns))


def nearest_rank_threshold(returns: np.ndarray, q: float) -> float:
    """Nearest-rank q-th percentile of the returns."""
    order = _sorted_indices(returns)
    rank = int(np.ceil(q / 100.0 * len(returns)))
    rank = max(1, min(rank, len(returns)))
    return float(returns[order[rank - 1]])


def coupled_split(dataset: Dataset, q: float, label_frac: float, seed: int) -> SplitDataset:
    """Label a uniform sample of round(label_frac * N) trajectories whose
    returns lie in the bottom q%; strip actions from the rest."""
    if not 0.0 < q <= 100.0:
        raise ContractViolation(f"q must be in (0, 100], got {q}")
    if not 0.0 < label_frac < 1.0:
        raise ContractViolation(f"label_frac must be in (0, 1), got {label_frac}")
    n = len(dataset)
    returns = dataset.returns()
    threshold = nearest_rank_threshold(returns, q)
    pool = np.nonzero(returns <= threshold)[0]
    n_label = int(round(label_frac * n))
    if len(pool) < n_label:
        raise ContractViolation(
            f"bottom-{q}% pool holds {len(pool)} trajectories, need {n_label}"
        )
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(pool, size=n_label, replace=False))
    chosen_set = set(chosen.tolist())

    labelled, unlabelled = [], []
    for i, t in enumerate(dataset.trajectories):
        rec = Trajectory(states=t.states, actions=t.actions, rewards=t.rewards, meta=dict(t.meta))
        rec.meta["source_index"] = i
        if i in chosen_set:
            labelled.append(rec)
        else:
            unlabelled.append(_strip_actions(rec))
    provenance = {
        "protocol": "coupled",
        "q": float(q),
        "label_frac": float(label_frac),
        "seed": int(seed),
        "n_labelled": len(labelled),
        "n_unlabelled": len(unlabelled),
    }
    split = SplitDataset(
        labelled=dataset.with_trajectories(labelled, provenance),
        unlabelled=dataset.with_trajectories(unlabelled, provenance),
        provenance=provenance,
    )
    split.validate()
    return split


def tercile_groups(dataset: Dataset) -> dict[str, np.ndarray]:
    """Return-sorted thirds of the trajectory indices (low / med / high);
    any remainder goes to the lower groups."""
    order = _sorted_indices(dataset.returns())
    parts = np.array_split(order, 3)
    return dict(zip(TERCILE_NAMES, parts))


def decoupled_split(
    dataset: Dataset,
    labelled_group: str,
    n_labelled: int,
    unlabelled_group: str,
    n_unlabelled: int,
    seed: int,
) -> SplitDataset:
    """Sample the labelled pool from one return tercile and the unlabelled
    pool (actions stripped) independently from another."""
    groups = tercile_groups(dataset)
    for g in (labelled_group, unlabelled_group):
        if g not in groups:
            raise ContractViolation(f"group must be one of {TERCILE_NAMES}, got {g!r}")
    rng = np.random.default_rng(seed)
    lab_pool = groups[labelled_group]
    if n_labelled > len(lab_pool):
        raise ContractViolation(
            f"labelled group {labelled_group!r} holds {len(lab_pool)}, need {n_labelled}"
        )
    lab_idx = rng.choice(lab_pool, size=n_labelled, replace=False)
    unl_pool = groups[unlabelled_group]
    unl_pool = unl_pool[~np.isin(unl_pool, lab_idx)]
    if n_unlabelled > len(unl_pool):
        raise ContractViolation(
            f"unlabelled group {unlabelled_group!r} holds {len(unl_pool)} after "
            f"removing labelled picks, need {n_unlabelled}"
        )
    unl_idx = rng.choice(unl_pool, size=n_unlabelled, replace=False)

    def take(indices, strip):
        out = []
        for i in np.sort(indices):
            t = dataset.trajectories[int(i)]
            rec = Trajectory(states=t.states, actions=t.actions, rewards=t.rewards, meta=dict(t.meta))
            rec.meta["source_index"] = int(i)
            out.append(_strip_actions(rec) if strip else rec)
        return out

    provenance = {
        "protocol": "decoupled",
        "labelled_group": labelled_group,
        "unlabelled_group": unlabelled_group,
        "n_labelled": int(n_labelled),
        "n_unlabelled": int(n_unlabelled),
        "seed": int(seed),
    }
    split = SplitDataset(
        labelled=dataset.with_trajectories(take(lab_idx, strip=False), provenance),
        unlabelled=dataset.with_trajectories(take(unl_idx, strip=True), provenance),
        provenance=provenance,
    )
    split.validate()
    return split


def resample_balanced(dataset: Dataset, n_out: int, seed: int, n_bins: int = 40) -> Dataset:
    """Flatten the return histogram: sample a non-empty return bin with
    weight proportional to 1/count, then a uniform trajectory within it."""
    if len(dataset) == 0:
        raise ContractViolation("cannot resample an empty dataset")
    returns = dataset.returns()
    r_min, r_max = float(returns.min()), float(returns.max())
    if r_min == r_max:
        bin_of = np.zeros(len(returns), dtype=int)
    else:
        edges = np.linspace(r_min, r_max, n_bins + 1)
        bin_of = np.clip(np.searchsorted(edges, returns, side="right") - 1, 0, n_bins - 1)
    rng = np.random.default_rng(seed)
    occupied, counts = np.unique(bin_of, return_counts=True)
    weights = (1.0 / counts) / (1.0 / counts).sum()
    members = {b: np.nonzero(bin_of == b)[0] for b in occupied}
    out = []
    for _ in range(n_out):
        b = occupied[rng.choice(len(occupied), p=weights)]
        i = int(rng.choice(members[b]))
        t = dataset.trajectories[i]
        rec = Trajectory(states=t.states, actions=t.actions, rewards=t.rewards, meta=dict(t.meta))
        rec.meta["source_index"] = i
        out.append(rec)
    provenance = {"protocol": "return_balanced", "n_bins": n_bins, "n_out": n_out, "seed": seed}
    return dataset.with_trajectories(out, provenance)


def merge_with_proxy(labelled: Dataset, proxy_labelled: Dataset, seed: int) -> Dataset:
    """Union of the labelled and proxy-labelled trajectories, shuffled under
    the run seed. Both inputs must carry actions everywhere."""
    for name, ds in (("labelled", labelled), ("proxy", proxy_labelled)):
        for traj in ds.trajectories:
            if not traj.has_actions:
                raise ContractViolation(f"{name} input contains an action-free trajectory")
    combined = list(labelled.trajectories) + list(proxy_labelled.trajectories)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(combined))
    provenance = {
        "protocol": "merged",
        "n_labelled": len(labelled),
        "n_proxy": len(proxy_labelled),
        "seed": int(seed),
    }
    return labelled.with_trajectories([combined[i] for i in order], provenance)
