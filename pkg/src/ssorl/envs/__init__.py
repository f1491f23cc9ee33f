from ssorl.envs.alternating import alternating_style_oracle, dead_step_mask, make_alternating
from ssorl.envs.core import (
    BehaviorPolicySpec,
    Dataset,
    MdpSpec,
    Trajectory,
    compute_reference_scores,
    dataset_for,
    generate_dataset,
    make_policy,
    normalize_return,
    rollout,
    step,
)
from ssorl.envs.finitegrid import (
    FiniteMdp,
    TabularPolicy,
    enumerate_reachable_sequences,
    exact_action_posterior,
    make_grid_mdp,
    make_invertible_chain,
    markov_two_state_posterior,
    random_markov_policy,
    random_order1_policy,
)
from ssorl.envs.pointmass import inverse_action, make_pointmass
from ssorl.envs.trajio import export_jsonl, import_jsonl, load_dataset, save_dataset

__all__ = [
    "MdpSpec",
    "BehaviorPolicySpec",
    "Trajectory",
    "Dataset",
    "dataset_for",
    "step",
    "rollout",
    "generate_dataset",
    "normalize_return",
    "compute_reference_scores",
    "make_policy",
    "make_pointmass",
    "inverse_action",
    "make_alternating",
    "alternating_style_oracle",
    "dead_step_mask",
    "FiniteMdp",
    "TabularPolicy",
    "make_grid_mdp",
    "make_invertible_chain",
    "random_markov_policy",
    "random_order1_policy",
    "exact_action_posterior",
    "markov_two_state_posterior",
    "enumerate_reachable_sequences",
    "save_dataset",
    "load_dataset",
    "export_jsonl",
    "import_jsonl",
]
