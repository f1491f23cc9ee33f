"""Semi-supervised offline RL laboratory.

Train a stochastic multi-transition inverse dynamics model on
action-labelled trajectories, proxy-label action-free trajectories, and
train offline RL agents on the combined data; includes synthetic
environments with exact oracles, ablation protocols, and bootstrap
evaluation statistics.
"""

__version__ = "0.1.0"
