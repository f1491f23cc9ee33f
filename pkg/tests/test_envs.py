import numpy as np
import pytest

from ssorl.envs import (
    BehaviorPolicySpec,
    generate_dataset,
    make_alternating,
    make_pointmass,
    normalize_return,
    rollout,
    step,
)
from ssorl.envs.pointmass import EXPERT, RANDOM, TIERS
from ssorl.errors import ContractViolation


@pytest.fixture(scope="module")
def pm():
    return make_pointmass()


class TestStep:
    def test_zero_action_zero_velocity_keeps_position(self, pm):
        s = np.array([1.0, -0.5, 0.0, 0.0])
        nxt, r = step(pm, s, np.zeros(2))
        np.testing.assert_array_equal(nxt[:2], s[:2])
        d = np.linalg.norm(s[:2] - pm.extras["goal"])
        assert r == pytest.approx(np.exp(-d))

    def test_reward_one_at_goal(self, pm):
        s = np.array([*pm.extras["goal"], 0.0, 0.0])
        _, r = step(pm, s, np.zeros(2))
        assert r == pytest.approx(1.0)

    def test_hand_applied_dynamics(self):
        env = make_pointmass(v_max=1.0)
        s = np.zeros(4)
        nxt, _ = step(env, s, np.array([1.0, 0.0]))
        np.testing.assert_allclose(nxt, np.array([0.01, 0.0, 0.1, 0.0]))

    def test_velocity_clamp(self):
        env = make_pointmass(v_max=1.0)
        s = np.array([0.0, 0.0, 0.95, 0.0])
        nxt, _ = step(env, s, np.array([1.0, 0.0]))
        assert nxt[2] == pytest.approx(1.0)

    def test_non_finite_rejected(self, pm):
        with pytest.raises(ContractViolation):
            step(pm, np.array([np.nan, 0, 0, 0]), np.zeros(2))
        with pytest.raises(ContractViolation):
            step(pm, np.zeros(4), np.array([np.inf, 0]))

    def test_out_of_bounds_action_clamped(self, pm):
        s = np.zeros(4)
        nxt, _ = step(pm, s, np.array([5.0, 0.0]))
        assert nxt[2] == pytest.approx(1.0 * 0.1)  # clamped to 1 before dt


class TestRollout:
    def test_same_seed_bit_identical(self, pm):
        a = rollout(pm, EXPERT, seed=42)
        b = rollout(pm, EXPERT, seed=42)
        assert a.states.tobytes() == b.states.tobytes()
        assert a.actions.tobytes() == b.actions.tobytes()
        assert a.rewards.tobytes() == b.rewards.tobytes()

    def test_return_matches_reward_sum(self, pm):
        traj = rollout(pm, RANDOM, seed=7)
        assert traj.meta["return"] == pytest.approx(traj.rewards.sum())
        assert traj.length == pm.horizon
        assert traj.states.shape == (pm.horizon + 1, 4)

    def test_expert_beats_random(self, pm):
        expert = np.mean([rollout(pm, EXPERT, s).total_return for s in range(10)])
        rand = np.mean([rollout(pm, RANDOM, s).total_return for s in range(10)])
        assert expert > rand

    def test_reward_bounds(self, pm):
        traj = rollout(pm, RANDOM, seed=3)
        assert np.all(traj.rewards > 0.0)
        assert np.all(traj.rewards <= 1.0)


class TestGenerateDataset:
    def test_pure_random_normalizes_near_zero(self, pm):
        ds = generate_dataset(pm, [(RANDOM, 1.0)], 40, seed=0)
        mean_norm = normalize_return(pm, ds.returns().mean())
        assert abs(mean_norm) < 0.15

    def test_mixture_is_bimodal(self, pm):
        ds = generate_dataset(pm, [(TIERS["expert"], 0.5), (TIERS["random"], 0.5)], 40, seed=3)
        rets = ds.returns()
        ids = np.array([t.meta["policy_id"] for t in ds.trajectories])
        expert = rets[ids != "uniform"]
        rand = rets[ids == "uniform"]
        pooled = np.sqrt((expert.std() ** 2 + rand.std() ** 2) / 2)
        assert abs(expert.mean() - rand.mean()) > 3 * pooled

    def test_exact_count_and_reproducible(self, pm):
        a = generate_dataset(pm, [(RANDOM, 0.5), (EXPERT, 0.5)], 10, seed=5)
        b = generate_dataset(pm, [(RANDOM, 0.5), (EXPERT, 0.5)], 10, seed=5)
        assert len(a) == len(b) == 10
        for ta, tb in zip(a.trajectories, b.trajectories):
            assert ta.states.tobytes() == tb.states.tobytes()

    def test_zero_trajectories_rejected(self, pm):
        with pytest.raises(ContractViolation):
            generate_dataset(pm, [(RANDOM, 1.0)], 0, seed=0)

    def test_bad_proportions_rejected(self, pm):
        with pytest.raises(ContractViolation):
            generate_dataset(pm, [(RANDOM, 0.6), (EXPERT, 0.6)], 10, seed=0)

    def test_policy_tags_present(self, pm):
        ds = generate_dataset(pm, [(RANDOM, 0.3), (EXPERT, 0.7)], 10, seed=1)
        ids = {t.meta["policy_id"] for t in ds.trajectories}
        assert ids == {"uniform", "pd_g1_n0.05"}


class TestNormalization:
    def test_reference_scores_map_to_unit_interval(self, pm):
        assert normalize_return(pm, pm.random_ref) == pytest.approx(0.0)
        assert normalize_return(pm, pm.expert_ref) == pytest.approx(1.0)

    def test_alternating_env_has_refs(self):
        alt = make_alternating()
        assert np.isfinite(alt.random_ref) and np.isfinite(alt.expert_ref)
        assert alt.random_ref != alt.expert_ref


class TestAlternatingEnv:
    def test_parity_flips_and_drive_moves(self):
        alt = make_alternating()
        s = np.array([0.3, 0.0])
        nxt, _ = step(alt, s, np.array([1.0, 0.7]))
        assert nxt[0] == pytest.approx(0.3 + 0.1)
        assert nxt[1] == 1.0
        nxt2, _ = step(alt, nxt, np.array([0.0, -1.0]))
        assert nxt2[0] == pytest.approx(nxt[0])  # dead channel never moves x
        assert nxt2[1] == 0.0

    def test_style_policy_encodes_z(self):
        alt = make_alternating()
        spec = BehaviorPolicySpec(family="alternating", markovian=False)
        traj = rollout(alt, spec, seed=11)
        drives = traj.actions[::2, 0]  # drive steps t=1,3,... carry z
        deads = traj.actions[1::2, 1]  # dead steps t=2,4,... carry z
        z = drives[0]
        assert z in (-1.0, 1.0)
        assert np.all(drives == z)
        assert np.all(deads == z)
        assert np.all(traj.actions[::2, 1] == 0.0)
        assert np.all(traj.actions[1::2, 0] == 0.0)
