"""Unit tests for the soft actor-critic engine."""

import numpy as np
import pytest

from slrl_lab.algos.sac import (
    SacAgent,
    SacConfig,
    _sample_policy,
    act,
    behavior_cloning_step,
    bootstrap_cut,
    critic_regression,
    episode_outcomes,
    policy_gradient,
    pretrain_episodic,
    sac_update,
    td_target,
)
from slrl_lab.core.nn import flat_view
from slrl_lab.core.rng import Rng
from slrl_lab.envs import EnvSpec
from slrl_lab.envs.demos import scripted_demos
from slrl_lab.exceptions import ConfigError, ContractViolationError
from slrl_lab.replay.buffer import Batch, Transition

EPS = 1e-5


def small_agent(seed: int = 0, obs_dim: int = 3, action_dim: int = 2, **overrides) -> SacAgent:
    config = SacConfig(hidden_dims=(8, 8), batch_size=4, **overrides)
    return SacAgent.create(obs_dim, action_dim, config, Rng(seed))


def make_batch(n: int, obs_dim: int = 3, action_dim: int = 2, timesteps=None, terminals=None, rewards=None, seed=0):
    rng = Rng(seed, "batch")
    return Batch(
        obs=rng.gaussian(n, obs_dim),
        actions=np.tanh(rng.gaussian(n, action_dim)),
        rewards=np.zeros(n) if rewards is None else np.asarray(rewards, dtype=np.float64),
        next_obs=rng.gaussian(n, obs_dim),
        timesteps=np.arange(1, n + 1) if timesteps is None else np.asarray(timesteps),
        terminals=np.zeros(n, dtype=bool) if terminals is None else np.asarray(terminals, dtype=bool),
        is_prior=np.zeros(n, dtype=bool),
    )


def set_constant_output(mlp, value: float) -> None:
    """Zero every weight and set the final bias so the network outputs ``value``."""
    for name in mlp.params:
        mlp.params[name][...] = 0.0
    last = len(mlp.spec.layer_dims) - 1
    mlp.params[f"l{last}/b"][...] = value


class TestSacConfig:
    """Test SAC config validation."""

    def test_defaults(self):
        config = SacConfig()
        assert (config.lr, config.batch_size, config.gamma, config.bias_period) == (3e-4, 256, 0.99, 100)
        assert config.hidden_dims == (256, 256)

    def test_bias_period_must_be_positive(self):
        with pytest.raises(ConfigError):
            SacConfig(bias_period=0)

    def test_tau_range(self):
        with pytest.raises(ConfigError):
            SacConfig(tau=0.0)


class TestAct:
    """Test action selection."""

    def test_zero_policy_deterministic_action_is_zero(self):
        agent = small_agent()
        set_constant_output(agent.policy, 0.0)
        action = act(agent, np.ones(3), True, Rng(0))
        np.testing.assert_array_equal(action, np.zeros(2))

    def test_stochastic_actions_reproducible(self):
        agent = small_agent()
        a = [act(agent, np.ones(3), False, Rng(4)) for _ in range(2)]
        np.testing.assert_array_equal(a[0], a[1])

    def test_samples_strictly_inside_unit_box(self):
        agent = small_agent()
        agent.policy.params["l2/b"][0, :2] = 5.0  # push means into tanh saturation
        rng = Rng(1)
        for _ in range(10_000):
            action = act(agent, rng.gaussian(1, 3)[0], False, rng)
            assert np.all(np.abs(action) < 1.0)

    def test_actions_scaled_to_env_units(self):
        agent = SacAgent.for_env("tabletop", SacConfig(hidden_dims=(8,)), Rng(0))
        rng = Rng(2)
        for _ in range(200):
            action = act(agent, np.zeros(7), False, rng)
            assert np.all(np.abs(action[:2]) < 0.2)
            assert abs(action[2]) < 1.0


class TestTdTarget:
    """Test Bellman targets and the bootstrap cut."""

    def test_bias_period_step_is_bare_reward(self):
        agent = small_agent()
        batch = make_batch(1, timesteps=[100], rewards=[0.7])
        assert td_target(agent, batch, SacConfig(), Rng(0))[0] == 0.7

    def test_bootstrapped_step(self):
        agent = small_agent()
        set_constant_output(agent.target1, 1.0)
        set_constant_output(agent.target2, 1.0)
        batch = make_batch(1, timesteps=[101], rewards=[0.0])
        target = td_target(agent, batch, SacConfig(), Rng(0), alpha=0.0)
        assert target[0] == pytest.approx(0.99, abs=1e-12)

    def test_terminal_is_bare_reward(self):
        agent = small_agent()
        batch = make_batch(1, timesteps=[57], terminals=[True], rewards=[1.0])
        assert td_target(agent, batch, SacConfig(), Rng(0))[0] == 1.0

    def test_unbiased_config_bootstraps_every_hundredth_step(self):
        batch = make_batch(1, timesteps=[200])
        assert not bootstrap_cut(batch, SacConfig(biased_td=False))[0]

    @pytest.mark.parametrize("n", [99, 100, 1000, 12_345])
    def test_cut_density(self, n):
        batch = make_batch(n)
        assert int(bootstrap_cut(batch, SacConfig()).sum()) == n // 100

    def test_empty_batch_raises(self):
        with pytest.raises(ContractViolationError):
            td_target(small_agent(), make_batch(0), SacConfig(), Rng(0))

    def test_twin_critic_symmetry(self):
        agent = small_agent(3)
        swapped = agent.copy()
        swapped.target1, swapped.target2 = swapped.target2, swapped.target1
        batch = make_batch(16, timesteps=np.arange(150, 166))
        a = td_target(agent, batch, SacConfig(), Rng(9))
        b = td_target(swapped, batch, SacConfig(), Rng(9))
        np.testing.assert_array_equal(a, b)


class TestGradients:
    """Finite-difference checks of the critic and policy gradients."""

    def test_critic_regression_gradient(self):
        agent = small_agent(5)
        rng = Rng(5, "fd")
        x = rng.gaussian(4, 5)
        targets = rng.gaussian(4, 1)[:, 0]
        critic = agent.critic1
        critic_regression(critic, x, targets)
        for name, idx in flat_view(critic.params):
            value = critic.params[name]
            orig = value[idx]
            value[idx] = orig + EPS
            plus = float(np.mean((critic.forward(x)[:, 0] - targets) ** 2))
            value[idx] = orig - EPS
            minus = float(np.mean((critic.forward(x)[:, 0] - targets) ** 2))
            value[idx] = orig
            np.testing.assert_allclose(critic.params.grad(name)[idx], (plus - minus) / (2 * EPS), rtol=1e-4, atol=1e-7)

    @pytest.mark.parametrize("bc_weight", [0.0, 0.5])
    def test_policy_gradient(self, bc_weight):
        agent = small_agent(7)
        agent.log_alpha["log_alpha"][0, 0] = np.log(0.2)
        rng = Rng(7, "fd")
        obs_n = rng.gaussian(4, 3)
        actions_n = np.tanh(rng.gaussian(4, 2))
        is_prior = np.array([True, False, True, False])
        noise = rng.gaussian(4, 2)

        def loss() -> float:
            s = _sample_policy(agent, obs_n, noise)
            x = np.concatenate([obs_n, s.action], axis=1)
            q = np.minimum(agent.critic1.forward(x), agent.critic2.forward(x))[:, 0]
            total = float(np.mean(agent.alpha * s.logp - q))
            diff = (np.tanh(s.mean) - actions_n) * is_prior[:, None]
            return total + bc_weight * float(np.sum(diff**2)) / (is_prior.sum() * 2)

        policy_gradient(agent, obs_n, actions_n, is_prior, noise, bc_weight)
        params = agent.policy.params
        for name, idx in flat_view(params):
            orig = params[name][idx]
            params[name][idx] = orig + EPS
            plus = loss()
            params[name][idx] = orig - EPS
            minus = loss()
            params[name][idx] = orig
            np.testing.assert_allclose(params.grad(name)[idx], (plus - minus) / (2 * EPS), rtol=1e-4, atol=1e-7)
        assert all(not np.any(agent.critic1.params.grad(n)) for n in agent.critic1.params)


class TestSacUpdate:
    """Test one full SAC update."""

    def test_batch_size_must_match(self):
        agent = small_agent()
        with pytest.raises(ContractViolationError):
            sac_update(agent, SacConfig(hidden_dims=(8, 8), batch_size=4), make_batch(5), Rng(0))

    def test_critic_loss_decreases_on_one_point(self):
        agent = small_agent(2)
        x = np.array([[0.5, -0.2, 0.1, 0.3, -0.4]])
        targets = np.array([1.0])
        losses = []
        for _ in range(100):
            losses.append(critic_regression(agent.critic1, x, targets))
            agent.critic1.step(1e-3)
        assert losses[-1] < losses[0]
        assert losses[-1] < 0.5 * losses[0]

    def test_bc_weight_zero_ignores_prior_flags(self):
        config = SacConfig(hidden_dims=(8, 8), batch_size=4)
        a, b = small_agent(1), small_agent(1)
        batch = make_batch(4, timesteps=[150, 151, 152, 153])
        prior_batch = Batch(**{**batch.__dict__, "is_prior": np.ones(4, dtype=bool)})
        sac_update(a, config, batch, Rng(3))
        sac_update(b, config, prior_batch, Rng(3))
        for mlp_a, mlp_b in ((a.policy, b.policy), (a.critic1, b.critic1), (a.target2, b.target2)):
            assert mlp_a.params.values_equal(mlp_b.params)

    def test_high_entropy_lowers_temperature(self):
        agent = small_agent(4)
        config = SacConfig(hidden_dims=(8, 8), batch_size=4)
        losses = sac_update(agent, config, make_batch(4, timesteps=[150, 151, 152, 153]), Rng(0))
        assert losses.entropy > agent.target_entropy
        assert agent.log_alpha["log_alpha"][0, 0] < 0.0
        assert agent.alpha > 0.0

    def test_targets_move_only_by_polyak(self):
        agent = small_agent(6)
        config = SacConfig(hidden_dims=(8, 8), batch_size=4, tau=0.005)
        before = agent.target1.params.copy()
        sac_update(agent, config, make_batch(4, timesteps=[150, 151, 152, 153]), Rng(0))
        for name in before:
            expected = 0.995 * before[name] + 0.005 * agent.critic1.params[name]
            np.testing.assert_allclose(agent.target1.params[name], expected, rtol=1e-12, atol=1e-15)

    def test_behavior_cloning_reduces_loss(self):
        agent = small_agent(8)
        config = SacConfig(hidden_dims=(8, 8), batch_size=4, lr=1e-2)
        batch = make_batch(4)
        first = behavior_cloning_step(agent, config, batch)
        for _ in range(50):
            last = behavior_cloning_step(agent, config, batch)
        assert last < first


class TestPretraining:
    """Test episodic source pretraining and agent checkpoints."""

    def test_zero_steps(self, tiny_sac_config):
        agent, stream = pretrain_episodic(EnvSpec("pointmass", "source"), 0, 200, tiny_sac_config, Rng(0))
        assert stream == []
        assert agent.policy.params.step_count == 0

    def test_stream_length_and_timesteps(self, tiny_sac_config):
        agent, stream = pretrain_episodic(EnvSpec("pointmass", "source"), 30, 12, tiny_sac_config, Rng(0))
        assert len(stream) == 30
        assert [t.timestep for t in stream] == list(range(1, 31))
        assert agent.policy.params.step_count == 30 - tiny_sac_config.warmup_steps

    def test_target_variant_rejected(self, tiny_sac_config):
        with pytest.raises(ContractViolationError):
            pretrain_episodic(EnvSpec("pointmass", "target"), 10, 5, tiny_sac_config, Rng(0))

    def test_checkpoint_round_trip(self, tmp_path, tiny_sac_config):
        agent = SacAgent.for_env("pointmass", tiny_sac_config, Rng(3))
        agent.log_alpha["log_alpha"][0, 0] = -0.75
        path = agent.save(tmp_path / "agent.json")
        loaded = SacAgent.load(path, "pointmass", tiny_sac_config)
        for a, b in zip(agent.stores().values(), loaded.stores().values()):
            assert a.values_equal(b)

    def test_checkpoint_for_other_env_rejected(self, tmp_path, tiny_sac_config):
        path = SacAgent.for_env("pointmass", tiny_sac_config, Rng(3)).save(tmp_path / "agent.json")
        with pytest.raises(ConfigError):
            SacAgent.load(path, "tabletop", tiny_sac_config)

    def test_relabeling_and_demos_keep_stream_env_only(self, tiny_sac_config):
        spec = EnvSpec("pointmass", "source")
        demos = [t for episode in scripted_demos(spec, 1, Rng(4)) for t in episode]
        agent, stream = pretrain_episodic(spec, 30, 12, tiny_sac_config, Rng(0), her_k=4, demos=demos)
        assert len(stream) == 30
        assert [t.timestep for t in stream] == list(range(1, 31))
        assert agent.policy.params.step_count == 30 - tiny_sac_config.warmup_steps

    def test_relabeling_does_not_change_env_rollout_during_warmup(self, tiny_sac_config):
        spec = EnvSpec("pointmass", "source")
        _, plain = pretrain_episodic(spec, 10, 5, tiny_sac_config, Rng(2))
        _, relabeled = pretrain_episodic(spec, 10, 5, tiny_sac_config, Rng(2), her_k=4)
        assert all(np.array_equal(a.next_obs, b.next_obs) for a, b in zip(plain, relabeled))

    @pytest.mark.parametrize("kwargs", [{"her_k": -1}, {"demo_fraction": 0.0}, {"demo_fraction": 1.0}])
    def test_invalid_pretraining_options(self, tiny_sac_config, kwargs):
        with pytest.raises(ConfigError):
            pretrain_episodic(EnvSpec("pointmass", "source"), 10, 5, tiny_sac_config, Rng(0), **kwargs)

    def test_episode_outcomes_split_on_terminal_and_length(self):
        def step(t, terminal=False):
            return Transition(np.zeros(6), np.zeros(2), float(terminal), np.zeros(6), t, terminal)

        stream = [step(1), step(2, True), step(3), step(4), step(5), step(6)]
        assert episode_outcomes(stream, 3) == [True, False]
