"""Unit tests for discriminator shaping, QWALE weighting and RND."""

from unittest.mock import MagicMock

import numpy as np
import pytest

from slrl_lab.algos.rnd import RndState, rnd_bonus, rnd_update
from slrl_lab.algos.sac import SacAgent, SacConfig
from slrl_lab.algos.shaping import (
    DiscriminatorSpec,
    FrozenCritic,
    ShapingConfig,
    ShapingState,
    disc_loss,
    mixup_augment,
    q_normalize,
    qwale_weight,
    shaped_reward,
    shaping_bonus,
)
from slrl_lab.core.nn import LOGIT_CLAMP, Mlp, MlpSpec, build_mlp
from slrl_lab.core.rng import Rng
from slrl_lab.exceptions import ConfigError, ContractViolationError, DegenerateQError
from slrl_lab.replay.buffer import ReplayBuffer, Transition


def prior_buffer(n: int = 64, seed: int = 0) -> ReplayBuffer:
    rng = Rng(seed, "prior")
    items = [
        Transition(rng.uniform(-50, 50, size=6), rng.uniform(-1, 1, size=2), 0.0, rng.uniform(-50, 50, size=6), t, False)
        for t in range(1, n + 1)
    ]
    return ReplayBuffer.from_transitions(items, 6, 2, origin="prior")


def flat_grads(params):
    return np.concatenate([params.grad(n).ravel() for n in params])


class TestQNormalization:
    """Test Q normalization and the QWALE weight."""

    def test_affine_map(self):
        np.testing.assert_allclose(q_normalize(np.array([2.0, 4.0, 6.0]), 2.0, 6.0), [0.0, 0.5, 1.0])

    def test_endpoint_and_clamp(self):
        assert q_normalize(2.0, 2.0, 6.0) == 0.0
        assert q_normalize(11.0, 2.0, 6.0) == 1.0
        assert q_normalize(-100.0, 2.0, 6.0) == 0.0

    def test_degenerate_range_raises(self):
        with pytest.raises(DegenerateQError):
            q_normalize(1.0, 3.0, 3.0)

    def test_weights(self):
        assert qwale_weight(0.3, 0.3) == 1.0
        assert qwale_weight(1.0, 0.0) == pytest.approx(np.e)
        assert qwale_weight(0.0, 1.0) == pytest.approx(np.exp(-1.0))

    def test_weight_increasing_in_q(self):
        q = np.linspace(0.0, 1.0, 50)
        w = qwale_weight(q, 0.4)
        assert np.all(np.diff(w) > 0)
        assert w.min() >= np.exp(-1.0) and w.max() <= np.e


class TestShapedReward:
    """Test the -log(1 - D) reward transform."""

    def test_half(self):
        assert shaped_reward(0.0, 0.5) == pytest.approx(0.6931, abs=1e-4)

    def test_small_d_gives_small_bonus(self):
        assert shaped_reward(0.0, 1e-12) == pytest.approx(0.0, abs=1e-9)

    def test_monotone_in_d(self):
        d = np.linspace(0.01, 0.99, 30)
        assert np.all(np.diff(shaping_bonus(d)) > 0)

    def test_monotone_on_random_pairs(self):
        draws = np.random.default_rng(3)
        d_max = 1.0 / (1.0 + np.exp(-LOGIT_CLAMP))
        a = draws.uniform(1.0 - d_max, d_max, size=10_000)
        b = draws.uniform(1.0 - d_max, d_max, size=10_000)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        strict = lo < hi
        assert np.all(shaping_bonus(lo[strict]) <= shaping_bonus(hi[strict]))
        assert np.all(np.isfinite(shaping_bonus(hi)))

    @pytest.mark.parametrize("d", [0.0, 1.0, -0.1, 1.5])
    def test_outside_open_interval_rejected(self, d):
        with pytest.raises(ContractViolationError):
            shaped_reward(0.0, d)

    def test_bonus_finite_under_clamp(self):
        d_max = 1.0 / (1.0 + np.exp(-LOGIT_CLAMP))
        assert np.isfinite(shaping_bonus(d_max))
        assert shaping_bonus(d_max) == pytest.approx(-np.log(1.0 - d_max))


class TestDiscriminatorLoss:
    """Test the weighted cross-entropy."""

    def spec(self, mode="gail_s", input_dim=3):
        return DiscriminatorSpec(mode, input_dim)

    def half_disc(self, spec):
        params = build_mlp(spec.mlp_spec, Rng(0))
        for name in params:
            params[name][...] = 0.0
        return params

    def test_half_everywhere(self):
        spec = self.spec()
        params = self.half_disc(spec)
        rng = Rng(1)
        loss = disc_loss(spec, params, rng.gaussian(5, 3), rng.gaussian(7, 3), np.ones(5))
        assert loss == pytest.approx(2 * np.log(2.0), abs=1e-12)

    def test_zero_weights_leave_online_term(self):
        spec = self.spec()
        params = self.half_disc(spec)
        rng = Rng(1)
        loss = disc_loss(spec, params, rng.gaussian(5, 3), rng.gaussian(7, 3), np.zeros(5))
        assert loss == pytest.approx(np.log(2.0), abs=1e-12)

    def test_empty_batch_rejected(self):
        spec = self.spec()
        with pytest.raises(ContractViolationError):
            disc_loss(spec, build_mlp(spec.mlp_spec, Rng(0)), np.zeros((0, 3)), np.ones((2, 3)), np.ones(0))

    def test_constant_q_weights_only_scale_the_positive_term(self):
        spec = self.spec()
        rng = Rng(2)
        prior_x, online_x = rng.gaussian(8, 3), rng.gaussian(8, 3)

        def grads(prior_w, online_x):
            params = build_mlp(spec.mlp_spec, Rng(3))
            if len(online_x):
                disc_loss(spec, params, prior_x, online_x, prior_w)
            return flat_grads(params)

        w0 = qwale_weight(0.7, 0.2)
        full_gail = grads(np.ones(8), online_x)
        full_qwale = grads(np.full(8, w0), online_x)
        # isolate the positive and negative terms by differencing weights
        positive = grads(np.ones(8), online_x) - grads(np.zeros(8), online_x)
        negative = grads(np.zeros(8), online_x)
        np.testing.assert_allclose(full_gail, positive + negative, atol=1e-12)
        np.testing.assert_allclose(full_qwale, w0 * positive + negative, atol=1e-12)

    def test_constant_q_positive_gradient_cosine_is_one(self):
        spec = self.spec()
        rng = Rng(4)
        prior_x, online_x = rng.gaussian(8, 3), rng.gaussian(8, 3)
        positive = []
        for w in (1.0, 1.8):
            with_pos = build_mlp(spec.mlp_spec, Rng(5))
            without = build_mlp(spec.mlp_spec, Rng(5))
            disc_loss(spec, with_pos, prior_x, online_x, np.full(8, w))
            disc_loss(spec, without, prior_x, online_x, np.zeros(8))
            positive.append(flat_grads(with_pos) - flat_grads(without))
        a, b = positive
        cosine = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
        assert cosine == pytest.approx(1.0, abs=1e-10)

    def test_spec_input_dims(self):
        config = ShapingConfig()
        assert DiscriminatorSpec.for_mode("gail_s", 6, 2, config).input_dim == 6
        assert DiscriminatorSpec.for_mode("qwale", 6, 2, config).input_dim == 6
        assert DiscriminatorSpec.for_mode("gail_sa", 6, 2, config).input_dim == 8
        with pytest.raises(ConfigError):
            DiscriminatorSpec.for_mode("rnd", 6, 2, config)


class TestMixup:
    """Test mixup augmentation."""

    def rng_with(self, lam, partner):
        rng = MagicMock()
        rng.beta.return_value = np.asarray(lam, dtype=np.float64)
        rng.permutation.return_value = np.asarray(partner)
        return rng

    def test_lambda_one_keeps_first(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        out_x, out_y, out_w = mixup_augment(x, np.array([1.0, 0.0]), np.array([2.0, 1.0]), 1.0, self.rng_with([1.0, 1.0], [1, 0]))
        np.testing.assert_array_equal(out_x, x)
        np.testing.assert_array_equal(out_y, [1.0, 0.0])
        np.testing.assert_array_equal(out_w, [2.0, 1.0])

    def test_half_mixes_labels_and_weights(self):
        x = np.array([[0.0, 0.0], [2.0, 4.0]])
        out_x, out_y, out_w = mixup_augment(x, np.array([1.0, 0.0]), np.array([3.0, 1.0]), 1.0, self.rng_with([0.5, 0.5], [1, 0]))
        np.testing.assert_allclose(out_x[0], [1.0, 2.0])
        np.testing.assert_allclose(out_y, [0.5, 0.5])
        np.testing.assert_allclose(out_w, [2.0, 2.0])

    def test_mixed_inputs_inside_pair_interval(self):
        rng = Rng(6)
        x = rng.gaussian(64, 4)
        labels = np.r_[np.ones(32), np.zeros(32)]
        out_x, out_y, _ = mixup_augment(x, labels, np.ones(64), 1.0, Rng(7))
        partner = Rng(7).permutation(64)
        lo = np.minimum(x, x[partner])
        hi = np.maximum(x, x[partner])
        assert np.all(out_x >= lo - 1e-12) and np.all(out_x <= hi + 1e-12)
        assert np.all((out_y >= 0.0) & (out_y <= 1.0))

    def test_alpha_must_be_positive(self):
        with pytest.raises(ContractViolationError):
            mixup_augment(np.zeros((2, 1)), np.zeros(2), np.ones(2), 0.0, Rng(0))


class TestShapingState:
    """Test the discriminator training loop state."""

    def source_agent(self):
        return SacAgent.for_env("pointmass", SacConfig(hidden_dims=(16, 16)), Rng(0))

    def test_qwale_precomputes_prior_q_range(self):
        prior = prior_buffer()
        frozen = FrozenCritic.from_agent(self.source_agent())
        state = ShapingState("qwale", np.ones(6), np.ones(2), ShapingConfig(), Rng(1), frozen, prior)
        q = frozen.q(prior.obs[:len(prior)], prior.actions[:len(prior)])
        assert (state.q_min, state.q_max) == (q.min(), q.max())
        assert state.weighted

    def test_baseline_tracks_most_recent_pair(self):
        prior = prior_buffer()
        frozen = FrozenCritic.from_agent(self.source_agent())
        state = ShapingState("qwale", np.ones(6), np.ones(2), ShapingConfig(), Rng(1), frozen, prior)
        obs, action = prior.obs[3], prior.actions[3]
        b = state.update_baseline(obs, action)
        assert b == pytest.approx(float(state.normalized_q(obs, action)[0]))
        assert 0.0 <= b <= 1.0

    def test_constant_baseline(self):
        prior = prior_buffer()
        frozen = FrozenCritic.from_agent(self.source_agent())
        config = ShapingConfig(baseline="constant", baseline_value=0.3)
        state = ShapingState("qwale", np.ones(6), np.ones(2), config, Rng(1), frozen, prior)
        assert state.update_baseline(prior.obs[0], prior.actions[0]) == 0.3

    def test_degenerate_q_falls_back_to_unit_weights(self, caplog):
        agent = self.source_agent()
        for critic in (agent.critic1, agent.critic2):
            for name in critic.params:
                critic.params[name][...] = 0.0
        prior = prior_buffer()
        with caplog.at_level("WARNING"):
            state = ShapingState("qwale", np.ones(6), np.ones(2), ShapingConfig(), Rng(1), FrozenCritic.from_agent(agent), prior)
        assert not state.weighted
        assert "Degenerate" in caplog.text
        np.testing.assert_array_equal(state.prior_weights(prior.gather(np.arange(5))), np.ones(5))

    def test_qwale_requires_frozen_critic(self):
        with pytest.raises(ConfigError):
            ShapingState("qwale", np.ones(6), np.ones(2), ShapingConfig(), Rng(1), None, prior_buffer())

    def test_frozen_critic_is_a_copy(self):
        agent = self.source_agent()
        frozen = FrozenCritic.from_agent(agent)
        agent.critic1.params["l0/w"][...] += 1.0
        assert not frozen.agent.critic1.params.values_equal(agent.critic1.params)

    def test_gail_sa_scores_state_actions(self):
        state = ShapingState("gail_sa", np.ones(6), np.ones(2), ShapingConfig(), Rng(1))
        assert state.inputs(np.zeros(6), np.ones(2)).shape == (1, 8)
        d = state.score(np.zeros((3, 6)), np.ones((3, 2)))
        assert np.all((d > 0.0) & (d < 1.0))

    def test_balanced_discriminator_converges_to_half(self):
        config = ShapingConfig(disc_batch_size=128, disc_hidden=(32,), disc_lr=1e-3)
        state = ShapingState("gail_s", np.full(6, 50.0), np.ones(2), config, Rng(2))
        prior = prior_buffer(256, seed=3)
        online = ReplayBuffer.from_transitions(list(prior_buffer(256, seed=3)), 6, 2, origin="online")
        rng = Rng(4)
        for _ in range(300):
            state.train_step(prior, online, rng)
        d = state.score(prior.obs[:256], prior.actions[:256])
        assert float(d.mean()) == pytest.approx(0.5, abs=0.05)

    def test_train_step_separates_distinct_distributions(self):
        config = ShapingConfig(disc_batch_size=64, disc_hidden=(16,), disc_lr=3e-3, mixup_alpha=0.0)
        state = ShapingState("gail_s", np.ones(6), np.ones(2), config, Rng(5))
        rng = Rng(6)
        prior = ReplayBuffer.from_transitions(
            [Transition(np.r_[rng.gaussian(1, 1)[0] + 2.0, np.zeros(5)], np.zeros(2), 0.0, np.zeros(6), t, False) for t in range(1, 101)],
            6, 2, origin="prior",
        )
        online = ReplayBuffer.from_transitions(
            [Transition(np.r_[rng.gaussian(1, 1)[0] - 2.0, np.zeros(5)], np.zeros(2), 0.0, np.zeros(6), t, False) for t in range(1, 101)],
            6, 2, origin="online",
        )
        for _ in range(200):
            state.train_step(prior, online, rng)
        assert state.score(np.r_[2.0, np.zeros(5)], np.zeros(2))[0] > 0.8
        assert state.score(np.r_[-2.0, np.zeros(5)], np.zeros(2))[0] < 0.2

    def test_disc_checkpoint_round_trip(self, tmp_path):
        state = ShapingState("gail_s", np.ones(6), np.ones(2), ShapingConfig(), Rng(1))
        path = state.save_disc(tmp_path / "disc.json")
        other = ShapingState("gail_s", np.ones(6), np.ones(2), ShapingConfig(), Rng(99))
        other.load_disc(path)
        assert other.disc.params.values_equal(state.disc.params)


class TestRnd:
    """Test the random network distillation bonus."""

    def test_copied_predictor_gives_zero_bonus(self):
        rnd = RndState.create(np.ones(6), Rng(0), hidden=(16,), features=8)
        rnd.predictor = rnd.target.copy()
        bonus = rnd_bonus(rnd, Rng(1).gaussian(10, 6))
        np.testing.assert_array_equal(bonus, np.zeros(10))

    def test_single_obs_returns_float(self):
        rnd = RndState.create(np.ones(6), Rng(0), hidden=(16,), features=8)
        assert isinstance(rnd_bonus(rnd, np.zeros(6)), float)

    def test_bonus_decreases_on_visited_obs(self):
        rnd = RndState.create(np.ones(6), Rng(0), hidden=(16,), features=8, lr=1e-3)
        obs = np.full((1, 6), 0.5)
        bonuses = []
        for _ in range(100):
            bonuses.append(rnd_bonus(rnd, obs[0]))
            rnd_update(rnd, obs)
        assert bonuses[-1] < bonuses[0]

    def test_target_is_frozen(self):
        rnd = RndState.create(np.ones(6), Rng(0), hidden=(16,), features=8)
        before = rnd.target.params.copy()
        for _ in range(10):
            rnd_update(rnd, Rng(2).gaussian(8, 6))
        assert rnd.target.params.values_equal(before)

    def test_unvisited_obs_keeps_larger_bonus(self):
        rnd = RndState.create(np.ones(2), Rng(3), hidden=(32,), features=16, lr=3e-3)
        rng = Rng(4)
        for _ in range(300):
            rnd_update(rnd, rng.uniform(-0.5, 0.5, size=(32 * 2)).reshape(32, 2))
        visited = float(np.mean(rnd_bonus(rnd, rng.uniform(-0.5, 0.5, size=(64 * 2)).reshape(64, 2))))
        distant = float(np.mean(rnd_bonus(rnd, np.full((4, 2), 8.0))))
        assert distant >= visited

    def test_bonus_scale(self):
        rnd = RndState.create(np.ones(6), Rng(0), hidden=(16,), features=8)
        scaled = RndState(rnd.target, rnd.predictor, rnd.obs_scale, bonus_scale=3.0)
        obs = Rng(1).gaussian(4, 6)
        np.testing.assert_allclose(rnd_bonus(scaled, obs), 3.0 * rnd_bonus(rnd, obs))
