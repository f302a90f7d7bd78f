"""Unit tests for the pointmass and tabletop environments and scripted demos."""

from unittest.mock import MagicMock

import numpy as np
import pytest

from slrl_lab.core.rng import Rng
from slrl_lab.envs import (
    EnvSpec,
    PointmassState,
    TabletopState,
    env_info,
    env_reset,
    make_env,
    pointmass_step,
    tabletop_step,
)
from slrl_lab.envs.demos import scripted_demos
from slrl_lab.envs.tabletop import TABLE_BOUND
from slrl_lab.exceptions import ConfigError, DemoGenerationError


class TestEnvSpec:
    """Test env spec validation and registry lookups."""

    def test_unknown_env_rejected(self):
        with pytest.raises(ConfigError):
            EnvSpec("halfcheetah", "source")

    def test_unknown_variant_rejected(self):
        with pytest.raises(ConfigError):
            EnvSpec("pointmass", "windy")

    def test_env_info_dims(self):
        assert (env_info("pointmass").obs_dim, env_info("pointmass").action_dim) == (6, 2)
        assert (env_info("tabletop").obs_dim, env_info("tabletop").action_dim) == (7, 3)


class TestReset:
    """Test reset distributions."""

    @pytest.mark.parametrize("seed", [0, 1, 2**40])
    def test_pointmass_starts_at_origin(self, seed):
        obs = env_reset(EnvSpec("pointmass", "target", seed), Rng(seed))
        np.testing.assert_array_equal(obs, [0, 0, 0, 0, 100, 0])

    def test_tabletop_source_mug_and_goals(self):
        env = make_env(EnvSpec("tabletop", "source"), Rng(0))
        goals = set()
        for _ in range(200):
            obs, _ = env.reset()
            assert (obs[2], obs[3]) == (2.5, 0.0)
            goals.add((obs[5], obs[6]))
        assert goals == {(-2.5, -1.0), (-2.5, 1.0), (0.0, 2.0), (0.0, -2.0)}

    def test_tabletop_target_mug_ranges(self):
        env = make_env(EnvSpec("tabletop", "target"), Rng(3))
        signs, goals = set(), set()
        for _ in range(10_000):
            obs, _ = env.reset()
            assert 2.55 <= obs[2] <= 2.8
            assert 1.35 <= abs(obs[3]) <= 1.65
            signs.add(np.sign(obs[3]))
            goals.add((obs[5], obs[6]))
        assert signs == {-1.0, 1.0}
        assert goals == {(-2.5, -1.0), (-2.5, 1.0)}

    def test_reset_options_override_state(self):
        env = make_env(EnvSpec("pointmass", "target"), Rng(0))
        obs, _ = env.reset(options={"state": PointmassState(x=98.5)})
        assert obs[0] == 98.5
        assert env.reset_count == 1


class TestPointmassStep:
    """Test pointmass dynamics."""

    def test_plain_integrator(self):
        state = PointmassState()
        result = pointmass_step(state, (1.0, 0.0), False, None)
        np.testing.assert_array_equal(result.next_obs[:4], [1.0, 0.0, 1.0, 0.0])
        assert result.reward == 0.0
        assert not result.task_complete

    def test_wind_uses_drawn_value(self):
        rng = MagicMock()
        rng.uniform.return_value = 0.85
        result = pointmass_step(PointmassState(), (1.0, 0.0), True, rng)
        assert result.next_obs[0] == pytest.approx(0.8)
        assert result.next_obs[1] == pytest.approx(0.85)
        rng.uniform.assert_called_once_with(0.8, 0.9)

    def test_actions_are_clipped(self):
        result = pointmass_step(PointmassState(), (5.0, -3.0), False, None)
        np.testing.assert_array_equal(result.next_obs[:2], [1.0, -1.0])

    def test_success_inside_radius(self):
        result = pointmass_step(PointmassState(x=98.5), (0.0, 0.0), False, None)
        assert result.reward == 1.0
        assert result.task_complete

    def test_position_clipped_to_bounds(self):
        state = PointmassState(x=100.0, y=-200.0)
        result = pointmass_step(state, (1.0, -1.0), False, None)
        assert (result.next_obs[0], result.next_obs[1]) == (100.0, -200.0)
        assert (result.next_obs[2], result.next_obs[3]) == (0.0, 0.0)

    def test_wind_drift_with_zero_actions(self):
        rng = Rng(11)
        state = PointmassState()
        for _ in range(50):
            old_x, old_y = state.x, state.y
            pointmass_step(state, (0.0, 0.0), True, rng)
            assert state.x - old_x == pytest.approx(-0.2)
            assert 0.8 <= state.y - old_y <= 0.9

    def test_same_seed_same_trajectory(self):
        def rollout():
            env = make_env(EnvSpec("pointmass", "target", 4), Rng(4).fork("env"))
            env.reset()
            return [env.step(np.array([0.5, -0.3]))[0] for _ in range(20)]

        for a, b in zip(rollout(), rollout()):
            assert np.array_equal(a, b)


class TestTabletopStep:
    """Test tabletop gripper and mug dynamics."""

    def test_attached_mug_follows_gripper(self):
        state = TabletopState(gripper_x=1.0, gripper_y=1.0, mug_x=1.0, mug_y=1.0, attached=True)
        result = tabletop_step(state, (0.1, 0.0, 1.0))
        assert (result.next_obs[2], result.next_obs[3]) == (result.next_obs[0], result.next_obs[1])
        assert result.next_obs[0] == pytest.approx(1.1)

    def test_success_near_goal(self):
        state = TabletopState(gripper_x=0.0, gripper_y=0.0, mug_x=-2.45, mug_y=-1.0, goal_x=-2.5, goal_y=-1.0)
        result = tabletop_step(state, (0.0, 0.0, -1.0))
        assert result.reward == 1.0
        assert result.task_complete

    def test_far_mug_does_not_attach(self):
        state = TabletopState(mug_x=1.0, mug_y=1.0)
        result = tabletop_step(state, (0.0, 0.0, 1.0))
        assert result.next_obs[4] == 0.0
        assert (result.next_obs[2], result.next_obs[3]) == (1.0, 1.0)

    def test_release_on_non_positive_grip(self):
        state = TabletopState(gripper_x=1.0, gripper_y=1.0, mug_x=1.0, mug_y=1.0, attached=True)
        result = tabletop_step(state, (0.2, 0.0, 0.0))
        assert result.next_obs[4] == 0.0
        assert result.next_obs[2] == 1.0

    def test_deltas_capped_and_table_clipped(self):
        state = TabletopState(gripper_x=2.7, gripper_y=0.0)
        result = tabletop_step(state, (1.0, -1.0, -1.0))
        assert result.next_obs[0] == TABLE_BOUND
        assert result.next_obs[1] == pytest.approx(-0.2)

    def test_observations_stay_on_table(self):
        env = make_env(EnvSpec("tabletop", "target"), Rng(2))
        rng = Rng(5)
        obs, _ = env.reset()
        for _ in range(500):
            obs, *_ = env.step(rng.uniform(-1.0, 1.0, size=3))
            assert np.all(np.abs(obs) <= TABLE_BOUND)


class TestScriptedDemos:
    """Test the scripted source-domain controllers."""

    def test_pointmass_demos_succeed_in_99_steps(self):
        demos = scripted_demos(EnvSpec("pointmass", "source"), 3, Rng(0))
        assert len(demos) == 3
        for demo in demos:
            assert len(demo) == 99
            assert demo[-1].terminal
            assert np.hypot(demo[-1].next_obs[0] - 100.0, demo[-1].next_obs[1]) < 2.0
            assert [t.timestep for t in demo] == list(range(1, 100))

    def test_tabletop_demos_attach_before_mug_moves(self):
        demos = scripted_demos(EnvSpec("tabletop", "source"), 10, Rng(1))
        assert len(demos) == 10
        for demo in demos:
            assert demo[-1].terminal
            first_move = next(
                t for t in demo if not np.array_equal(t.obs[2:4], t.next_obs[2:4])
            )
            assert first_move.obs[4] == 1.0 or first_move.next_obs[4] == 1.0

    def test_target_variant_rejected(self):
        with pytest.raises(DemoGenerationError):
            scripted_demos(EnvSpec("pointmass", "target"), 1, Rng(0))


def reference_pointmass(x, y, action, wind_draw):
    """Independent pointmass dynamics: clip action, add wind, clip to the arena, threshold at distance 2."""
    ax = min(max(float(action[0]), -1.0), 1.0)
    ay = min(max(float(action[1]), -1.0), 1.0)
    nx = x + ax
    ny = y + ay
    if wind_draw is not None:
        ny = ny + wind_draw
        nx = nx - 0.2
    nx = min(max(nx, -100.0), 100.0)
    ny = min(max(ny, -200.0), 200.0)
    reward = 1.0 if (nx - 100.0) ** 2 + ny**2 < 4.0 else 0.0
    return nx, ny, reward


class TestDynamicsOracles:
    """Randomized long-run checks of both environments."""

    STEPS = 100_000
    SEGMENT = 50

    def test_pointmass_matches_reference_dynamics(self):
        draws = np.random.default_rng(0)
        env_rng, reference_rng = Rng(21), Rng(21)
        state = PointmassState()
        rewards = 0
        for i in range(self.STEPS):
            if i % self.SEGMENT == 0:
                state = PointmassState(x=float(draws.uniform(90.0, 100.0)), y=float(draws.uniform(-6.0, 6.0)))
                wind = bool((i // self.SEGMENT) % 2)
            action = draws.uniform(-1.5, 1.5, size=2)
            old_x, old_y = state.x, state.y
            expected = reference_pointmass(
                old_x, old_y, action, reference_rng.uniform(0.8, 0.9) if wind else None
            )
            result = pointmass_step(state, action, wind, env_rng if wind else None)
            assert (result.next_obs[0], result.next_obs[1], result.reward) == expected
            assert (result.next_obs[2], result.next_obs[3]) == (expected[0] - old_x, expected[1] - old_y)
            assert result.task_complete == (expected[2] == 1.0)
            rewards += int(result.reward)
        assert rewards > 0

    def test_tabletop_attached_mug_sits_on_gripper(self):
        draws = np.random.default_rng(1)
        state = TabletopState()
        attached_steps = 0
        for i in range(self.STEPS):
            if i % self.SEGMENT == 0:
                gx, gy = draws.uniform(-2.5, 2.5, size=2)
                mx, my = np.clip([gx, gy] + draws.uniform(-0.3, 0.3, size=2), -TABLE_BOUND, TABLE_BOUND)
                state = TabletopState(gripper_x=float(gx), gripper_y=float(gy), mug_x=float(mx), mug_y=float(my))
            action = np.append(draws.uniform(-0.3, 0.3, size=2), draws.uniform(-1.0, 1.0))
            obs = tabletop_step(state, action).next_obs
            if obs[4] == 1.0:
                attached_steps += 1
                assert (obs[2], obs[3]) == (obs[0], obs[1])
        assert attached_steps > 0
