"""Scripted demonstrations in the source variant."""

from typing import List

import numpy as np

from ..core.rng import Rng
from ..exceptions import DemoGenerationError
from ..replay.buffer import Transition
from .base import EnvSpec, distance
from .pointmass import PointmassEnv
from .tabletop import MAX_DELTA, TabletopEnv

MAX_DEMO_STEPS = 10_000
# the gripper closes once this close to the mug, inside the attach radius
GRASP_DISTANCE = 0.1


def _pointmass_action(obs: np.ndarray) -> np.ndarray:
    return np.clip(obs[4:6] - obs[0:2], -1.0, 1.0)


def _tabletop_action(obs: np.ndarray) -> np.ndarray:
    gripper, mug, attached, goal = obs[0:2], obs[2:4], obs[4] > 0.5, obs[5:7]
    if attached:
        return np.append(np.clip(goal - gripper, -MAX_DELTA, MAX_DELTA), 1.0)
    if distance(*gripper, *mug) < GRASP_DISTANCE:
        return np.array([0.0, 0.0, 1.0])
    return np.append(np.clip(mug - gripper, -MAX_DELTA, MAX_DELTA), -1.0)


def scripted_demos(spec: EnvSpec, n_demos: int, rng: Rng) -> List[List[Transition]]:
    """Roll out the scripted controller ``n_demos`` times until success."""
    if spec.variant != "source":
        raise DemoGenerationError(
            f"scripted demos need the source variant, got {spec.variant!r}",
            {"env_id": spec.env_id},
        )
    if spec.env_id == "pointmass":
        env, controller = PointmassEnv(spec, rng.fork("env")), _pointmass_action
    else:
        env, controller = TabletopEnv(spec, rng.fork("env")), _tabletop_action

    demos = []
    for demo_index in range(n_demos):
        obs, _ = env.reset()
        trajectory: List[Transition] = []
        for t in range(1, MAX_DEMO_STEPS + 1):
            action = controller(obs)
            next_obs, reward, done, _, _ = env.step(action)
            trajectory.append(Transition(obs, action, reward, next_obs, t, done))
            obs = next_obs
            if done:
                break
        else:
            raise DemoGenerationError(
                f"{spec.env_id} controller did not reach the goal within {MAX_DEMO_STEPS} steps",
                {"env_id": spec.env_id, "demo_index": demo_index},
            )
        demos.append(trajectory)
    return demos
