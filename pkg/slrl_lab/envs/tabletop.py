"""Tabletop organization: carry a mug to a goal coaster.

Observation: [gripper.x, gripper.y, mug.x, mug.y, attached, goal.x, goal.y].
Action: (dx, dy, grip); deltas are capped at 0.2 per step, grip > 0 attaches
when the gripper is within 0.2 of the mug and grip <= 0 releases.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import gymnasium as gym
import numpy as np

from ..core.rng import Rng
from .base import EnvSpec, StepResult, distance

TABLE_BOUND = 2.8
MAX_DELTA = 0.2
ATTACH_RADIUS = 0.2
SUCCESS_RADIUS = 0.15

SOURCE_MUG = (2.5, 0.0)
SOURCE_GOALS = ((-2.5, -1.0), (-2.5, 1.0), (0.0, 2.0), (0.0, -2.0))
TARGET_MUG_X = 2.7
TARGET_MUG_Y = (1.5, -1.5)
TARGET_JITTER = 0.15
TARGET_GOALS = ((-2.5, -1.0), (-2.5, 1.0))


def _clip(v: float, bound: float) -> float:
    return min(max(v, -bound), bound)


@dataclass
class TabletopState:
    gripper_x: float = 0.0
    gripper_y: float = 0.0
    mug_x: float = SOURCE_MUG[0]
    mug_y: float = SOURCE_MUG[1]
    attached: bool = False
    goal_x: float = SOURCE_GOALS[0][0]
    goal_y: float = SOURCE_GOALS[0][1]

    def obs(self) -> np.ndarray:
        return np.array([
            self.gripper_x, self.gripper_y, self.mug_x, self.mug_y,
            1.0 if self.attached else 0.0, self.goal_x, self.goal_y,
        ])


def tabletop_reset(variant: str, rng: Rng) -> TabletopState:
    if variant == "source":
        goal = rng.choice(SOURCE_GOALS)
        return TabletopState(goal_x=goal[0], goal_y=goal[1])
    mug_y = rng.choice(TARGET_MUG_Y)
    mug = (
        TARGET_MUG_X + rng.uniform(-TARGET_JITTER, TARGET_JITTER),
        mug_y + rng.uniform(-TARGET_JITTER, TARGET_JITTER),
    )
    goal = rng.choice(TARGET_GOALS)
    return TabletopState(
        mug_x=_clip(mug[0], TABLE_BOUND),
        mug_y=_clip(mug[1], TABLE_BOUND),
        goal_x=goal[0],
        goal_y=goal[1],
    )


def tabletop_step(state: TabletopState, action) -> StepResult:
    """Advance ``state`` in place by one step."""
    dx = _clip(float(action[0]), MAX_DELTA)
    dy = _clip(float(action[1]), MAX_DELTA)
    grip = _clip(float(action[2]), 1.0)

    state.gripper_x = _clip(state.gripper_x + dx, TABLE_BOUND)
    state.gripper_y = _clip(state.gripper_y + dy, TABLE_BOUND)
    if grip <= 0.0:
        state.attached = False
    elif distance(state.gripper_x, state.gripper_y, state.mug_x, state.mug_y) < ATTACH_RADIUS:
        state.attached = True
    if state.attached:
        state.mug_x, state.mug_y = state.gripper_x, state.gripper_y

    reward = 1.0 if distance(state.mug_x, state.mug_y, state.goal_x, state.goal_y) < SUCCESS_RADIUS else 0.0
    return StepResult(state.obs(), reward, reward == 1.0)


class TabletopEnv(gym.Env):
    """Gymnasium wrapper; the target variant shifts the mug start."""

    metadata = {"render_modes": []}

    def __init__(self, spec: EnvSpec, rng: Rng):
        self.env_spec = spec
        self.rng = rng
        self.state = TabletopState()
        self.reset_count = 0
        high = np.array([TABLE_BOUND] * 4 + [1.0] + [TABLE_BOUND] * 2)
        low = -high
        low[4] = 0.0
        self.observation_space = gym.spaces.Box(low, high, dtype=np.float64)
        self.action_space = gym.spaces.Box(
            np.array([-MAX_DELTA, -MAX_DELTA, -1.0]), np.array([MAX_DELTA, MAX_DELTA, 1.0]), dtype=np.float64
        )

    def reset(self, *, seed: Optional[int] = None, options: Optional[Dict[str, Any]] = None):
        self.reset_count += 1
        self.state = tabletop_reset(self.env_spec.variant, self.rng)
        if options and "state" in options:
            self.state = options["state"]
        return self.state.obs(), {}

    def step(self, action):
        result = tabletop_step(self.state, action)
        return result.next_obs, result.reward, result.task_complete, False, {}
