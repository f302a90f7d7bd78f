"""2-D point mass with an optional wind shift.

Target variant: every step the wind pushes the agent up by U(0.8, 0.9) and
left by 0.2, applied after the action and before the boundary clip.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import gymnasium as gym
import numpy as np

from ..core.rng import Rng
from .base import EnvSpec, StepResult, distance

X_BOUND = 100.0
Y_BOUND = 200.0
GOAL = (100.0, 0.0)
SUCCESS_RADIUS = 2.0
WIND_UP = (0.8, 0.9)
WIND_LEFT = 0.2


@dataclass
class PointmassState:
    x: float = 0.0
    y: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    goal_x: float = GOAL[0]
    goal_y: float = GOAL[1]

    def obs(self) -> np.ndarray:
        return np.array([self.x, self.y, self.vx, self.vy, self.goal_x, self.goal_y])


def pointmass_reset() -> PointmassState:
    return PointmassState()


def pointmass_step(state: PointmassState, action, wind: bool, rng: Optional[Rng]) -> StepResult:
    """Advance ``state`` in place by one step."""
    ax = min(max(float(action[0]), -1.0), 1.0)
    ay = min(max(float(action[1]), -1.0), 1.0)
    old_x, old_y = state.x, state.y

    x = old_x + ax
    y = old_y + ay
    if wind:
        y = y + rng.uniform(*WIND_UP)
        x = x - WIND_LEFT
    x = min(max(x, -X_BOUND), X_BOUND)
    y = min(max(y, -Y_BOUND), Y_BOUND)

    state.x, state.y = x, y
    state.vx, state.vy = x - old_x, y - old_y
    reward = 1.0 if distance(x, y, state.goal_x, state.goal_y) < SUCCESS_RADIUS else 0.0
    return StepResult(state.obs(), reward, reward == 1.0)


class PointmassEnv(gym.Env):
    """Gymnasium wrapper; the target variant turns the wind on."""

    metadata = {"render_modes": []}

    def __init__(self, spec: EnvSpec, rng: Rng):
        self.env_spec = spec
        self.wind = spec.variant == "target"
        self.rng = rng
        self.state = pointmass_reset()
        self.reset_count = 0
        high = np.array([X_BOUND, Y_BOUND, 2 * X_BOUND, 2 * Y_BOUND, X_BOUND, Y_BOUND])
        self.observation_space = gym.spaces.Box(-high, high, dtype=np.float64)
        self.action_space = gym.spaces.Box(-1.0, 1.0, shape=(2,), dtype=np.float64)

    def reset(self, *, seed: Optional[int] = None, options: Optional[Dict[str, Any]] = None):
        self.reset_count += 1
        self.state = pointmass_reset()
        if options and "state" in options:
            self.state = options["state"]
        return self.state.obs(), {}

    def step(self, action):
        result = pointmass_step(self.state, action, self.wind, self.rng)
        return result.next_obs, result.reward, result.task_complete, False, {}
