"""Hindsight goal relabeling for goal-conditioned pretraining."""

from typing import List, Sequence

import numpy as np

from ..core.rng import Rng
from ..envs.base import EnvInfo
from .buffer import Transition


def with_goal(obs: np.ndarray, goal: np.ndarray, info: EnvInfo) -> np.ndarray:
    out = np.array(obs, dtype=np.float64)
    out[list(info.goal_columns)] = goal
    return out


def achieved_goal(obs: np.ndarray, info: EnvInfo) -> np.ndarray:
    return np.asarray(obs, dtype=np.float64)[list(info.achieved_columns)]


def goal_reward(achieved: np.ndarray, goal: np.ndarray, info: EnvInfo) -> float:
    return 1.0 if float(np.hypot(*(achieved - goal))) < info.success_radius else 0.0


def hindsight_relabel(episode: Sequence[Transition], k: int, info: EnvInfo, rng: Rng) -> List[Transition]:
    """``k`` copies of every transition with goals achieved later in the episode.

    Goals are drawn uniformly from the achieved positions at or after the
    transition's own next state; reward and terminal follow the env's
    success radius. Timesteps are kept.
    """
    n = len(episode)
    if k <= 0 or n == 0:
        return []
    achieved = np.stack([achieved_goal(t.next_obs, info) for t in episode])
    out: List[Transition] = []
    for i, t in enumerate(episode):
        for j in i + rng.integers(n - i, size=k):
            goal = achieved[j]
            reward = goal_reward(achieved[i], goal, info)
            out.append(Transition(
                with_goal(t.obs, goal, info), t.action, reward,
                with_goal(t.next_obs, goal, info), t.timestep, reward == 1.0,
            ))
    return out
