"""Environment specs, registry and the shared step result."""

from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np

from ..exceptions import ConfigError

EnvId = Literal["pointmass", "tabletop"]
Variant = Literal["source", "target"]

ENV_IDS: Tuple[str, ...] = ("pointmass", "tabletop")
VARIANTS: Tuple[str, ...] = ("source", "target")


@dataclass(frozen=True)
class EnvSpec:
    env_id: EnvId
    variant: Variant
    seed: int = 0

    def __post_init__(self):
        if self.env_id not in ENV_IDS:
            raise ConfigError(f"Unknown env_id {self.env_id!r}", field="env_id")
        if self.variant not in VARIANTS:
            raise ConfigError(f"Unknown variant {self.variant!r}", field="variant")

    def with_variant(self, variant: Variant) -> "EnvSpec":
        return EnvSpec(self.env_id, variant, self.seed)


@dataclass(frozen=True)
class EnvInfo:
    """Static facts about an env id: dims, scales and plot projection."""

    obs_dim: int
    action_dim: int
    obs_scale: Tuple[float, ...]
    action_scale: Tuple[float, ...]
    projection: Tuple[int, int]  # observation columns plotted as (x, y)
    demo_count: int
    achieved_columns: Tuple[int, int]  # what must reach the goal
    goal_columns: Tuple[int, int]
    success_radius: float


ENV_INFO = {
    "pointmass": EnvInfo(
        obs_dim=6,
        action_dim=2,
        obs_scale=(100.0, 200.0, 1.0, 1.0, 100.0, 200.0),
        action_scale=(1.0, 1.0),
        projection=(0, 1),
        demo_count=3,
        achieved_columns=(0, 1),
        goal_columns=(4, 5),
        success_radius=2.0,
    ),
    "tabletop": EnvInfo(
        obs_dim=7,
        action_dim=3,
        obs_scale=(2.8, 2.8, 2.8, 2.8, 1.0, 2.8, 2.8),
        action_scale=(0.2, 0.2, 1.0),
        projection=(2, 3),
        demo_count=10,
        achieved_columns=(2, 3),
        goal_columns=(5, 6),
        success_radius=0.15,
    ),
}


def env_info(env_id: str) -> EnvInfo:
    try:
        return ENV_INFO[env_id]
    except KeyError:
        raise ConfigError(f"Unknown env_id {env_id!r}", field="env_id") from None


@dataclass(frozen=True)
class StepResult:
    next_obs: np.ndarray
    reward: float
    task_complete: bool


def distance(ax: float, ay: float, bx: float, by: float) -> float:
    return float(np.hypot(ax - bx, ay - by))
