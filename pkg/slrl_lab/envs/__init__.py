"""Source/target environments with their novelty switches."""

from typing import Union

import numpy as np

from ..core.rng import Rng
from .base import ENV_IDS, ENV_INFO, EnvInfo, EnvSpec, StepResult, env_info
from .pointmass import PointmassEnv, PointmassState, pointmass_step
from .tabletop import TabletopEnv, TabletopState, tabletop_step

SlrlEnv = Union[PointmassEnv, TabletopEnv]


def make_env(spec: EnvSpec, rng: Rng) -> SlrlEnv:
    """Build an env whose randomness (wind, resets) draws from ``rng``."""
    if spec.env_id == "pointmass":
        return PointmassEnv(spec, rng)
    return TabletopEnv(spec, rng)


def env_reset(spec: EnvSpec, rng: Rng) -> np.ndarray:
    obs, _ = make_env(spec, rng).reset()
    return obs


__all__ = [
    "ENV_IDS",
    "ENV_INFO",
    "EnvInfo",
    "EnvSpec",
    "PointmassEnv",
    "PointmassState",
    "SlrlEnv",
    "StepResult",
    "TabletopEnv",
    "TabletopState",
    "env_info",
    "env_reset",
    "make_env",
    "pointmass_step",
    "tabletop_step",
]
