"""Random network distillation exploration bonus."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.nn import Mlp, MlpSpec
from ..core.rng import Rng


@dataclass
class RndState:
    target: Mlp  # frozen for the whole life
    predictor: Mlp
    obs_scale: np.ndarray
    bonus_scale: float = 1.0
    lr: float = 3e-4

    @classmethod
    def create(
        cls,
        obs_scale: np.ndarray,
        rng: Rng,
        hidden: Tuple[int, ...] = (256,),
        features: int = 64,
        bonus_scale: float = 1.0,
        lr: float = 3e-4,
    ) -> "RndState":
        obs_scale = np.asarray(obs_scale, dtype=np.float64)
        spec = MlpSpec(len(obs_scale), hidden, features)
        return cls(
            target=Mlp.create(spec, rng.fork("rnd_target")),
            predictor=Mlp.create(spec, rng.fork("rnd_predictor")),
            obs_scale=obs_scale,
            bonus_scale=bonus_scale,
            lr=lr,
        )

    def residual(self, obs: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(obs) / self.obs_scale
        return self.predictor.forward(x) - self.target.forward(x)


def rnd_bonus(rnd: RndState, obs: np.ndarray):
    """bonus_scale * mean squared feature error; float for one obs, array for a batch."""
    bonus = rnd.bonus_scale * np.mean(rnd.residual(obs) ** 2, axis=1)
    return float(bonus[0]) if np.ndim(obs) == 1 else bonus


def rnd_update(rnd: RndState, obs_batch: np.ndarray) -> float:
    """One predictor step toward the frozen target on ``obs_batch``."""
    diff = rnd.residual(obs_batch)
    rnd.predictor.backward(2.0 * diff / diff.size)
    rnd.predictor.step(rnd.lr)
    return float(np.mean(diff**2))
