"""Discriminator reward shaping: GAIL-s, GAIL-sa and Q-weighted (QWALE).

The discriminator scores how prior-like a state (or state-action) is and
the agent is paid ``-log(1 - D)``. In QWALE mode the positive (prior) class
is weighted by ``exp(Q_norm(s, a) - b)``: Q comes from a critic frozen after
source pretraining, min-max normalized over the prior data, and ``b`` is the
normalized Q of the agent's most recent state-action.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Tuple

import numpy as np

from ..core.checkpoint import load_checkpoint, save_checkpoint
from ..core.nn import Mlp, MlpSpec, ParamStore, adam_step, mlp_backward, mlp_forward
from ..core.rng import Rng
from ..exceptions import ConfigError, ContractViolationError, DegenerateQError
from ..replay.buffer import Batch, ReplayBuffer, sample_from
from ..utils.logging import get_logger
from ..utils.validation import as_float, as_int, as_int_tuple
from .sac import SacAgent

logger = get_logger(__name__)

ShapingMode = Literal["none", "gail_s", "gail_sa", "qwale", "rnd"]
SHAPING_MODES: Tuple[str, ...] = ("none", "gail_s", "gail_sa", "qwale", "rnd")
DISC_MODES: Tuple[str, ...] = ("gail_s", "gail_sa", "qwale")

Q_RANGE_EPS = 1e-9
_Q_CHUNK = 4096
DISC_PREFIX = "disc/"


@dataclass
class ShapingConfig:
    mode: Optional[str] = None  # None: derived from the method
    mixup_alpha: float = 1.0
    rnd_scale: float = 1.0
    disc_batch_size: int = 512
    disc_hidden: Tuple[int, ...] = (128,)
    disc_lr: float = 3e-4
    baseline: Literal["recent", "constant"] = "recent"
    baseline_value: float = 0.5
    rnd_hidden: Tuple[int, ...] = (256,)
    rnd_features: int = 64

    def __post_init__(self):
        for name in ("mixup_alpha", "rnd_scale", "disc_lr", "baseline_value"):
            setattr(self, name, as_float(getattr(self, name), f"shaping.{name}"))
        for name in ("disc_batch_size", "rnd_features"):
            setattr(self, name, as_int(getattr(self, name), f"shaping.{name}"))
        self.disc_hidden = as_int_tuple(self.disc_hidden, "shaping.disc_hidden")
        self.rnd_hidden = as_int_tuple(self.rnd_hidden, "shaping.rnd_hidden")
        if self.disc_lr <= 0.0:
            raise ConfigError("disc_lr must be > 0", field="shaping.disc_lr")
        if self.rnd_features < 1:
            raise ConfigError("rnd_features must be >= 1", field="shaping.rnd_features")
        if self.mode is not None and self.mode not in SHAPING_MODES:
            raise ConfigError(f"Unknown shaping mode {self.mode!r}", field="shaping.mode")
        if self.mixup_alpha < 0.0:
            raise ConfigError("mixup_alpha must be >= 0 (0 disables mixup)", field="shaping.mixup_alpha")
        if self.baseline not in ("recent", "constant"):
            raise ConfigError(f"Unknown baseline {self.baseline!r}", field="shaping.baseline")
        if not 0.0 <= self.baseline_value <= 1.0:
            raise ConfigError("baseline_value is a normalized Q and must lie in [0, 1]", field="shaping.baseline_value")
        if self.disc_batch_size < 2:
            raise ConfigError("disc_batch_size must be >= 2", field="shaping.disc_batch_size")


@dataclass(frozen=True)
class DiscriminatorSpec:
    mode: str
    input_dim: int
    hidden: Tuple[int, ...] = (128,)
    batch_size: int = 512
    mixup_alpha: float = 1.0

    @classmethod
    def for_mode(cls, mode: str, obs_dim: int, action_dim: int, config: ShapingConfig) -> "DiscriminatorSpec":
        if mode not in DISC_MODES:
            raise ConfigError(f"{mode!r} does not train a discriminator", field="shaping.mode")
        input_dim = obs_dim + action_dim if mode == "gail_sa" else obs_dim
        return cls(mode, input_dim, config.disc_hidden, config.disc_batch_size, config.mixup_alpha)

    @property
    def mlp_spec(self) -> MlpSpec:
        return MlpSpec(self.input_dim, self.hidden, 1, "relu", "sigmoid")


def q_normalize(q, q_min: float, q_max: float):
    """Min-max normalize Q into [0, 1]; values outside the prior range clamp."""
    if q_max - q_min < Q_RANGE_EPS:
        raise DegenerateQError(q_min, q_max)
    out = np.clip((np.asarray(q, dtype=np.float64) - q_min) / (q_max - q_min), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def qwale_weight(q_norm, b: float):
    """Positive-class weight exp(q_norm - b)."""
    out = np.exp(np.asarray(q_norm, dtype=np.float64) - b)
    return float(out) if out.ndim == 0 else out


def shaping_bonus(d_score) -> np.ndarray:
    """-log(1 - D), vectorized."""
    return -np.log1p(-np.asarray(d_score, dtype=np.float64))


def shaped_reward(extrinsic_r: float, d_score: float) -> float:
    if not 0.0 < d_score < 1.0:
        raise ContractViolationError(f"d_score must lie in (0, 1), got {d_score!r}")
    return float(extrinsic_r + shaping_bonus(d_score))


def soft_label_loss(
    spec: DiscriminatorSpec, params: ParamStore, x: np.ndarray, labels: np.ndarray, weights: np.ndarray
) -> float:
    """Weighted cross-entropy with soft labels; accumulates gradients.

    L = -sum(w*y*log D)/sum(y) - sum((1-y)*log(1-D))/sum(1-y). With hard
    labels this is the prior mean of -w*log D plus the online mean of
    -log(1-D).
    """
    d = mlp_forward(params, spec.mlp_spec, x)[:, 0]
    labels = np.asarray(labels, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    pos_mass = labels.sum()
    neg_mass = (1.0 - labels).sum()

    loss = 0.0
    grad = np.zeros_like(d)
    if pos_mass > 0.0:
        loss -= float(np.sum(weights * labels * np.log(d))) / pos_mass
        grad -= weights * labels / d / pos_mass
    if neg_mass > 0.0:
        loss -= float(np.sum((1.0 - labels) * np.log1p(-d))) / neg_mass
        grad += (1.0 - labels) / (1.0 - d) / neg_mass
    mlp_backward(params, spec.mlp_spec, grad[:, None])
    return loss


def disc_loss(
    spec: DiscriminatorSpec, params: ParamStore, prior_x: np.ndarray, online_x: np.ndarray, weights: np.ndarray
) -> float:
    """-mean_prior(w * log D) - mean_online(log(1 - D)); accumulates gradients."""
    if len(prior_x) == 0 or len(online_x) == 0:
        raise ContractViolationError("disc_loss needs nonempty prior and online batches")
    x = np.concatenate([prior_x, online_x])
    labels = np.concatenate([np.ones(len(prior_x)), np.zeros(len(online_x))])
    w = np.concatenate([np.asarray(weights, dtype=np.float64), np.ones(len(online_x))])
    return soft_label_loss(spec, params, x, labels, w)


def mixup_augment(
    x: np.ndarray, labels: np.ndarray, weights: np.ndarray, alpha: float, rng: Rng
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Convexly mix every sample with a random partner, lambda ~ Beta(alpha, alpha)."""
    if alpha <= 0.0:
        raise ContractViolationError(f"mixup alpha must be > 0, got {alpha}")
    n = len(x)
    partner = rng.permutation(n)
    lam = rng.beta(alpha, alpha, size=n)
    lam_x = lam[:, None]
    return (
        lam_x * x + (1.0 - lam_x) * x[partner],
        lam * labels + (1.0 - lam) * labels[partner],
        lam * weights + (1.0 - lam) * weights[partner],
    )


@dataclass
class FrozenCritic:
    """Twin critics copied out of a pretrained agent; never updated."""

    agent: SacAgent

    @classmethod
    def from_agent(cls, agent: SacAgent) -> "FrozenCritic":
        return cls(agent.copy())

    def q(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        obs, actions = np.atleast_2d(obs), np.atleast_2d(actions)
        if len(obs) <= _Q_CHUNK:
            return self.agent.q_min(obs, actions)
        return np.concatenate([
            self.agent.q_min(obs[i:i + _Q_CHUNK], actions[i:i + _Q_CHUNK])
            for i in range(0, len(obs), _Q_CHUNK)
        ])


class ShapingState:
    """Discriminator, frozen Q, prior Q range and the current baseline."""

    def __init__(
        self,
        mode: str,
        obs_scale: np.ndarray,
        action_scale: np.ndarray,
        config: ShapingConfig,
        rng: Rng,
        frozen_q: Optional[FrozenCritic] = None,
        prior: Optional[ReplayBuffer] = None,
    ):
        self.obs_scale = np.asarray(obs_scale, dtype=np.float64)
        self.action_scale = np.asarray(action_scale, dtype=np.float64)
        self.spec = DiscriminatorSpec.for_mode(mode, len(self.obs_scale), len(self.action_scale), config)
        self.config = config
        self.disc = Mlp.create(self.spec.mlp_spec, rng.fork("disc_init"))
        self.frozen_q = frozen_q
        self.q_min = self.q_max = 0.0
        self.b_current = config.baseline_value
        self.weighted = False

        if mode == "qwale":
            if frozen_q is None or prior is None or len(prior) == 0:
                raise ConfigError("qwale needs a frozen critic and nonempty prior data", field="shaping.mode")
            q = frozen_q.q(prior.obs[:len(prior)], prior.actions[:len(prior)])
            self.q_min, self.q_max = float(q.min()), float(q.max())
            if self.q_max - self.q_min < Q_RANGE_EPS:
                logger.warning(
                    f"Degenerate prior Q range [{self.q_min}, {self.q_max}]; falling back to unit weights"
                )
            else:
                self.weighted = True
            logger.info(f"QWALE prior Q range [{self.q_min:.4f}, {self.q_max:.4f}]")

    @property
    def mode(self) -> str:
        return self.spec.mode

    def inputs(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        obs_n = np.atleast_2d(obs) / self.obs_scale
        if self.mode == "gail_sa":
            return np.concatenate([obs_n, np.atleast_2d(actions) / self.action_scale], axis=1)
        return obs_n

    def score(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return self.disc.forward(self.inputs(obs, actions))[:, 0]

    def bonus(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return shaping_bonus(self.score(obs, actions))

    def normalized_q(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return q_normalize(self.frozen_q.q(obs, actions), self.q_min, self.q_max)

    def update_baseline(self, obs: np.ndarray, action: np.ndarray) -> float:
        """b <- normalized frozen Q of the most recent (s_t, a_t)."""
        if self.weighted and self.config.baseline == "recent":
            self.b_current = float(self.normalized_q(obs, action)[0])
        return self.b_current

    def prior_weights(self, batch: Batch) -> np.ndarray:
        if not self.weighted:
            return np.ones(len(batch))
        return qwale_weight(self.normalized_q(batch.obs, batch.actions), self.b_current)

    def train_step(self, prior: ReplayBuffer, online: ReplayBuffer, rng: Rng) -> float:
        """One discriminator step: half prior / half online once online is large enough."""
        n_online = min(self.spec.batch_size // 2, len(online))
        n_prior = self.spec.batch_size - n_online
        pos = sample_from(prior, n_prior, rng)
        x_parts, labels, weights = [self.inputs(pos.obs, pos.actions)], [np.ones(n_prior)], [self.prior_weights(pos)]
        if n_online:
            neg = sample_from(online, n_online, rng)
            x_parts.append(self.inputs(neg.obs, neg.actions))
            labels.append(np.zeros(n_online))
            weights.append(np.ones(n_online))
        x, y, w = np.concatenate(x_parts), np.concatenate(labels), np.concatenate(weights)
        if self.spec.mixup_alpha > 0.0:
            x, y, w = mixup_augment(x, y, w, self.spec.mixup_alpha, rng)
        loss = soft_label_loss(self.spec, self.disc.params, x, y, w)
        adam_step(self.disc.params, self.config.disc_lr)
        return loss

    def save_disc(self, path: Path) -> Path:
        return save_checkpoint(path, {DISC_PREFIX: self.disc.params})

    def load_disc(self, path: Path) -> None:
        loaded = load_checkpoint(path, [DISC_PREFIX])[DISC_PREFIX]
        params = self.disc.params
        if loaded.entries.keys() != params.entries.keys():
            raise ConfigError(f"checkpoint {path} does not match a {self.mode} discriminator", field="disc")
        for name, entry in loaded.entries.items():
            if entry.value.shape != params[name].shape:
                raise ConfigError(f"checkpoint entry {DISC_PREFIX}{name} has shape {entry.value.shape}", field="disc")
            params.entries[name].value[...] = entry.value
        params.step_count = loaded.step_count
