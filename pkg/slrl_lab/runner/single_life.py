"""Single-life deployment in the target domain.

One reset, then act / observe / learn until the task completes or the step
budget runs out. Every method variant runs through the same loop; they
differ only in initialization, prior data, reward shaping and whether any
gradient updates happen at all.
"""

import time
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..algos.rnd import RndState, rnd_bonus, rnd_update
from ..algos.sac import SacAgent, SacConfig, act, behavior_cloning_step, random_action, sac_update
from ..algos.shaping import DISC_MODES, FrozenCritic, ShapingConfig, ShapingState
from ..config import get_config
from ..core.rng import Rng
from ..envs import SlrlEnv, env_info
from ..exceptions import ConfigError, ContractViolationError
from ..replay.buffer import Batch, ReplayBuffer, Transition, sample_batch, sample_from
from ..replay.dataset import DatasetFile
from ..utils.logging import get_logger
from .prior import PRIOR_SOURCES
from .records import RunRecord, TraceRow

logger = get_logger(__name__)

METHODS: Tuple[str, ...] = (
    "sac_ft",
    "sac_rnd",
    "sac_bc",
    "sac_scratch",
    "sac_no_online",
    "gail_s",
    "gail_sa",
    "qwale",
    "bc",
)

METHOD_SHAPING: Dict[str, str] = {
    "sac_ft": "none",
    "sac_rnd": "rnd",
    "sac_bc": "none",
    "sac_scratch": "none",
    "sac_no_online": "none",
    "gail_s": "gail_s",
    "gail_sa": "gail_sa",
    "qwale": "qwale",
    "bc": "none",
}

# Methods that start from a freshly initialized policy no matter what.
_FRESH_METHODS = ("sac_scratch", "bc")


@dataclass
class MethodConfig:
    method: str
    init_from_pretrained: bool = True
    prior_source: str = "rl_last_k"
    budget: int = 200_000
    seed: int = 0
    bc_weight: float = 1.0  # sac_bc only
    bc_steps: int = 5000  # bc only

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"Unknown method {self.method!r}; expected one of {', '.join(METHODS)}", field="method")
        if self.prior_source not in PRIOR_SOURCES:
            raise ConfigError(f"Unknown prior source {self.prior_source!r}", field="prior_source")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1", field="budget")
        if self.method in _FRESH_METHODS and self.init_from_pretrained:
            raise ConfigError(f"{self.method} never starts from pretrained weights", field="init_from_pretrained")
        if self.prior_source == "demos" and self.init_from_pretrained:
            raise ConfigError("demo priors deploy without pretrained weights", field="init_from_pretrained")
        if self.bc_weight < 0.0 or self.bc_steps < 0:
            raise ConfigError("bc_weight and bc_steps must be >= 0", field="bc_weight")

    @classmethod
    def for_method(cls, method: str, prior_source: str = "rl_last_k", **kwargs) -> "MethodConfig":
        """Config with ``init_from_pretrained`` derived from method and prior source."""
        init = method not in _FRESH_METHODS and prior_source == "rl_last_k"
        return cls(method=method, init_from_pretrained=init, prior_source=prior_source, **kwargs)

    @property
    def shaping_mode(self) -> str:
        return METHOD_SHAPING[self.method]

    @property
    def uses_prior(self) -> bool:
        return self.method != "sac_scratch"

    @property
    def learns_online(self) -> bool:
        return self.method not in ("sac_no_online", "bc")


def reward_relabel(
    batch: Batch, shaping_mode: str, disc: Optional[ShapingState], rnd: Optional[RndState]
) -> Batch:
    """Recompute batch rewards from the current shaping state.

    Discriminator modes pay r + -log(1 - D(s)) (or D(s, a)); rnd pays
    r + bonus(s'); everything else leaves the batch as is.
    """
    if (disc is not None) != (shaping_mode in DISC_MODES):
        raise ContractViolationError(f"discriminator must be present iff shaping mode is one of {DISC_MODES}")
    if shaping_mode in DISC_MODES:
        return batch.with_rewards(batch.rewards + disc.bonus(batch.obs, batch.actions))
    if shaping_mode == "rnd":
        if rnd is None:
            raise ContractViolationError("rnd shaping needs an RndState")
        return batch.with_rewards(batch.rewards + rnd_bonus(rnd, batch.next_obs))
    return batch


class SingleLife:
    """State of one deployment: agent, buffers, shaping and RNG streams."""

    def __init__(
        self,
        method: MethodConfig,
        prior: DatasetFile,
        pretrained: Optional[SacAgent],
        target_env: SlrlEnv,
        sac_config: Optional[SacConfig] = None,
        shaping_config: Optional[ShapingConfig] = None,
        frozen_q: Optional[FrozenCritic] = None,
    ):
        self.method = method
        self.env = target_env
        self.env_id = target_env.env_spec.env_id
        self.shaping_config = shaping_config or ShapingConfig()
        sac_config = sac_config or SacConfig()
        self.sac_config = replace(sac_config, bc_weight=method.bc_weight if method.method == "sac_bc" else 0.0)
        info = env_info(self.env_id)

        header = prior.header
        if (header.obs_dim, header.action_dim) != (info.obs_dim, info.action_dim) or header.env_id != self.env_id:
            raise ConfigError(
                f"Prior data ({header.env_id}, obs {header.obs_dim}, action {header.action_dim}) does not match "
                f"env {self.env_id} (obs {info.obs_dim}, action {info.action_dim})",
                field="prior",
            )
        mode = method.shaping_mode
        if self.shaping_config.mode not in (None, mode):
            raise ConfigError(
                f"shaping.mode={self.shaping_config.mode!r} conflicts with method {method.method!r}",
                field="shaping.mode",
            )
        if (mode in DISC_MODES or method.method in ("sac_bc", "bc")) and len(prior) == 0:
            raise ConfigError(f"{method.method} needs nonempty prior data", field="prior")

        rng = Rng(method.seed).fork("life")
        self.act_rng = rng.fork("policy")
        self.batch_rng = rng.fork("batch")
        self.update_rng = rng.fork("update")
        self.shaping_rng = rng.fork("shaping")

        if method.init_from_pretrained:
            if pretrained is None:
                raise ConfigError(f"{method.method} starts from pretrained weights but none were given", field="pretrained")
            if (pretrained.obs_dim, pretrained.action_dim) != (info.obs_dim, info.action_dim):
                raise ConfigError("pretrained agent dims do not match the env", field="pretrained")
            self.agent = pretrained.copy()
        else:
            self.agent = SacAgent.for_env(self.env_id, self.sac_config, rng.fork("agent"))

        if method.uses_prior:
            self.prior = prior.to_buffer()
        else:
            self.prior = ReplayBuffer(1, info.obs_dim, info.action_dim, origin="prior")
        self.online = ReplayBuffer(method.budget, info.obs_dim, info.action_dim, origin="online")

        self.mode = mode
        self.shaping: Optional[ShapingState] = None
        self.rnd: Optional[RndState] = None
        if mode in DISC_MODES:
            if mode == "qwale" and frozen_q is None:
                if pretrained is None:
                    raise ConfigError("qwale needs a frozen source critic", field="frozen_q")
                frozen_q = FrozenCritic.from_agent(pretrained)
            self.shaping = ShapingState(
                mode, info.obs_scale, info.action_scale, self.shaping_config,
                rng.fork("disc"), frozen_q if mode == "qwale" else None, self.prior,
            )
        elif mode == "rnd":
            self.rnd = RndState.create(
                info.obs_scale, rng.fork("rnd"), self.shaping_config.rnd_hidden,
                self.shaping_config.rnd_features, self.shaping_config.rnd_scale, self.sac_config.lr,
            )
        self.updates_applied = 0

    def _config_echo(self) -> Dict[str, Any]:
        return {
            "method": asdict(self.method),
            "env": asdict(self.env.env_spec),
            "sac": asdict(self.sac_config),
            "shaping": asdict(self.shaping_config),
        }

    def _clone_behavior(self) -> None:
        steps = self.method.bc_steps
        logger.info(f"Behavior cloning on {len(self.prior)} prior transitions for {steps} steps")
        for i in range(1, steps + 1):
            loss = behavior_cloning_step(
                self.agent, self.sac_config, sample_from(self.prior, self.sac_config.batch_size, self.batch_rng)
            )
            if i % 1000 == 0:
                logger.debug(f"bc step={i} loss={loss:.6f}")

    def _select_action(self, obs: np.ndarray, t: int) -> np.ndarray:
        if self.method.method == "bc":
            return act(self.agent, obs, True, self.act_rng)
        if not self.method.init_from_pretrained and t <= self.sac_config.warmup_steps:
            return random_action(self.agent, self.act_rng)
        return act(self.agent, obs, False, self.act_rng)

    def _learn(self) -> None:
        if self.shaping is not None:
            self.shaping.train_step(self.prior, self.online, self.shaping_rng)
        elif self.rnd is not None:
            n = min(self.sac_config.batch_size, len(self.online))
            rnd_update(self.rnd, sample_from(self.online, n, self.batch_rng).next_obs)
        for _ in range(self.sac_config.updates_per_step):
            batch = sample_batch(self.prior, self.online, self.sac_config.batch_size, self.batch_rng)
            batch = reward_relabel(batch, self.mode, self.shaping, self.rnd)
            self.last_losses = sac_update(self.agent, self.sac_config, batch, self.update_rng)
            self.updates_applied += 1

    def run(self, reset_options: Optional[Dict[str, Any]] = None) -> RunRecord:
        method, budget = self.method, self.method.budget
        log_every = get_config().log_every
        started = time.perf_counter()
        logger.info(f"Single life: {self.env_id} {method.method} seed={method.seed} budget={budget}")

        if method.method == "bc":
            self._clone_behavior()

        self.last_losses = None
        trace = []
        completion_step = budget
        obs, _ = self.env.reset(options=reset_options)
        for t in range(1, budget + 1):
            action = self._select_action(obs, t)
            next_obs, reward, done, _, _ = self.env.step(action)
            self.online.push(Transition(obs, action, reward, next_obs, t, done))

            d_score = float("nan")
            r_shaped = reward
            if self.shaping is not None:
                self.shaping.update_baseline(obs, action)
                d_score = float(self.shaping.score(obs, action)[0])
                r_shaped = reward + float(self.shaping.bonus(obs, action)[0])
            elif self.rnd is not None:
                r_shaped = reward + rnd_bonus(self.rnd, next_obs)
            trace.append(TraceRow(obs, action, reward, r_shaped, d_score))

            if done:
                completion_step = t
                break
            if t > self.sac_config.warmup_steps and method.learns_online:
                self._learn()
            if t % log_every == 0:
                logger.debug(f"life t={t} updates={self.updates_applied} losses={self.last_losses}")
            obs = next_obs

        success = completion_step < budget
        elapsed = time.perf_counter() - started
        logger.info(
            f"Life over: {self.env_id} {method.method} seed={method.seed} "
            f"completion_step={completion_step} success={success} ({elapsed:.1f}s)"
        )
        return RunRecord(
            env_id=self.env_id,
            method=method.method,
            seed=method.seed,
            budget=budget,
            completion_step=completion_step,
            success=success,
            trace=trace,
            config=self._config_echo(),
            wall_clock_seconds=elapsed,
            updates_applied=self.updates_applied,
        )


def run_single_life(
    method: MethodConfig,
    prior: DatasetFile,
    pretrained: Optional[SacAgent],
    target_env: SlrlEnv,
    sac_config: Optional[SacConfig] = None,
    shaping_config: Optional[ShapingConfig] = None,
    frozen_q: Optional[FrozenCritic] = None,
    reset_options: Optional[Dict[str, Any]] = None,
) -> RunRecord:
    """Deploy one method for one life; config errors surface before any step."""
    life = SingleLife(method, prior, pretrained, target_env, sac_config, shaping_config, frozen_q)
    return life.run(reset_options)
