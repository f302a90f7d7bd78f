"""Soft actor-critic on the numpy MLP core.

Twin critics with polyak-averaged targets, a tanh-squashed Gaussian policy,
an auto-tuned entropy temperature, the periodic bootstrap cut used during a
single life, and an optional behavior-cloning term on prior samples.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import get_config
from ..core.checkpoint import load_checkpoint, save_checkpoint
from ..core.nn import Mlp, MlpSpec, ParamStore, adam_step
from ..core.rng import Rng
from ..envs import EnvSpec, env_info, make_env
from ..exceptions import ConfigError, ContractViolationError
from ..replay.buffer import Batch, ReplayBuffer, Transition, sample_from, sample_with_quota
from ..replay.relabel import hindsight_relabel
from ..utils.logging import get_logger
from ..utils.validation import as_bool, as_float, as_int, as_int_tuple

logger = get_logger(__name__)

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
# keeps sampled actions strictly inside (-1, 1) where tanh saturates
ACTION_LIMIT = 1.0 - 1e-9
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)

CHECKPOINT_PREFIXES = ("policy/", "critic1/", "critic2/", "target1/", "target2/", "")


@dataclass
class SacConfig:
    lr: float = 3e-4
    batch_size: int = 256
    tau: float = 0.005
    gamma: float = 0.99
    updates_per_step: int = 1
    bc_weight: float = 0.0
    bias_period: int = 100
    biased_td: bool = True
    hidden_dims: Tuple[int, ...] = (256, 256)
    init_log_alpha: float = 0.0
    warmup_steps: int = 1000

    def __post_init__(self):
        for name in ("lr", "tau", "gamma", "bc_weight", "init_log_alpha"):
            setattr(self, name, as_float(getattr(self, name), f"sac.{name}"))
        for name in ("batch_size", "updates_per_step", "bias_period", "warmup_steps"):
            setattr(self, name, as_int(getattr(self, name), f"sac.{name}"))
        self.biased_td = as_bool(self.biased_td, "sac.biased_td")
        self.hidden_dims = as_int_tuple(self.hidden_dims, "sac.hidden_dims")
        if self.lr <= 0.0:
            raise ConfigError("lr must be > 0", field="sac.lr")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("gamma must be in [0, 1)", field="sac.gamma")
        if self.warmup_steps < 0:
            raise ConfigError("warmup_steps must be >= 0", field="sac.warmup_steps")
        if self.bias_period < 1:
            raise ConfigError("bias_period must be >= 1", field="sac.bias_period")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1", field="sac.batch_size")
        if self.updates_per_step < 0:
            raise ConfigError("updates_per_step must be >= 0", field="sac.updates_per_step")
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError("tau must be in (0, 1]", field="sac.tau")
        if self.bc_weight < 0.0:
            raise ConfigError("bc_weight must be >= 0", field="sac.bc_weight")


@dataclass
class SacLosses:
    critic1: float
    critic2: float
    policy: float
    alpha: float
    entropy: float
    bc: float = 0.0


@dataclass
class _PolicySample:
    mean: np.ndarray
    log_std: np.ndarray
    in_range: np.ndarray
    std: np.ndarray
    noise: np.ndarray
    action: np.ndarray  # tanh(u), normalized units
    logp: np.ndarray  # (B,)


def _squash_log_det(u: np.ndarray) -> np.ndarray:
    """log(1 - tanh(u)^2), stable for large |u|."""
    return 2.0 * (np.log(2.0) - u - np.logaddexp(0.0, -2.0 * u))


@dataclass
class SacAgent:
    obs_dim: int
    action_dim: int
    policy: Mlp
    critic1: Mlp
    critic2: Mlp
    target1: Mlp
    target2: Mlp
    log_alpha: ParamStore
    target_entropy: float
    gamma: float = 0.99
    obs_scale: np.ndarray = field(default_factory=lambda: np.ones(1))
    action_scale: np.ndarray = field(default_factory=lambda: np.ones(1))

    @classmethod
    def create(
        cls,
        obs_dim: int,
        action_dim: int,
        config: SacConfig,
        rng: Rng,
        obs_scale: Optional[np.ndarray] = None,
        action_scale: Optional[np.ndarray] = None,
    ) -> "SacAgent":
        init = rng.fork("init")
        policy_spec = MlpSpec(obs_dim, config.hidden_dims, 2 * action_dim)
        critic_spec = MlpSpec(obs_dim + action_dim, config.hidden_dims, 1)
        critic1 = Mlp.create(critic_spec, init.fork("critic1"))
        critic2 = Mlp.create(critic_spec, init.fork("critic2"))
        log_alpha = ParamStore()
        log_alpha.add("log_alpha", np.array([[config.init_log_alpha]]))
        return cls(
            obs_dim=obs_dim,
            action_dim=action_dim,
            policy=Mlp.create(policy_spec, init.fork("policy")),
            critic1=critic1,
            critic2=critic2,
            target1=critic1.copy(),
            target2=critic2.copy(),
            log_alpha=log_alpha,
            target_entropy=-float(action_dim),
            gamma=config.gamma,
            obs_scale=np.ones(obs_dim) if obs_scale is None else np.asarray(obs_scale, dtype=np.float64),
            action_scale=np.ones(action_dim) if action_scale is None else np.asarray(action_scale, dtype=np.float64),
        )

    @classmethod
    def for_env(cls, env_id: str, config: SacConfig, rng: Rng) -> "SacAgent":
        info = env_info(env_id)
        return cls.create(info.obs_dim, info.action_dim, config, rng, info.obs_scale, info.action_scale)

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha["log_alpha"][0, 0]))

    def normalize_obs(self, obs: np.ndarray) -> np.ndarray:
        return np.atleast_2d(obs) / self.obs_scale

    def normalize_actions(self, actions: np.ndarray) -> np.ndarray:
        return np.atleast_2d(actions) / self.action_scale

    def critic_input(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return np.concatenate([self.normalize_obs(obs), self.normalize_actions(actions)], axis=1)

    def q_min(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """min(Q1, Q2) at env-unit (obs, actions); shape (B,)."""
        x = self.critic_input(obs, actions)
        return np.minimum(self.critic1.forward(x), self.critic2.forward(x))[:, 0]

    def copy(self) -> "SacAgent":
        return replace(
            self,
            policy=self.policy.copy(),
            critic1=self.critic1.copy(),
            critic2=self.critic2.copy(),
            target1=self.target1.copy(),
            target2=self.target2.copy(),
            log_alpha=self.log_alpha.copy(),
        )

    def stores(self) -> Dict[str, ParamStore]:
        return {
            "policy/": self.policy.params,
            "critic1/": self.critic1.params,
            "critic2/": self.critic2.params,
            "target1/": self.target1.params,
            "target2/": self.target2.params,
            "": self.log_alpha,
        }

    def save(self, path: Path) -> Path:
        return save_checkpoint(path, self.stores())

    @classmethod
    def load(cls, path: Path, env_id: str, config: SacConfig) -> "SacAgent":
        agent = cls.for_env(env_id, config, Rng(0))
        stores = load_checkpoint(path, CHECKPOINT_PREFIXES)
        for prefix, store in agent.stores().items():
            loaded = stores.get(prefix)
            if loaded is None or loaded.entries.keys() != store.entries.keys():
                raise ConfigError(f"checkpoint {path} does not match a {env_id} agent", field="agent")
            for name, entry in loaded.entries.items():
                if entry.value.shape != store[name].shape:
                    raise ConfigError(f"checkpoint entry {prefix}{name} has shape {entry.value.shape}", field="agent")
                store.entries[name].value[...] = entry.value
            store.step_count = loaded.step_count
        return agent


def _sample_policy(agent: SacAgent, obs_n: np.ndarray, noise: np.ndarray) -> _PolicySample:
    out = agent.policy.forward(obs_n)
    mean, raw = out[:, :agent.action_dim], out[:, agent.action_dim:]
    log_std = np.clip(raw, LOG_STD_MIN, LOG_STD_MAX)
    std = np.exp(log_std)
    u = mean + std * noise
    action = np.tanh(u)
    logp = (-0.5 * noise**2 - log_std - _HALF_LOG_2PI).sum(axis=1) - _squash_log_det(u).sum(axis=1)
    return _PolicySample(mean, log_std, (raw > LOG_STD_MIN) & (raw < LOG_STD_MAX), std, noise, action, logp)


def act(agent: SacAgent, obs: np.ndarray, deterministic: bool, rng: Rng) -> np.ndarray:
    """One action in env units; components lie strictly inside +-action_scale."""
    obs_n = agent.normalize_obs(obs)
    if deterministic:
        mean = agent.policy.forward(obs_n)[:, :agent.action_dim]
        action = np.tanh(mean)
    else:
        action = _sample_policy(agent, obs_n, rng.gaussian(1, agent.action_dim)).action
    return np.clip(action[0], -ACTION_LIMIT, ACTION_LIMIT) * agent.action_scale


def bootstrap_cut(batch: Batch, config: SacConfig) -> np.ndarray:
    """Rows whose target is the bare reward: terminals and, if biased, every bias_period-th step."""
    cut = batch.terminals.astype(bool).copy()
    if config.biased_td:
        cut |= batch.timesteps % config.bias_period == 0
    return cut


def td_target(
    agent: SacAgent, batch: Batch, config: SacConfig, rng: Rng, alpha: Optional[float] = None
) -> np.ndarray:
    """Soft Bellman targets, shape (B,)."""
    if len(batch) == 0:
        raise ContractViolationError("td_target needs a nonempty batch")
    alpha = agent.alpha if alpha is None else alpha
    next_n = agent.normalize_obs(batch.next_obs)
    nxt = _sample_policy(agent, next_n, rng.gaussian(len(batch), agent.action_dim))
    x = np.concatenate([next_n, nxt.action], axis=1)
    q_next = np.minimum(agent.target1.forward(x), agent.target2.forward(x))[:, 0]
    soft = q_next - alpha * nxt.logp
    rewards = np.asarray(batch.rewards, dtype=np.float64)
    return np.where(bootstrap_cut(batch, config), rewards, rewards + agent.gamma * soft)


def critic_regression(critic: Mlp, x: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared error of ``critic(x)`` to ``targets``; accumulates gradients."""
    q = critic.forward(x)
    diff = q - targets.reshape(-1, 1)
    critic.backward(2.0 * diff / len(diff))
    return float(np.mean(diff**2))


def policy_gradient(
    agent: SacAgent, obs_n: np.ndarray, actions_n: np.ndarray, is_prior: np.ndarray,
    noise: np.ndarray, bc_weight: float,
) -> Tuple[float, float, _PolicySample]:
    """Accumulate policy gradients; returns (policy loss, bc loss, sample)."""
    B, A = len(obs_n), agent.action_dim
    alpha = agent.alpha
    s = _sample_policy(agent, obs_n, noise)

    x = np.concatenate([obs_n, s.action], axis=1)
    q1 = agent.critic1.forward(x)
    q2 = agent.critic2.forward(x)
    use1 = q1 <= q2
    q = np.where(use1, q1, q2)[:, 0]
    policy_loss = float(np.mean(alpha * s.logp - q))

    grad_q1 = agent.critic1.backward(np.where(use1, -1.0 / B, 0.0), accumulate=False)
    grad_q2 = agent.critic2.backward(np.where(use1, 0.0, -1.0 / B), accumulate=False)
    d_action = (grad_q1 + grad_q2)[:, agent.obs_dim:]

    d_u = d_action * (1.0 - s.action**2) + (alpha / B) * 2.0 * s.action
    d_mean = d_u
    d_log_std = (d_u * s.std * s.noise - alpha / B) * s.in_range

    bc_loss = 0.0
    n_prior = int(np.count_nonzero(is_prior))
    if bc_weight > 0.0 and n_prior:
        mean_action = np.tanh(s.mean)
        diff = (mean_action - actions_n) * is_prior[:, None]
        denom = n_prior * A
        bc_loss = bc_weight * float(np.sum(diff**2)) / denom
        d_mean = d_mean + bc_weight * 2.0 * diff * (1.0 - mean_action**2) / denom

    agent.policy.backward(np.concatenate([d_mean, d_log_std], axis=1))
    return policy_loss, bc_loss, s


def sac_update(agent: SacAgent, config: SacConfig, batch: Batch, rng: Rng) -> SacLosses:
    """One gradient step on both critics, the policy and the temperature."""
    if len(batch) != config.batch_size:
        raise ContractViolationError(
            f"batch of {len(batch)} does not match batch_size {config.batch_size}"
        )
    obs_n = agent.normalize_obs(batch.obs)
    actions_n = agent.normalize_actions(batch.actions)
    x = np.concatenate([obs_n, actions_n], axis=1)

    targets = td_target(agent, batch, config, rng)
    critic1_loss = critic_regression(agent.critic1, x, targets)
    agent.critic1.step(config.lr)
    critic2_loss = critic_regression(agent.critic2, x, targets)
    agent.critic2.step(config.lr)

    noise = rng.gaussian(len(batch), agent.action_dim)
    policy_loss, bc_loss, s = policy_gradient(agent, obs_n, actions_n, batch.is_prior, noise, config.bc_weight)
    agent.policy.step(config.lr)

    log_alpha = agent.log_alpha["log_alpha"][0, 0]
    slack = s.logp + agent.target_entropy
    alpha_loss = float(-np.mean(log_alpha * slack))
    agent.log_alpha.grad("log_alpha")[0, 0] += -np.mean(slack)
    adam_step(agent.log_alpha, config.lr)

    agent.target1.params.polyak_from(agent.critic1.params, config.tau)
    agent.target2.params.polyak_from(agent.critic2.params, config.tau)

    return SacLosses(critic1_loss, critic2_loss, policy_loss, alpha_loss, float(-np.mean(s.logp)), bc_loss)


def behavior_cloning_step(agent: SacAgent, config: SacConfig, batch: Batch) -> float:
    """One policy step on the mean-action MSE alone."""
    obs_n = agent.normalize_obs(batch.obs)
    actions_n = agent.normalize_actions(batch.actions)
    out = agent.policy.forward(obs_n)
    mean_action = np.tanh(out[:, :agent.action_dim])
    diff = mean_action - actions_n
    denom = diff.size
    grad = np.zeros_like(out)
    grad[:, :agent.action_dim] = 2.0 * diff * (1.0 - mean_action**2) / denom
    agent.policy.backward(grad)
    agent.policy.step(config.lr)
    return float(np.sum(diff**2) / denom)


def random_action(agent: SacAgent, rng: Rng) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=agent.action_dim) * agent.action_scale


def pretrain_episodic(
    env_spec: EnvSpec,
    steps: int,
    episode_len: int,
    config: SacConfig,
    rng: Rng,
    her_k: int = 0,
    demos: Optional[List[Transition]] = None,
    demo_fraction: float = 0.1,
    demo_bc_weight: float = 1.0,
) -> Tuple[SacAgent, List[Transition]]:
    """Standard episodic SAC in the source variant.

    With ``her_k > 0`` every finished episode also stores ``her_k`` relabeled
    copies of each transition. With ``demos`` a ``demo_fraction`` share of
    every batch is drawn from them and the policy gets a ``demo_bc_weight``
    behavior-cloning term on those rows.

    Returns the trained agent and every environment transition in order;
    timesteps run 1..steps across episodes. Relabeled copies and demos never
    enter the returned stream.
    """
    if env_spec.variant != "source":
        raise ContractViolationError(f"pretraining runs in the source variant, got {env_spec.variant!r}")
    if her_k < 0:
        raise ConfigError("her_k must be >= 0", field="pretrain.her_k")
    if not 0.0 < demo_fraction < 1.0:
        raise ConfigError("demo_fraction must be in (0, 1)", field="pretrain.demo_fraction")
    info = env_info(env_spec.env_id)
    demo_buffer = (
        ReplayBuffer.from_transitions(demos, info.obs_dim, info.action_dim, origin="prior") if demos else None
    )
    config = replace(
        config, biased_td=False, bc_weight=demo_bc_weight if demo_buffer is not None else config.bc_weight
    )
    n_demo = min(config.batch_size - 1, max(1, round(demo_fraction * config.batch_size)))
    agent = SacAgent.for_env(env_spec.env_id, config, rng)
    env = make_env(env_spec, rng.fork("env"))
    act_rng, batch_rng, update_rng = rng.fork("policy"), rng.fork("batch"), rng.fork("update")
    relabel_rng = rng.fork("relabel")
    buffer = ReplayBuffer(max(steps * (1 + her_k), 1), info.obs_dim, info.action_dim, origin="online")
    log_every = get_config().log_every

    logger.info(
        f"Pretraining {env_spec.env_id} for {steps} steps (episode_len={episode_len}, her_k={her_k}, "
        f"demo transitions={len(demo_buffer) if demo_buffer is not None else 0})"
    )
    stream: List[Transition] = []
    episode: List[Transition] = []
    obs, _ = env.reset()
    episodes = successes = 0
    losses: Optional[SacLosses] = None
    for t in range(1, steps + 1):
        if t <= config.warmup_steps:
            action = random_action(agent, act_rng)
        else:
            action = act(agent, obs, False, act_rng)
        next_obs, reward, done, _, _ = env.step(action)
        transition = Transition(obs, action, reward, next_obs, t, done)
        stream.append(transition)
        episode.append(transition)
        buffer.push(transition)

        if t > config.warmup_steps:
            for _ in range(config.updates_per_step):
                if demo_buffer is not None:
                    batch = sample_with_quota(demo_buffer, buffer, config.batch_size, n_demo, batch_rng)
                else:
                    batch = sample_from(buffer, config.batch_size, batch_rng)
                losses = sac_update(agent, config, batch, update_rng)

        if done or len(episode) >= episode_len:
            episodes += 1
            successes += int(done)
            for relabeled in hindsight_relabel(episode, her_k, info, relabel_rng):
                buffer.push(relabeled)
            episode = []
            obs, _ = env.reset()
        else:
            obs = next_obs

        if t % log_every == 0:
            logger.debug(f"pretrain t={t} episodes={episodes} successes={successes} losses={losses}")

    logger.info(f"Pretraining done: {episodes} episodes, {successes} successes")
    return agent, stream


def episode_outcomes(stream: List[Transition], episode_len: int) -> List[bool]:
    """Success flag of every finished episode in a pretraining stream."""
    outcomes: List[bool] = []
    length = 0
    for transition in stream:
        length += 1
        if transition.terminal or length >= episode_len:
            outcomes.append(bool(transition.terminal))
            length = 0
    return outcomes
