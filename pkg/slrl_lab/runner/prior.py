"""Source-domain pretraining and prior-data extraction."""

from dataclasses import dataclass
from typing import Literal, Optional, Tuple

from ..algos.sac import SacAgent, SacConfig, pretrain_episodic
from ..algos.shaping import FrozenCritic
from ..core.rng import Rng
from ..envs import EnvSpec, env_info
from ..envs.demos import scripted_demos
from ..exceptions import ConfigError
from ..replay.dataset import DatasetFile, make_dataset, take_last_k
from ..utils.logging import get_logger
from ..utils.validation import as_bool, as_float, as_int

logger = get_logger(__name__)

PriorSource = Literal["rl_last_k", "demos"]
PRIOR_SOURCES: Tuple[str, ...] = ("rl_last_k", "demos")

DEFAULT_PRETRAIN_STEPS = {"pointmass": 60_000, "tabletop": 100_000}


@dataclass
class PretrainConfig:
    steps: Optional[int] = None  # None: per-env default
    prior_k: int = 50_000
    episode_len: int = 200
    her_k: int = 4  # relabeled copies per transition; 0 turns relabeling off
    demo_seed: bool = True  # mix scripted demos into pretraining batches
    demo_fraction: float = 0.1
    demo_bc_weight: float = 1.0

    def __post_init__(self):
        if self.steps is not None:
            self.steps = as_int(self.steps, "pretrain.steps")
        self.prior_k = as_int(self.prior_k, "pretrain.prior_k")
        self.episode_len = as_int(self.episode_len, "pretrain.episode_len")
        self.her_k = as_int(self.her_k, "pretrain.her_k")
        self.demo_seed = as_bool(self.demo_seed, "pretrain.demo_seed")
        self.demo_fraction = as_float(self.demo_fraction, "pretrain.demo_fraction")
        self.demo_bc_weight = as_float(self.demo_bc_weight, "pretrain.demo_bc_weight")
        if self.her_k < 0:
            raise ConfigError("pretrain.her_k must be >= 0", field="pretrain.her_k")
        if not 0.0 < self.demo_fraction < 1.0:
            raise ConfigError("pretrain.demo_fraction must be in (0, 1)", field="pretrain.demo_fraction")
        if self.demo_bc_weight < 0.0:
            raise ConfigError("pretrain.demo_bc_weight must be >= 0", field="pretrain.demo_bc_weight")
        if self.steps is not None and self.steps < 0:
            raise ConfigError("pretrain.steps must be >= 0", field="pretrain.steps")
        if self.prior_k < 0:
            raise ConfigError("pretrain.prior_k must be >= 0", field="pretrain.prior_k")
        if self.episode_len < 1:
            raise ConfigError("pretrain.episode_len must be >= 1", field="pretrain.episode_len")

    def steps_for(self, env_id: str) -> int:
        return DEFAULT_PRETRAIN_STEPS[env_id] if self.steps is None else self.steps


@dataclass
class PriorBundle:
    dataset: DatasetFile
    agent: Optional[SacAgent]  # warm start; None for demo priors
    frozen_q: FrozenCritic  # source critic, always available for qwale


def build_prior(
    env_spec: EnvSpec,
    prior_source: str,
    rng: Rng,
    pretrain: Optional[PretrainConfig] = None,
    sac_config: Optional[SacConfig] = None,
) -> PriorBundle:
    """Pretrain in the source MDP and extract the prior data.

    ``rl_last_k`` keeps the tail of the pretraining stream and returns the
    agent for warm starts; ``demos`` uses scripted demonstrations and keeps
    only the pretrained critic (as the frozen Q).
    """
    if prior_source not in PRIOR_SOURCES:
        raise ConfigError(f"Unknown prior source {prior_source!r}", field="prior_source")
    pretrain = pretrain or PretrainConfig()
    sac_config = sac_config or SacConfig()
    source = env_spec.with_variant("source")
    info = env_info(env_spec.env_id)

    demos = None
    if pretrain.demo_seed or prior_source == "demos":
        demos = scripted_demos(source, info.demo_count, rng.fork("demos"))

    steps = pretrain.steps_for(env_spec.env_id)
    agent, stream = pretrain_episodic(
        source, steps, pretrain.episode_len, sac_config, rng.fork("pretrain"),
        her_k=pretrain.her_k,
        demos=[t for demo in demos for t in demo] if demos and pretrain.demo_seed else None,
        demo_fraction=pretrain.demo_fraction,
        demo_bc_weight=pretrain.demo_bc_weight,
    )
    frozen_q = FrozenCritic.from_agent(agent)

    if prior_source == "rl_last_k":
        k = min(pretrain.prior_k, len(stream))
        if k < pretrain.prior_k:
            logger.warning(f"Pretraining produced {len(stream)} transitions; keeping all of them")
        dataset = take_last_k(
            stream, k, env_id=env_spec.env_id, variant="source",
            obs_dim=info.obs_dim, action_dim=info.action_dim,
        )
        logger.info(f"Prior for {env_spec.env_id}: last {k} of {len(stream)} pretraining transitions")
        return PriorBundle(dataset, agent, frozen_q)

    records = [t for demo in demos for t in demo]
    dataset = make_dataset(env_spec.env_id, "source", info.obs_dim, info.action_dim, records)
    logger.info(f"Prior for {env_spec.env_id}: {len(demos)} scripted demos, {len(records)} transitions")
    return PriorBundle(dataset, None, frozen_q)
