"""Experiment configuration: one JSON file plus ``--set key=value`` overrides."""

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from ..algos.sac import SacConfig
from ..algos.shaping import ShapingConfig
from ..config import get_config
from ..envs.base import ENV_IDS, VARIANTS
from ..exceptions import ConfigError
from ..runner.prior import PRIOR_SOURCES, PretrainConfig
from ..runner.single_life import METHODS, MethodConfig
from ..utils.validation import as_float, as_int

_SECTIONS = {"sac": SacConfig, "shaping": ShapingConfig, "pretrain": PretrainConfig}
_SEED_MAX = 2**64 - 1


def parse_seeds(text: str) -> List[int]:
    """``"0..9"`` (inclusive) or ``"1,4,7"``; both forms may be mixed."""
    seeds: List[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
                if hi < lo:
                    raise ConfigError(f"Empty seed range {part!r}", field="seeds")
                seeds.extend(range(lo, hi + 1))
            else:
                seeds.append(int(part))
        except ValueError as e:
            raise ConfigError(f"Invalid seed spec {part!r}", field="seeds") from e
    return seeds


def parse_methods(text: str) -> List[str]:
    return [m.strip() for m in str(text).split(",") if m.strip()]


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


@dataclass
class ExperimentConfig:
    env: str = "pointmass"
    target_variant: str = "target"
    methods: List[str] = field(default_factory=lambda: ["qwale", "sac_ft"])
    seeds: List[int] = field(default_factory=lambda: [0])
    budget: int = 200_000
    prior_source: str = "rl_last_k"
    output_dir: Optional[str] = None  # None: LabConfig.output_dir
    bc_weight: float = 1.0
    bc_steps: int = 5000
    sac: SacConfig = field(default_factory=SacConfig)
    shaping: ShapingConfig = field(default_factory=ShapingConfig)
    pretrain: PretrainConfig = field(default_factory=PretrainConfig)

    def __post_init__(self):
        if self.env not in ENV_IDS:
            raise ConfigError(f"Unknown env {self.env!r}", field="env")
        if self.target_variant not in VARIANTS:
            raise ConfigError(f"Unknown variant {self.target_variant!r}", field="target_variant")
        if self.prior_source not in PRIOR_SOURCES:
            raise ConfigError(f"Unknown prior source {self.prior_source!r}", field="prior_source")
        self.methods = list(self.methods)
        if not self.methods:
            raise ConfigError("methods must be nonempty", field="methods")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(f"Unknown method {method!r}", field="methods")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods must be distinct", field="methods")
        self.seeds = [as_int(s, "seeds") for s in self.seeds]
        if not self.seeds:
            raise ConfigError("seeds must be nonempty", field="seeds")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct", field="seeds")
        if any(not 0 <= s <= _SEED_MAX for s in self.seeds):
            raise ConfigError("seeds must be unsigned 64-bit integers", field="seeds")
        self.budget = as_int(self.budget, "budget")
        self.bc_weight = as_float(self.bc_weight, "bc_weight")
        self.bc_steps = as_int(self.bc_steps, "bc_steps")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1", field="budget")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        kwargs: Dict[str, Any] = {}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"Unknown config key {key!r}", field=key)
            if key in _SECTIONS:
                kwargs[key] = _build_section(key, value)
            else:
                kwargs[key] = value
        try:
            return cls(**kwargs)
        except TypeError as e:
            raise ConfigError(f"Invalid config value: {e}") from e

    @classmethod
    def load(cls, path: Optional[Path] = None, overrides: Iterable[str] = ()) -> "ExperimentConfig":
        """Read ``path`` (if any) and apply dotted ``key=value`` overrides in order."""
        data: Dict[str, Any] = {}
        if path is not None:
            path = Path(path)
            try:
                data = json.loads(path.read_text())
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: invalid JSON: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"{path}: top level must be an object")
        for override in overrides:
            apply_override(data, override)
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        for section in _SECTIONS:
            for key, value in out[section].items():
                if isinstance(value, tuple):
                    out[section][key] = list(value)
        return out

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir) if self.output_dir else get_config().output_dir

    def method_config(self, method: str, seed: int) -> MethodConfig:
        return MethodConfig.for_method(
            method,
            self.prior_source,
            budget=self.budget,
            seed=seed,
            bc_weight=self.bc_weight,
            bc_steps=self.bc_steps,
        )

    def with_updates(self, **changes: Any) -> "ExperimentConfig":
        """Copy with top-level fields replaced; ``None`` values are ignored."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _build_section(name: str, value: Any):
    section_cls = _SECTIONS[name]
    if not isinstance(value, dict):
        raise ConfigError(f"Section {name!r} must be an object", field=name)
    known = {f.name for f in fields(section_cls)}
    for key in value:
        if key not in known:
            raise ConfigError(f"Unknown config key {name}.{key}", field=f"{name}.{key}")
    try:
        return section_cls(**value)
    except TypeError as e:
        raise ConfigError(f"Invalid {name} section: {e}", field=name) from e


def apply_override(data: Dict[str, Any], override: str) -> Dict[str, Any]:
    """Apply ``a.b=value`` to a raw config dict; value is parsed as JSON, else kept as a string."""
    key, sep, raw = override.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"Override {override!r} is not of the form key=value")
    parts: Tuple[str, ...] = tuple(key.split("."))
    if len(parts) > 2 or (len(parts) == 2 and parts[0] not in _SECTIONS):
        raise ConfigError(f"Unknown config key {key!r}", field=key)
    known = {f.name for f in fields(_SECTIONS[parts[0]] if len(parts) == 2 else ExperimentConfig)}
    if parts[-1] not in known:
        raise ConfigError(f"Unknown config key {key!r}", field=key)

    value = _parse_value(raw)
    if len(parts) == 2:
        section = data.setdefault(parts[0], {})
        if not isinstance(section, dict):
            raise ConfigError(f"Section {parts[0]!r} must be an object", field=parts[0])
        section[parts[1]] = value
    elif parts[0] == "seeds" and isinstance(value, str):
        data["seeds"] = parse_seeds(value)
    elif parts[0] == "methods" and isinstance(value, str):
        data["methods"] = parse_methods(value)
    elif parts[0] in _SECTIONS:
        raise ConfigError(f"Override a field of {parts[0]!r}, not the whole section", field=key)
    else:
        data[parts[0]] = value
    return data
