"""Prior datasets: extraction and ``.slrl.jsonl`` persistence.

Line 1 is a JSON header; every following line is one record::

    {"format_version":1,"env_id":"pointmass","variant":"source","obs_dim":6,"action_dim":2,"count":50000}
    {"o":[...],"a":[...],"r":0.0,"o2":[...],"t":12345,"d":false}
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Sequence

import numpy as np

from ..exceptions import ContractViolationError, DatasetParseError
from .buffer import ReplayBuffer, Transition

FORMAT_VERSION = 1
DATASET_SUFFIX = ".slrl.jsonl"


@dataclass(frozen=True)
class DatasetHeader:
    env_id: str
    variant: str
    obs_dim: int
    action_dim: int
    format_version: int = FORMAT_VERSION
    count: int = 0


@dataclass
class DatasetFile:
    header: DatasetHeader
    records: List[Transition] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def to_buffer(self) -> ReplayBuffer:
        return ReplayBuffer.from_transitions(
            self.records, self.header.obs_dim, self.header.action_dim, origin="prior"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, DatasetFile) or self.header != other.header:
            return False
        return len(self.records) == len(other.records) and all(
            _same_transition(a, b) for a, b in zip(self.records, other.records)
        )


def _same_transition(a: Transition, b: Transition) -> bool:
    return (
        np.array_equal(a.obs, b.obs)
        and np.array_equal(a.action, b.action)
        and a.reward == b.reward
        and np.array_equal(a.next_obs, b.next_obs)
        and a.timestep == b.timestep
        and a.terminal == b.terminal
    )


def make_dataset(env_id: str, variant: str, obs_dim: int, action_dim: int, records: Sequence[Transition]) -> DatasetFile:
    records = list(records)
    header = DatasetHeader(env_id, variant, obs_dim, action_dim, FORMAT_VERSION, len(records))
    return DatasetFile(header, records)


def take_last_k(
    stream: Sequence[Transition], k: int, *, env_id: str, variant: str, obs_dim: int, action_dim: int
) -> DatasetFile:
    """The final ``k`` transitions of ``stream``, order preserved."""
    if k < 0 or len(stream) < k:
        raise ContractViolationError(
            f"stream has {len(stream)} transitions, cannot take the last {k}",
            {"stream_length": len(stream), "k": k},
        )
    tail = list(stream[len(stream) - k:]) if k else []
    return make_dataset(env_id, variant, obs_dim, action_dim, tail)


def _record(t: Transition) -> dict:
    return {
        "o": [float(x) for x in t.obs],
        "a": [float(x) for x in t.action],
        "r": float(t.reward),
        "o2": [float(x) for x in t.next_obs],
        "t": int(t.timestep),
        "d": bool(t.terminal),
    }


def save_dataset(dataset: DatasetFile, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = asdict(dataset.header)
    header["count"] = len(dataset.records)
    with path.open("w") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for t in dataset.records:
            f.write(json.dumps(_record(t)) + "\n")
    return path


def _parse_header(raw: str, path: str) -> DatasetHeader:
    try:
        data = json.loads(raw)
        header = DatasetHeader(
            env_id=str(data["env_id"]),
            variant=str(data["variant"]),
            obs_dim=int(data["obs_dim"]),
            action_dim=int(data["action_dim"]),
            format_version=int(data["format_version"]),
            count=int(data["count"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise DatasetParseError(path, 1, f"malformed header: {e}") from e
    if header.format_version != FORMAT_VERSION:
        raise DatasetParseError(path, 1, f"unsupported format_version {header.format_version}")
    return header


def _parse_record(raw: str, header: DatasetHeader, path: str, line_number: int) -> Transition:
    try:
        data = json.loads(raw)
        t = Transition(
            obs=np.array(data["o"], dtype=np.float64),
            action=np.array(data["a"], dtype=np.float64),
            reward=float(data["r"]),
            next_obs=np.array(data["o2"], dtype=np.float64),
            timestep=int(data["t"]),
            terminal=bool(data["d"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise DatasetParseError(path, line_number, f"malformed record: {e}") from e
    if t.obs.shape != (header.obs_dim,) or t.next_obs.shape != (header.obs_dim,):
        raise DatasetParseError(path, line_number, f"observation length does not match obs_dim {header.obs_dim}")
    if t.action.shape != (header.action_dim,):
        raise DatasetParseError(path, line_number, f"action length does not match action_dim {header.action_dim}")
    return t


def load_dataset(path: Path) -> DatasetFile:
    path = Path(path)
    name = str(path)
    with path.open() as f:
        lines = f.read().splitlines()
    if not lines:
        raise DatasetParseError(name, 1, "missing header")
    header = _parse_header(lines[0], name)
    records = [
        _parse_record(raw, header, name, i)
        for i, raw in enumerate(lines[1:], start=2)
        if raw.strip()
    ]
    if len(records) != header.count:
        raise DatasetParseError(name, len(lines), f"header count {header.count} != {len(records)} records")
    return DatasetFile(header, records)
