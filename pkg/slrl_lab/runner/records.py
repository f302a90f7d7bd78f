"""Run records and per-step trace CSVs."""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from ..exceptions import RunNotFoundError, TraceParseError

TRACE_TAIL = ("r_ext", "r_shaped", "d_score")


@dataclass
class TraceRow:
    obs: np.ndarray
    action: np.ndarray
    r_ext: float
    r_shaped: float
    d_score: float  # nan when the method has no discriminator


@dataclass
class RunRecord:
    env_id: str
    method: str
    seed: int
    budget: int
    completion_step: int
    success: bool
    trace: List[TraceRow] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)
    wall_clock_seconds: float = 0.0
    updates_applied: int = 0
    trace_path: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "env_id": self.env_id,
            "method": self.method,
            "seed": self.seed,
            "budget": self.budget,
            "completion_step": self.completion_step,
            "success": self.success,
            "updates_applied": self.updates_applied,
            "wall_clock_seconds": self.wall_clock_seconds,
            "config": self.config,
            "trace_path": self.trace_path,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecord":
        return cls(
            env_id=data["env_id"],
            method=data["method"],
            seed=int(data["seed"]),
            budget=int(data["budget"]),
            completion_step=int(data["completion_step"]),
            success=bool(data["success"]),
            config=data.get("config", {}),
            wall_clock_seconds=float(data.get("wall_clock_seconds", 0.0)),
            updates_applied=int(data.get("updates_applied", 0)),
            trace_path=data.get("trace_path"),
        )


def run_paths(output_dir: Path, env_id: str, method: str, seed: int) -> tuple[Path, Path]:
    base = Path(output_dir) / env_id / method
    return base / f"seed{seed}.json", base / f"seed{seed}.trace.csv"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_trace(path: Path, rows: List[TraceRow]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    obs_dim = len(rows[0].obs) if rows else 0
    action_dim = len(rows[0].action) if rows else 0
    header = (
        ["step"]
        + [f"obs_{i}" for i in range(obs_dim)]
        + [f"action_{i}" for i in range(action_dim)]
        + list(TRACE_TAIL)
    )
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for step, row in enumerate(rows, start=1):
            writer.writerow(
                [step]
                + [_fmt(v) for v in row.obs]
                + [_fmt(v) for v in row.action]
                + [_fmt(row.r_ext), _fmt(row.r_shaped), _fmt(row.d_score)]
            )
    return path


@dataclass
class TraceTable:
    steps: np.ndarray
    obs: np.ndarray
    actions: np.ndarray
    r_ext: np.ndarray
    r_shaped: np.ndarray
    d_score: np.ndarray

    def __len__(self) -> int:
        return len(self.steps)


def read_trace(path: Path) -> TraceTable:
    """Parse a trace CSV; errors name the 1-based file line."""
    path = Path(path)
    name = str(path)
    with path.open(newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise TraceParseError(name, 1, "empty trace")
    header = rows[0]
    if not header or header[0] != "step" or tuple(header[-3:]) != TRACE_TAIL:
        raise TraceParseError(name, 1, f"unexpected header {header}")
    obs_dim = sum(1 for h in header if h.startswith("obs_"))
    action_dim = sum(1 for h in header if h.startswith("action_"))

    values = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise TraceParseError(name, line, f"expected {len(header)} fields, got {len(row)}")
        try:
            values.append([float(v) for v in row])
        except ValueError as e:
            raise TraceParseError(name, line, str(e)) from e
    if not values:
        raise TraceParseError(name, 2, "trace has no rows")

    data = np.array(values)
    a0 = 1 + obs_dim
    return TraceTable(
        steps=data[:, 0].astype(np.int64),
        obs=data[:, 1:a0],
        actions=data[:, a0:a0 + action_dim],
        r_ext=data[:, -3],
        r_shaped=data[:, -2],
        d_score=data[:, -1],
    )


def save_run_record(record: RunRecord, output_dir: Path) -> Path:
    record_path, trace_path = run_paths(output_dir, record.env_id, record.method, record.seed)
    write_trace(trace_path, record.trace)
    record.trace_path = str(trace_path)
    record_path.parent.mkdir(parents=True, exist_ok=True)
    record_path.write_text(json.dumps(record.to_dict(), indent=2, sort_keys=True))
    return record_path


def load_run_record(output_dir: Path, env_id: str, method: str, seed: int) -> RunRecord:
    record_path, _ = run_paths(output_dir, env_id, method, seed)
    if not record_path.exists():
        raise RunNotFoundError(env_id, method, seed, {"path": str(record_path)})
    return RunRecord.from_dict(json.loads(record_path.read_text()))


def list_run_records(output_dir: Path, env_id: Optional[str] = None, method: Optional[str] = None) -> List[RunRecord]:
    """Every saved record under ``output_dir``, sorted by (env, method, seed)."""
    root = Path(output_dir)
    pattern = f"{env_id or '*'}/{method or '*'}/seed*.json"
    records = [RunRecord.from_dict(json.loads(p.read_text())) for p in root.glob(pattern)]
    return sorted(records, key=lambda r: (r.env_id, r.method, r.seed))
