"""Per-method completion statistics over seeds."""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from ..exceptions import ContractViolationError
from ..runner.records import RunRecord

TABLE_HEADER = ("Method", "Avg ± Std error", "Success / n", "Median")


@dataclass
class AggregateRow:
    method: str
    n: int
    mean: float
    stderr: float
    median: float
    success_count: int
    budget: int

    def cells(self) -> List[str]:
        return [
            self.method,
            f"{_k(self.mean)} ± {_k(self.stderr)}",
            f"{self.success_count} / {self.n}",
            _k(self.median),
        ]


@dataclass
class AggregateReport:
    env_id: str
    rows: List[AggregateRow] = field(default_factory=list)

    def row(self, method: str) -> AggregateRow:
        for row in self.rows:
            if row.method == method:
                return row
        raise KeyError(method)

    def to_dict(self) -> Dict[str, Any]:
        return {"env_id": self.env_id, "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AggregateReport":
        return cls(data["env_id"], [AggregateRow(**r) for r in data.get("rows", [])])

    def format_table(self) -> str:
        """Aligned text table: method, mean ± stderr, successes, median."""
        lines = [list(TABLE_HEADER)] + [r.cells() for r in self.rows]
        widths = [max(len(line[i]) for line in lines) for i in range(len(TABLE_HEADER))]
        out = [f"{self.env_id}"]
        for i, line in enumerate(lines):
            out.append(" | ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
            if i == 0:
                out.append("-+-".join("-" * w for w in widths))
        return "\n".join(out) + "\n"


def _k(steps: float) -> str:
    return f"{steps / 1000:.1f}k"


def completion_steps(records: Sequence[RunRecord]) -> np.ndarray:
    """Step counts with failures logged at the budget."""
    return np.array([r.completion_step if r.success else r.budget for r in records], dtype=np.float64)


def aggregate_method(records: Sequence[RunRecord]) -> AggregateRow:
    if not records:
        raise ContractViolationError("aggregate needs at least one record")
    methods = {r.method for r in records}
    if len(methods) != 1:
        raise ContractViolationError(f"aggregate_method got several methods: {sorted(methods)}")
    steps = completion_steps(records)
    n = len(steps)
    stderr = float(np.std(steps, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return AggregateRow(
        method=records[0].method,
        n=n,
        mean=float(np.mean(steps)),
        stderr=stderr,
        median=float(np.median(steps)),
        success_count=sum(1 for r in records if r.success),
        budget=max(r.budget for r in records),
    )


def aggregate(records: Sequence[RunRecord]) -> AggregateReport:
    """One row per method, in order of first appearance."""
    if not records:
        raise ContractViolationError("aggregate needs at least one record")
    envs = {r.env_id for r in records}
    if len(envs) != 1:
        raise ContractViolationError(f"aggregate got records from several envs: {sorted(envs)}")
    by_method: Dict[str, List[RunRecord]] = {}
    for record in records:
        by_method.setdefault(record.method, []).append(record)
    return AggregateReport(records[0].env_id, [aggregate_method(rs) for rs in by_method.values()])
