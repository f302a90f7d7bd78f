"""Custom exceptions for the SLRL lab."""

from typing import Any, Dict, Optional


class SlrlError(Exception):
    """Base exception for SLRL lab errors."""

    def __init__(
        self,
        message: str,
        error_type: str = "unknown",
        suggested_action: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.error_type = error_type
        self.suggested_action = suggested_action
        self.details = details or {}
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for tool responses."""
        result = {
            "error": self.message,
            "error_type": self.error_type,
        }

        if self.suggested_action:
            result["suggested_action"] = self.suggested_action

        if self.details:
            result["details"] = self.details

        return result


class ContractViolationError(SlrlError):
    """Raised when an operation is called outside its preconditions."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            error_type="contract",
            suggested_action="Check shapes and arguments passed to the operation",
            details=details,
        )


class NumericalError(SlrlError):
    """Raised when a network operation produces non-finite values."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            error_type="numerical",
            suggested_action="Lower the learning rate or check input magnitudes",
            details=details,
        )


class ConfigError(SlrlError):
    """Raised when an experiment or method configuration is invalid."""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(
            message=message,
            error_type="config",
            suggested_action="Check the config file and --set overrides",
            details={"field": field, **(details or {})} if field else details,
        )
        self.field = field


class DatasetParseError(SlrlError):
    """Raised when a dataset or checkpoint file cannot be parsed."""

    def __init__(self, path: str, line_number: int, reason: str):
        super().__init__(
            message=f"{path}:{line_number}: {reason}",
            error_type="dataset_parse",
            suggested_action="Regenerate the file with the `pretrain` or `demo-gen` subcommand",
            details={"path": path, "line_number": line_number},
        )
        self.path = path
        self.line_number = line_number


class TraceParseError(SlrlError):
    """Raised when a per-step trace CSV cannot be parsed."""

    def __init__(self, path: str, row: int, reason: str):
        super().__init__(
            message=f"{path}: row {row}: {reason}",
            error_type="trace_parse",
            suggested_action="Point `plot` at a trace written by `deploy` or `sweep`",
            details={"path": path, "row": row},
        )
        self.path = path
        self.row = row


class DemoGenerationError(SlrlError):
    """Raised when a scripted controller fails to complete the task."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            error_type="demo_generation",
            suggested_action="Demos are only defined for the source variant",
            details=details,
        )


class DegenerateQError(SlrlError):
    """Raised when the prior Q range is too narrow to normalize."""

    def __init__(self, q_min: float, q_max: float):
        super().__init__(
            message=f"Degenerate Q range: q_min={q_min!r}, q_max={q_max!r}",
            error_type="degenerate_q",
            suggested_action="Pretrain the critic longer or use gail_s",
            details={"q_min": q_min, "q_max": q_max},
        )


class RunNotFoundError(SlrlError):
    """Raised when a requested run record does not exist."""

    def __init__(
        self,
        env_id: str,
        method: str,
        seed: int,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(
            message=f"Run {env_id}/{method}/seed{seed} not found",
            error_type="not_found",
            suggested_action="Run `deploy` or `sweep` first, or check the output directory",
            details={
                "env_id": env_id,
                "method": method,
                "seed": seed,
                **(details or {}),
            },
        )
