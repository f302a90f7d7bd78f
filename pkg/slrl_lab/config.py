"""Configuration management for the SLRL lab."""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


def _default_workers() -> int:
    return max(1, (os.cpu_count() or 2) - 1)


@dataclass
class LabConfig:
    """Process-level settings shared by the CLI and the MCP server."""

    output_dir: Path = Path("runs")
    log_level: str = "INFO"
    workers: int = field(default_factory=_default_workers)
    default_page_size: int = 25
    max_page_size: int = 100
    log_every: int = 5000  # env steps between DEBUG loss lines

    def __post_init__(self):
        """Validate configuration after initialization."""
        self.output_dir = Path(self.output_dir)
        self._validate_log_level()
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if not 1 <= self.default_page_size <= self.max_page_size:
            raise ValueError(
                f"default_page_size must be between 1 and {self.max_page_size}"
            )
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")

    def _validate_log_level(self):
        """Validate the log level names a stdlib logging level."""
        if not isinstance(logging.getLevelName(self.log_level), int):
            raise ValueError(
                f"Invalid log level: {self.log_level}. "
                "Expected one of DEBUG, INFO, WARNING, ERROR"
            )

    @classmethod
    def from_env(cls) -> "LabConfig":
        """Create configuration from environment variables."""
        workers = os.getenv("SLRL_WORKERS")
        return cls(
            output_dir=Path(os.getenv("SLRL_OUTPUT_DIR", "runs")),
            log_level=os.getenv("SLRL_LOG_LEVEL", "INFO").upper(),
            workers=int(workers) if workers else _default_workers(),
            default_page_size=int(os.getenv("SLRL_DEFAULT_PAGE_SIZE", "25")),
            max_page_size=int(os.getenv("SLRL_MAX_PAGE_SIZE", "100")),
            log_every=int(os.getenv("SLRL_LOG_EVERY", "5000")),
        )


# Global configuration instance
_config: Optional[LabConfig] = None


def get_config() -> LabConfig:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = LabConfig.from_env()
    return _config


def set_config(config: Optional[LabConfig]) -> None:
    """Set the global configuration instance (mainly for testing)."""
    global _config
    _config = config
