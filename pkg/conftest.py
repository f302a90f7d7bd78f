"""Pytest configuration and fixtures for SLRL lab tests."""

import os
import pytest
from unittest.mock import patch


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run full-scale acceptance sweeps")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def setup_test_environment(tmp_path):
    """Automatically set up test environment variables and a fresh LabConfig for all tests."""
    from slrl_lab.config import set_config

    with patch.dict(
        os.environ,
        {
            "SLRL_OUTPUT_DIR": str(tmp_path / "runs"),
            "SLRL_LOG_LEVEL": "DEBUG",
            "SLRL_WORKERS": "1",
            "SLRL_DEFAULT_PAGE_SIZE": "25",
            "SLRL_MAX_PAGE_SIZE": "100",
            "SLRL_LOG_EVERY": "50",
        },
        clear=False,
    ):
        set_config(None)
        yield
        set_config(None)


@pytest.fixture
def output_dir(tmp_path):
    """Output directory matching SLRL_OUTPUT_DIR."""
    path = tmp_path / "runs"
    path.mkdir(parents=True, exist_ok=True)
    return path


@pytest.fixture
def tiny_sac_config():
    """SAC small enough for unit-test lives."""
    from slrl_lab.algos.sac import SacConfig

    return SacConfig(hidden_dims=(16, 16), batch_size=8, warmup_steps=10)


@pytest.fixture
def rng():
    from slrl_lab.core.rng import Rng

    return Rng(1234)


@pytest.fixture
def tiny_pointmass_dataset():
    """40 transitions moving right along y = 0, never reaching the goal."""
    import numpy as np

    from slrl_lab.replay.buffer import Transition
    from slrl_lab.replay.dataset import make_dataset

    records = []
    x, y = 50.0, 0.0
    for t in range(1, 41):
        obs = np.array([x, y, 0.0, 0.0, 100.0, 0.0])
        action = np.array([1.0, 0.0])
        x += 1.0
        next_obs = np.array([x, y, 1.0, 0.0, 100.0, 0.0])
        records.append(Transition(obs, action, 0.0, next_obs, t, False))
    return make_dataset("pointmass", "source", 6, 2, records)
