"""State-visitation plots from trace CSVs."""

from pathlib import Path
from typing import Literal, Optional

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import pyplot as plt
from matplotlib.colors import LinearSegmentedColormap

from ..envs.base import ENV_INFO
from ..exceptions import ConfigError
from ..replay.dataset import DatasetFile
from ..runner.records import TraceTable
from ..utils.logging import get_logger

logger = get_logger(__name__)

ColorBy = Literal["timestep", "reward"]
COLOR_BY = ("timestep", "reward")

GRADIENT = LinearSegmentedColormap.from_list("green_blue", ["green", "blue"])
PRIOR_COLOR = "purple"
SVG_HASH_SALT = "slrl-visitation"  # fixed element ids across renders


def env_for_obs_dim(obs_dim: int) -> str:
    for env_id, info in ENV_INFO.items():
        if info.obs_dim == obs_dim:
            return env_id
    raise ConfigError(f"No env has obs_dim {obs_dim}", field="env")


def gradient_positions(values: np.ndarray) -> np.ndarray:
    """Map values linearly onto [0, 1]; a constant series maps to 0."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 0.0:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def project(obs: np.ndarray, env_id: str, mirror_x: bool = False) -> np.ndarray:
    cx, cy = ENV_INFO[env_id].projection
    points = np.atleast_2d(obs)[:, [cx, cy]].astype(np.float64)
    if mirror_x:
        points[:, 0] = -points[:, 0]
    return points


def build_visitation_figure(
    trace: TraceTable,
    color_by: ColorBy = "timestep",
    env_id: Optional[str] = None,
    prior: Optional[DatasetFile] = None,
    mirror_x: bool = False,
):
    """Figure with the visited path, markers colored green -> blue.

    Returns ``(fig, ax)``; the first scatter collection is the trace, the
    optional second one the prior overlay.
    """
    if color_by not in COLOR_BY:
        raise ConfigError(f"color_by must be one of {COLOR_BY}", field="color_by")
    env_id = env_id or env_for_obs_dim(trace.obs.shape[1])
    points = project(trace.obs, env_id, mirror_x)
    quantity = trace.steps if color_by == "timestep" else trace.r_shaped
    colors = GRADIENT(gradient_positions(quantity))

    fig, ax = plt.subplots(figsize=(6, 5))
    ax.scatter(points[:, 0], points[:, 1], c=colors, s=12, zorder=3)
    if len(points) > 1:
        ax.plot(points[:, 0], points[:, 1], color="gray", linewidth=0.6, alpha=0.5, zorder=2)
    if prior is not None and len(prior):
        prior_points = project(np.stack([t.obs for t in prior.records]), env_id, mirror_x)
        ax.scatter(prior_points[:, 0], prior_points[:, 1], color=PRIOR_COLOR, s=6, alpha=0.4, zorder=1)

    ax.set_xlabel("x - position")
    ax.set_ylabel("y - position")
    ax.set_title(f"{env_id} visitation ({color_by})")
    fig.tight_layout()
    return fig, ax


def render_visitation(
    trace: TraceTable,
    color_by: ColorBy,
    out: Path,
    env_id: Optional[str] = None,
    prior: Optional[DatasetFile] = None,
    mirror_x: bool = False,
) -> Path:
    """Write the visitation plot as SVG."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig, _ = build_visitation_figure(trace, color_by, env_id, prior, mirror_x)
    try:
        with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
            fig.savefig(out, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    logger.info(f"Wrote {out} ({len(trace)} points, color_by={color_by})")
    return out
