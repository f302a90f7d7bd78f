"""Lab information tool for the SLRL lab MCP server."""

from typing import Any, Dict

from .. import __version__
from ..algos.shaping import SHAPING_MODES
from ..config import get_config
from ..envs.base import ENV_INFO
from ..mcp_instance import mcp
from ..runner.prior import PRIOR_SOURCES
from ..runner.single_life import METHOD_SHAPING
from ..utils.logging import get_logger

logger = get_logger(__name__)


@mcp.tool()
async def get_lab_info() -> Dict[str, Any]:
    """
    Get the lab's environments, methods, shaping modes and active settings.
    Useful before calling the other tools.

    Returns:
        Lab information
    """
    try:
        config = get_config()
        return {
            "version": __version__,
            "envs": {
                env_id: {
                    "obs_dim": info.obs_dim,
                    "action_dim": info.action_dim,
                    "demo_count": info.demo_count,
                }
                for env_id, info in ENV_INFO.items()
            },
            "methods": dict(METHOD_SHAPING),
            "shaping_modes": list(SHAPING_MODES),
            "prior_sources": list(PRIOR_SOURCES),
            "config": {
                "output_dir": str(config.output_dir),
                "log_level": config.log_level,
                "workers": config.workers,
                "default_page_size": config.default_page_size,
                "max_page_size": config.max_page_size,
            },
        }

    except Exception as e:
        logger.error(f"Error getting lab info: {e}")
        return {"error": f"Failed to get lab info: {e}", "error_type": "unknown"}
