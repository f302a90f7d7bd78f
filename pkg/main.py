#!/usr/bin/env python3
"""
SLRL Lab MCP Server

A Model Context Protocol (MCP) server over the single-life RL lab.
Provides paginated access to saved runs, aggregate reports and single-life deployments.
"""

from slrl_lab.config import get_config
from slrl_lab.mcp_instance import mcp
from slrl_lab.tools import register_all_tools
from slrl_lab.utils.logging import get_logger

# Register all tools at import time
register_all_tools()

logger = get_logger(__name__)


def validate_environment():
    """Validate the output directory is usable."""
    output_dir = get_config().output_dir
    if output_dir.exists() and not output_dir.is_dir():
        error_msg = f"SLRL_OUTPUT_DIR is not a directory: {output_dir}"
        logger.error(error_msg)
        raise ValueError(error_msg)


# Validate environment when module is imported
validate_environment()

# Export the mcp instance for FastMCP CLI
__all__ = ["mcp"]
