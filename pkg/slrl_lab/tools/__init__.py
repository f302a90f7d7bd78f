"""Tools module for the SLRL lab MCP server."""

from ..utils.logging import get_logger

logger = get_logger(__name__)


def register_all_tools():
    """Register all MCP tools by importing the modules."""
    logger.info("Registering all tool modules")

    # Import all tool modules to register their @mcp.tool() decorators
    from . import experiments, runs, system

    logger.debug("Imported run, experiment and system tools")
    return (runs, experiments, system)
