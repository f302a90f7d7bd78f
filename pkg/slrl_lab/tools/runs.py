"""Run-record tools for the SLRL lab MCP server."""

from typing import Any, Dict, Optional
from typing_extensions import Annotated
from pydantic.fields import Field

from ..config import get_config
from ..evalcli.aggregate import aggregate
from ..evalcli.sweep import load_report
from ..exceptions import SlrlError
from ..mcp_instance import mcp
from ..runner.records import list_run_records, load_run_record
from ..utils.logging import get_logger
from ..utils.pagination import PaginationError, paginate, parse_cursor

logger = get_logger(__name__)


def _summary(record) -> Dict[str, Any]:
    return {
        "env_id": record.env_id,
        "method": record.method,
        "seed": record.seed,
        "completion_step": record.completion_step,
        "success": record.success,
        "budget": record.budget,
    }


@mcp.tool()
async def list_runs(
    cursor: Optional[str] = None,
    env_id: Annotated[
        Optional[str],
        Field(description="Optional env filter: pointmass or tabletop"),
    ] = None,
    method: Annotated[
        Optional[str],
        Field(description="Optional method filter, e.g. qwale, sac_ft, gail_s"),
    ] = None,
) -> Dict[str, Any]:
    """
    List saved single-life runs with pagination support.

    Args:
        cursor: Optional cursor for pagination.
        env_id: Optional env filter (pointmass, tabletop).
        method: Optional method filter (qwale, sac_ft, gail_s, ...).

    Returns:
        Paginated run summaries sorted by env, method and seed.
    """
    try:
        cursor_params = parse_cursor(cursor, env_id=env_id, method=method)
        filters = cursor_params.filters
        records = list_run_records(get_config().output_dir, filters.get("env_id"), filters.get("method"))
        result = paginate([_summary(r) for r in records], cursor_params)
        return {"runs": result["items"], "pagination": result["pagination"]}

    except PaginationError as e:
        return {"error": str(e), "error_type": "pagination"}
    except Exception as e:
        logger.error(f"Error listing runs: {e}")
        return {"error": f"Failed to list runs: {e}", "error_type": "unknown"}


@mcp.tool()
async def get_run(env_id: str, method: str, seed: int) -> Dict[str, Any]:
    """
    Get one run record: completion step, success, config echo and trace path.

    Args:
        env_id: Environment of the run.
        method: Method of the run.
        seed: Seed of the run.

    Returns:
        The saved run record.
    """
    try:
        return {"run": load_run_record(get_config().output_dir, env_id, method, seed).to_dict()}

    except SlrlError as e:
        return e.to_dict()
    except Exception as e:
        logger.error(f"Error getting run {env_id}/{method}/seed{seed}: {e}")
        return {"error": f"Failed to get run: {e}", "error_type": "unknown"}


@mcp.tool()
async def get_report(env_id: str) -> Dict[str, Any]:
    """
    Get the per-method aggregate report for an env.

    Uses the sweep's report.json when present, otherwise aggregates the
    saved run records.

    Args:
        env_id: Environment to report on.

    Returns:
        Rows with mean ± standard error, median and success count, plus the text table.
    """
    try:
        output_dir = get_config().output_dir
        report = load_report(output_dir, env_id)
        source = "report.json"
        if report is None:
            records = list_run_records(output_dir, env_id)
            if not records:
                return {
                    "error": f"No runs saved for {env_id}",
                    "error_type": "not_found",
                    "suggested_action": "Run a sweep or deploy_run first",
                }
            report = aggregate(records)
            source = "records"
        return {"report": report.to_dict(), "table": report.format_table(), "source": source}

    except SlrlError as e:
        return e.to_dict()
    except Exception as e:
        logger.error(f"Error building report for {env_id}: {e}")
        return {"error": f"Failed to build report: {e}", "error_type": "unknown"}
