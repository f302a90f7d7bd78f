"""Deployment tools for the SLRL lab MCP server."""

import asyncio
from pathlib import Path
from typing import Any, Dict, Optional
from typing_extensions import Annotated, Literal
from pydantic.fields import Field

from ..algos.sac import SacAgent
from ..config import get_config
from ..evalcli.experiment import ExperimentConfig
from ..evalcli.sweep import deploy_one
from ..exceptions import SlrlError
from ..mcp_instance import mcp
from ..replay.dataset import load_dataset
from ..runner.records import save_run_record
from ..utils.logging import get_logger

logger = get_logger(__name__)


def _deploy_blocking(
    env_id: str, method: str, dataset_path: str, agent_path: Optional[str], seed: int,
    budget: Optional[int], prior_source: str,
) -> Dict[str, Any]:
    config = ExperimentConfig(env=env_id, methods=[method], seeds=[seed], prior_source=prior_source)
    config = config.with_updates(budget=budget)
    dataset = load_dataset(Path(dataset_path))
    agent = SacAgent.load(Path(agent_path), env_id, config.sac) if agent_path else None
    record = deploy_one(config, method, seed, dataset, agent)
    path = save_run_record(record, get_config().output_dir)
    return {"run": record.to_dict(), "record_path": str(path)}


@mcp.tool()
async def deploy_run(
    env_id: Annotated[Literal["pointmass", "tabletop"], Field(description="Environment to deploy in")],
    method: Annotated[str, Field(description="Single-life method, e.g. qwale or sac_ft")],
    dataset_path: Annotated[str, Field(description="Prior data file (.slrl.jsonl)")],
    agent_path: Annotated[
        Optional[str],
        Field(description="Source agent checkpoint; needed for warm starts and qwale"),
    ] = None,
    seed: int = 0,
    budget: Annotated[Optional[int], Field(description="Step budget, by default 200000")] = None,
    prior_source: Annotated[
        Literal["rl_last_k", "demos"],
        Field(description="How the prior data was produced"),
    ] = "rl_last_k",
) -> Dict[str, Any]:
    """
    Run one single life in the target env and save its record and trace.

    Args:
        env_id: pointmass or tabletop.
        method: One of sac_ft, sac_rnd, sac_bc, sac_scratch, sac_no_online, gail_s, gail_sa, qwale, bc.
        dataset_path: Prior data file written by `slrl pretrain` or `slrl demo-gen`.
        agent_path: Source agent checkpoint; needed for warm starts and qwale.
        seed: Run seed.
        budget: Step budget (default 200000).
        prior_source: rl_last_k or demos.

    Returns:
        The run record and where it was saved.
    """
    try:
        logger.info(f"deploy_run {env_id} {method} seed={seed}")
        return await asyncio.to_thread(
            _deploy_blocking, env_id, method, dataset_path, agent_path, seed, budget, prior_source
        )

    except SlrlError as e:
        return e.to_dict()
    except FileNotFoundError as e:
        return {
            "error": f"File not found: {e.filename}",
            "error_type": "not_found",
            "suggested_action": "Check dataset_path and agent_path",
        }
    except Exception as e:
        logger.error(f"Error deploying {method} on {env_id}: {e}")
        return {"error": f"Failed to deploy run: {e}", "error_type": "unknown"}
