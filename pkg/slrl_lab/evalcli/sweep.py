"""Multi-seed sweeps: priors per seed, then every (method, seed) life."""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from ..algos.sac import SacAgent
from ..algos.shaping import FrozenCritic
from ..config import get_config
from ..core.rng import Rng
from ..envs import EnvSpec, make_env
from ..replay.dataset import DATASET_SUFFIX, DatasetFile, load_dataset, save_dataset
from ..runner.prior import build_prior
from ..runner.records import RunRecord, save_run_record
from ..runner.single_life import run_single_life
from ..utils.logging import get_logger
from .aggregate import AggregateReport, aggregate
from .experiment import ExperimentConfig

logger = get_logger(__name__)

PRIOR_DIR = "_prior"
REPORT_JSON = "report.json"
REPORT_TXT = "report.txt"
TIMESTAMP_KEY = "generated_at"


def prior_paths(output_dir: Path, env_id: str, seed: int, prior_source: str) -> Tuple[Path, Path]:
    """(dataset, source agent checkpoint) for one seed's prior."""
    base = Path(output_dir) / env_id / PRIOR_DIR
    return base / f"{prior_source}_seed{seed}{DATASET_SUFFIX}", base / f"agent_seed{seed}.json"


def report_paths(output_dir: Path, env_id: str) -> Tuple[Path, Path]:
    base = Path(output_dir) / env_id
    return base / REPORT_JSON, base / REPORT_TXT


def prepare_prior(config: ExperimentConfig, seed: int, output_dir: Path) -> Tuple[Path, Path]:
    """Pretrain for ``seed`` and save the dataset and source agent."""
    dataset_path, agent_path = prior_paths(output_dir, config.env, seed, config.prior_source)
    bundle = build_prior(
        EnvSpec(config.env, "source", seed),
        config.prior_source,
        Rng(seed).fork("prior"),
        config.pretrain,
        config.sac,
    )
    save_dataset(bundle.dataset, dataset_path)
    bundle.frozen_q.agent.save(agent_path)
    return dataset_path, agent_path


def load_prior(
    config: ExperimentConfig, dataset_path: Path, agent_path: Path
) -> Tuple[DatasetFile, SacAgent]:
    return load_dataset(dataset_path), SacAgent.load(agent_path, config.env, config.sac)


def deploy_one(
    config: ExperimentConfig,
    method: str,
    seed: int,
    dataset: DatasetFile,
    source_agent: Optional[SacAgent],
) -> RunRecord:
    """One life; demo priors keep the source agent only as the frozen critic."""
    method_config = config.method_config(method, seed)
    target_spec = EnvSpec(config.env, config.target_variant, seed)
    pretrained = source_agent if method_config.init_from_pretrained else None
    frozen_q = FrozenCritic.from_agent(source_agent) if source_agent is not None else None
    return run_single_life(
        method_config,
        dataset,
        pretrained,
        make_env(target_spec, Rng(seed).fork("target_env")),
        config.sac,
        config.shaping,
        frozen_q,
    )


def _prior_job(args: Tuple[Dict, int, str]) -> Tuple[str, str]:
    config_dict, seed, output_dir = args
    paths = prepare_prior(ExperimentConfig.from_dict(config_dict), seed, Path(output_dir))
    return str(paths[0]), str(paths[1])


def _life_job(args: Tuple[Dict, str, int, str, str, str]) -> Dict:
    config_dict, method, seed, dataset_path, agent_path, output_dir = args
    config = ExperimentConfig.from_dict(config_dict)
    dataset, agent = load_prior(config, Path(dataset_path), Path(agent_path))
    record = deploy_one(config, method, seed, dataset, agent)
    save_run_record(record, Path(output_dir))
    return record.to_dict()


@dataclass
class SweepResult:
    report: AggregateReport
    records: List[RunRecord]
    failures: List[Tuple[str, int, str]] = field(default_factory=list)  # (method, seed, message)
    report_json: Optional[Path] = None
    report_txt: Optional[Path] = None


def _map(fn: Callable, jobs: List, workers: int) -> List:
    """Run jobs in order; exceptions are returned in place of results."""
    if workers <= 1 or len(jobs) <= 1:
        out = []
        for job in jobs:
            try:
                out.append(fn(job))
            except Exception as e:
                out.append(e)
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, job) for job in jobs]
        out = []
        for future in futures:
            try:
                out.append(future.result())
            except Exception as e:
                out.append(e)
        return out


def run_sweep(
    config: ExperimentConfig,
    output_dir: Optional[Path] = None,
    workers: Optional[int] = None,
    timestamp: Optional[str] = None,
) -> SweepResult:
    """Pretrain once per seed, run methods x seeds, aggregate and write the reports."""
    output_dir = Path(output_dir) if output_dir is not None else config.resolved_output_dir()
    workers = workers or get_config().workers
    config_dict = config.to_dict()
    logger.info(
        f"Sweep {config.env}: methods={config.methods} seeds={config.seeds} "
        f"budget={config.budget} workers={workers}"
    )

    prior_results = _map(_prior_job, [(config_dict, s, str(output_dir)) for s in config.seeds], workers)
    priors: Dict[int, Tuple[str, str]] = {}
    failures: List[Tuple[str, int, str]] = []
    for seed, result in zip(config.seeds, prior_results):
        if isinstance(result, Exception):
            logger.warning(f"Prior for seed {seed} failed: {result}")
            failures.extend((m, seed, f"prior: {result}") for m in config.methods)
        else:
            priors[seed] = result

    jobs = [
        (config_dict, method, seed, *priors[seed], str(output_dir))
        for method in config.methods
        for seed in config.seeds
        if seed in priors
    ]
    records: List[RunRecord] = []
    for job, result in zip(jobs, _map(_life_job, jobs, workers)):
        method, seed = job[1], job[2]
        if isinstance(result, Exception):
            logger.warning(f"Life {method} seed={seed} failed: {result}")
            failures.append((method, seed, str(result)))
        else:
            records.append(RunRecord.from_dict(result))
    logger.info(f"Sweep joined: {len(records)} records, {len(failures)} failures")

    report = aggregate(records) if records else AggregateReport(config.env)
    json_path, txt_path = write_report(report, config, output_dir, timestamp)
    return SweepResult(report, records, failures, json_path, txt_path)


def write_report(
    report: AggregateReport, config: ExperimentConfig, output_dir: Path, timestamp: Optional[str] = None
) -> Tuple[Path, Path]:
    """Write report.json (only ``generated_at`` varies between identical sweeps) and report.txt."""
    json_path, txt_path = report_paths(output_dir, report.env_id)
    json_path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        TIMESTAMP_KEY: timestamp or datetime.now(timezone.utc).isoformat(),
        "config": config.to_dict(),
        "report": report.to_dict(),
    }
    json_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    txt_path.write_text(report.format_table())
    logger.info(f"Wrote {json_path} and {txt_path}")
    return json_path, txt_path


def load_report(output_dir: Path, env_id: str) -> Optional[AggregateReport]:
    json_path, _ = report_paths(output_dir, env_id)
    if not json_path.exists():
        return None
    return AggregateReport.from_dict(json.loads(json_path.read_text())["report"])
