"""``slrl`` command line: pretrain, deploy, sweep, demo-gen and plot."""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from ..algos.sac import SacAgent
from ..core.rng import Rng
from ..envs import EnvSpec, env_info
from ..envs.base import ENV_IDS
from ..envs.demos import scripted_demos
from ..exceptions import SlrlError
from ..replay.dataset import DATASET_SUFFIX, load_dataset, make_dataset, save_dataset
from ..runner.prior import PRIOR_SOURCES
from ..runner.records import read_trace, save_run_record
from ..runner.single_life import METHODS
from ..utils.logging import get_logger
from .experiment import ExperimentConfig, parse_methods, parse_seeds
from .plot import COLOR_BY, render_visitation
from .sweep import deploy_one, prepare_prior, run_sweep

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


def config_defaults_epilog() -> str:
    """Every experiment config key with its default, one per line."""
    lines = ["experiment config keys (JSON file or --set key=value) and their defaults:"]
    for key, value in ExperimentConfig().to_dict().items():
        if isinstance(value, dict):
            lines.extend(f"  {key}.{sub} = {json.dumps(v)}" for sub, v in value.items())
        else:
            lines.append(f"  {key} = {json.dumps(value)}")
    return "\n".join(lines)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="experiment JSON file; keys and defaults are listed below")
    p.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config key, e.g. --set sac.lr=1e-3 --set budget=30000",
    )
    p.add_argument("--output-dir", type=Path, help="root for run artifacts (default: $SLRL_OUTPUT_DIR or runs)")
    p.add_argument("--env", choices=ENV_IDS, help="environment (default: pointmass)")


def build_parser() -> argparse.ArgumentParser:
    epilog = config_defaults_epilog()
    parser = argparse.ArgumentParser(
        prog="slrl",
        description="Single-life RL lab: source pretraining, single-life deployment and evaluation.",
        formatter_class=_HelpFormatter,
        epilog=epilog,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = {"epilog": epilog, "formatter_class": _HelpFormatter}

    p = sub.add_parser("pretrain", help="pretrain in the source MDP and save prior data + agent checkpoint", **common)
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prior-source", choices=PRIOR_SOURCES)

    p = sub.add_parser("deploy", help="run one single life in the target MDP", **common)
    _add_common(p)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset", type=Path, required=True, help="prior data (.slrl.jsonl)")
    p.add_argument("--agent", type=Path, help="source agent checkpoint (needed for warm starts and qwale)")
    p.add_argument("--budget", type=int)
    p.add_argument("--prior-source", choices=PRIOR_SOURCES)

    p = sub.add_parser("sweep", help="methods x seeds, then aggregate into report.json / report.txt", **common)
    _add_common(p)
    p.add_argument("--methods", help="comma-separated methods (default: qwale,sac_ft)")
    p.add_argument("--seeds", help="'0..9' or '0,3,5' (default: 0)")
    p.add_argument("--budget", type=int)
    p.add_argument("--prior-source", choices=PRIOR_SOURCES)
    p.add_argument("--workers", type=int, help="parallel workers (default: $SLRL_WORKERS or cores - 1)")

    p = sub.add_parser("demo-gen", help="write scripted source-domain demonstrations as a dataset", **common)
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, help="number of demos (default: 3 pointmass, 10 tabletop)")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("plot", help="render a trace CSV as an SVG visitation plot", formatter_class=_HelpFormatter)
    p.add_argument("trace", type=Path)
    p.add_argument("--color-by", choices=COLOR_BY, default="timestep")
    p.add_argument("--out", type=Path, help="SVG path (default: trace path with .svg)")
    p.add_argument("--env", choices=ENV_IDS, help="env of the trace (default: inferred from obs width)")
    p.add_argument("--prior", type=Path, help="overlay prior-data states from this dataset")
    p.add_argument("--mirror-x", action="store_true", help="negate the projected x coordinate")
    return parser


def _experiment(args: argparse.Namespace, **changes) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config, args.overrides)
    output_dir = str(args.output_dir) if args.output_dir else None
    return config.with_updates(env=args.env, output_dir=output_dir, **changes)


def cmd_pretrain(args: argparse.Namespace) -> int:
    config = _experiment(args, prior_source=args.prior_source)
    dataset_path, agent_path = prepare_prior(config, args.seed, config.resolved_output_dir())
    print(f"dataset: {dataset_path}")
    print(f"agent: {agent_path}")
    return EXIT_OK


def cmd_deploy(args: argparse.Namespace) -> int:
    config = _experiment(args, budget=args.budget, prior_source=args.prior_source)
    dataset = load_dataset(args.dataset)
    agent = SacAgent.load(args.agent, config.env, config.sac) if args.agent else None
    record = deploy_one(config, args.method, args.seed, dataset, agent)
    path = save_run_record(record, config.resolved_output_dir())
    print(f"{record.method} seed={record.seed}: completion_step={record.completion_step} success={record.success}")
    print(f"record: {path}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _experiment(
        args,
        methods=parse_methods(args.methods) if args.methods else None,
        seeds=parse_seeds(args.seeds) if args.seeds else None,
        budget=args.budget,
        prior_source=args.prior_source,
    )
    result = run_sweep(config, workers=args.workers)
    print(result.report.format_table(), end="")
    print(f"report: {result.report_json}")
    for method, seed, message in result.failures:
        print(f"failed: {method} seed={seed}: {message}", file=sys.stderr)
    return EXIT_ERROR if result.failures else EXIT_OK


def cmd_demo_gen(args: argparse.Namespace) -> int:
    config = _experiment(args)
    info = env_info(config.env)
    count = args.count or info.demo_count
    demos = scripted_demos(EnvSpec(config.env, "source", args.seed), count, Rng(args.seed).fork("demos"))
    records = [t for demo in demos for t in demo]
    dataset = make_dataset(config.env, "source", info.obs_dim, info.action_dim, records)
    out = args.out or config.resolved_output_dir() / config.env / f"demos_seed{args.seed}{DATASET_SUFFIX}"
    save_dataset(dataset, out)
    print(f"{len(demos)} demos ({len(records)} transitions): {out}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    trace = read_trace(args.trace)
    prior = load_dataset(args.prior) if args.prior else None
    out = args.out or args.trace.with_suffix(".svg")
    render_visitation(trace, args.color_by, out, args.env, prior, args.mirror_x)
    print(f"plot: {out}")
    return EXIT_OK


COMMANDS = {
    "pretrain": cmd_pretrain,
    "deploy": cmd_deploy,
    "sweep": cmd_sweep,
    "demo-gen": cmd_demo_gen,
    "plot": cmd_plot,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv`` and run a subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except FileNotFoundError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: file not found: {e.filename}", file=sys.stderr)
        return EXIT_ERROR
    except SlrlError as e:
        logger.error(f"{args.command} failed: {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        if e.suggested_action:
            print(f"hint: {e.suggested_action}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
