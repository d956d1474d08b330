#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
ADRD experiment tool
Gaussian process regression with functional inputs: simulate, fit, predict, validate, screen
"""

import argparse
import asyncio
import logging
import os
import sys
import traceback

# Add src to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.config.loader import ConfigLoader
from src.errors import ConfigError, exit_code_for
from src.experiment.runner import STAGES, ExperimentRunner

logger = logging.getLogger("adrd")


def setup_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Functional-input Gaussian process experiments",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="experiment.json", help="Path to experiment configuration file")
    common.add_argument("--seed", type=int, help="Master seed (overrides the config file)")
    common.add_argument("--jobs", type=int, help="Number of combinations run concurrently")
    common.add_argument("--output", help="Output directory (overrides the config file)")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--no-progress", action="store_true", help="Disable progress bars")

    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "Simulate profiles and outputs from the configured generating model",
        "fit": "Random search, MAP optimization and MCMC for every (subset, model, input)",
        "predict": "Posterior predictive means and sds on every test subset",
        "validate": "Validation statistics and the aggregated report",
        "screen": "Permutation feature deterioration over index intervals",
    }
    for stage in STAGES:
        subparsers.add_parser(stage, parents=[common], help=helps[stage],
                              formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    return parser


async def run(args) -> int:
    loader = ConfigLoader(args.config)
    config = loader.apply_overrides(seed=args.seed, jobs=args.jobs, output_dir=args.output)
    issues = loader.validate(args.command)
    if issues:
        for issue in issues:
            logger.error(f"Configuration issue: {issue}")
        raise ConfigError(f"{len(issues)} configuration issue(s) in {args.config}")

    logger.info(f"Running '{args.command}' (config hash {config.config_hash()[:12]}, seed {config.seed})")
    runner = ExperimentRunner(config, show_progress=not args.no_progress)

    if args.command == "simulate":
        runner.simulate()
    elif args.command == "fit":
        await runner.fit()
    elif args.command == "predict":
        await runner.predict()
    elif args.command == "validate":
        generator = await runner.validate()
        generator.print_summary()
    elif args.command == "screen":
        await runner.screen()

    runner.print_summary(args.command)
    return runner.exit_code()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return asyncio.run(run(args))
    except FileNotFoundError as e:
        logger.error(f"Error: {e}")
        return 1
    except Exception as e:
        code = exit_code_for(e)
        logger.error(f"{type(e).__name__}: {e}")
        if code == 1 and not isinstance(e, ConfigError):
            traceback.print_exc()
        return code


if __name__ == "__main__":
    sys.exit(main())
