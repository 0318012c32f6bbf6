"""tembed - command-line entry point.

    python -m tembed.main validate --config configs/validate_square.json
    python -m tembed.main report --out out/validate_square
"""
import argparse
import sys
from typing import List, Optional

from tembed.core.config import PIPELINES, ConfigManager
from tembed.core.errors import TEmbedError
from tembed.core.logging_config import setup_logging
from tembed.pipelines.runner import run_pipeline
from tembed.version import VERSION

# Exit codes
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tembed", description="t-embeddings and the dimer model")
    parser.add_argument("--version", action="version", version=f"tembed {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in PIPELINES:
        p = sub.add_parser(name, help=f"run the {name} pipeline")
        p.add_argument("--config", help="experiment config JSON file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--paranoid", action="store_true", default=None,
                       help="also run the global overlap check")
        p.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default: LOG_LEVEL or INFO)")
        p.add_argument("--log-file", default=None, help="also write the log to this file")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger = setup_logging(args.log_level, args.log_file)
    logger.info(f"tembed v{VERSION}: {args.command}")
    try:
        config = ConfigManager(args.config).load({
            ConfigManager.PIPELINE: args.command,
            ConfigManager.SEED: args.seed,
            ConfigManager.OUT: args.out,
            ConfigManager.PARANOID: args.paranoid,
        })
        result = run_pipeline(config)
    except TEmbedError as e:
        logger.error(f"{args.command} failed [{e.error_type}]: {e}")
        return EXIT_ERROR
    if not result.ok:
        for report in result.reports:
            for v in report.errors:
                logger.warning(f"{report.subject}: {v.kind} at {v.location}: {v.message}")
        return EXIT_VIOLATIONS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
