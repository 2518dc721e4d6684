"""Command-line entry: refwhy mine|sample|classify|analyze|serve.

Exit codes: 0 success, 1 runtime failure, 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import ConfigError, MissingStageInput, RefwhyError
from .config import PipelineConfig
from .stages import cmd_analyze, cmd_classify, cmd_mine, cmd_sample


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refwhy",
        description="Mine refactoring history, extract motivations, analyze the metrics.",
    )
    parser.add_argument("command", choices=["mine", "sample", "classify", "analyze", "serve"])
    parser.add_argument("--config", required=True, help="path to the key-value config file")
    parser.add_argument("--mock", action="store_true",
                        help="classify against the bundled scripted endpoint")
    parser.add_argument("--seed", type=int, default=None, help="override the configured seed")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = PipelineConfig.from_file(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "mine":
            failures = cmd_mine(config)
            return 1 if failures else 0
        if args.command == "sample":
            return cmd_sample(config, seed=args.seed)
        if args.command == "classify":
            return cmd_classify(config, mock=args.mock, seed=args.seed)
        if args.command == "analyze":
            return cmd_analyze(config)
        if args.command == "serve":
            from .review import serve_review

            batch = config.output_dir / "classify" / "validation_batch.ndjson"
            if not batch.exists():
                raise MissingStageInput(f"no validation batch at {batch}; run classify first")
            serve_review(
                batch,
                config.output_dir / "review" / "verdicts.ndjson",
                bind=config.review.bind,
                port=config.review.port,
                static_dir=config.review.static_dir,
            )
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RefwhyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
