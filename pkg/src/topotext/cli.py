"""Command-line entry point.

    topotext diagrams  --config cfg.json [--workers N] [--seed N]
    topotext features  --config cfg.json
    topotext cluster   --config cfg.json [--sanity-gold]
    topotext classify  --config cfg.json

Exit codes: 0 success, 2 configuration error, 3 data error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .config import PipelineConfig
from .errors import ConfigError, DataError, TopotextError
from .pipeline import cmd_classify, cmd_cluster, cmd_diagrams, cmd_features

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topotext",
        description="Topological document signatures: diagrams, features, "
                    "clustering and sentiment-classification reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("diagrams", "compute per-document persistence diagrams (cached)"),
        ("features", "assemble feature CSVs (ph, aw2v, tfidf, aw2v+ph)"),
        ("cluster", "B-Cubed clustering report (k-means and GMM)"),
        ("classify", "logistic-regression sentiment report"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON config file")
        p.add_argument("--workers", type=int, default=None,
                       help="override the worker count")
        p.add_argument("--seed", type=int, default=None,
                       help="override the learner/baseline seed")
        if name == "cluster":
            p.add_argument("--sanity-gold", action="store_true",
                           help="also cluster one-hot gold labels (expects F1=1)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = PipelineConfig.from_file(args.config)
        if args.workers is not None:
            cfg.workers = args.workers
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
        if args.command == "diagrams":
            result = cmd_diagrams(cfg)
        elif args.command == "features":
            result = cmd_features(cfg)
        elif args.command == "cluster":
            result = cmd_cluster(cfg, sanity_gold=args.sanity_gold)
        else:
            result = cmd_classify(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TopotextError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    json.dump(result, sys.stdout, sort_keys=True, indent=2)
    print()
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
