"""
Command-line entry point: synth, validate, stats, backtranslate, workbench
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import DEFAULT_OUT, PipelineConfig, load_config
from .errors import GeoForgeError
from .log import configure_logging, debug_log
from .pipeline import ingest_seeds, load_seed_problems, read_dataset, read_stats, run_pipeline
from .rng import RNGManager
from .verbalize import backtranslate_pairs, default_bank


def _sizes(text: str):
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geoforge", description="Geometry problem synthesis from formalized seeds")
    parser.add_argument("--version", action="version", version=f"geoforge {__version__}")
    parser.add_argument("--verbose", action="store_true", help="log DEBUG records")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="synthesize a dataset from seed problems")
    synth.add_argument("--seeds", nargs="+", help="seed files or directories (*.json, *.cdl)")
    synth.add_argument("--out", help=f"output directory (default {DEFAULT_OUT})")
    synth.add_argument("--per-seed", type=int, dest="per_seed", help="problems to synthesize per seed")
    synth.add_argument("--seed", type=int, help="global random seed")
    synth.add_argument("--image-ratio", type=float, dest="image_ratio", help="share of metric facts drawn in the diagram")
    synth.add_argument("--sizes", type=_sizes, help="image short edges, e.g. 112,224,336")
    synth.add_argument("--rewriter", help="rewriter endpoint URL")
    synth.add_argument("--model", help="rewriter model name")
    synth.add_argument("--workers", type=int, help="seed worker processes")
    synth.add_argument("--config", help="YAML run configuration")
    synth.add_argument("--templates", help="alternative template bank (JSON)")
    synth.add_argument("--dump-trace", action="store_true", default=None, dest="dump_trace")
    synth.add_argument("--dump-layout", action="store_true", default=None, dest="dump_layout")
    synth.add_argument("--keep-svg", action="store_true", default=None, dest="keep_svg")
    synth.add_argument("--resume", action="store_true", default=None, help="keep the rows an earlier run left in --out")

    check = commands.add_parser("validate", help="parse, validate and deduce seed problems")
    check.add_argument("paths", nargs="+")

    stats = commands.add_parser("stats", help="summarize a finished run")
    stats.add_argument("out")

    back = commands.add_parser("backtranslate", help="write (CDL, text) pairs for seed problems")
    back.add_argument("paths", nargs="+")
    back.add_argument("--out", required=True, help="JSONL file")
    back.add_argument("--count", type=int, default=1, help="pairs per problem")
    back.add_argument("--seed", type=int, default=0)

    commands.add_parser("workbench", help="open the interactive workbench")
    return parser


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """File values first, then every flag that was given."""
    config = load_config(args.config) if args.config else PipelineConfig()
    config = config.merged(
        seeds=tuple(args.seeds) if args.seeds else None,
        out=args.out,
        per_seed=args.per_seed,
        seed=args.seed,
        image_ratio=args.image_ratio,
        sizes=args.sizes,
        workers=args.workers,
        templates=args.templates,
        dump_trace=args.dump_trace,
        dump_layout=args.dump_layout,
        keep_svg=args.keep_svg,
        resume=args.resume,
    )
    if args.rewriter or args.model:
        rewriter = config.rewriter
        config = replace(
            config,
            rewriter=replace(rewriter, endpoint=args.rewriter or rewriter.endpoint, model=args.model or rewriter.model),
        )
    return config


def cmd_synth(args) -> int:
    config = config_from_args(args).validate()
    stats = run_pipeline(config)
    print(f"Emitted {stats.emitted} record(s) from {stats.seeds_valid}/{stats.seeds_read} seed(s) into {config.out}")
    for reason, count in sorted(stats.rejections.items()):
        print(f"  {reason}: {count}")
    return 0


def cmd_validate(args) -> int:
    seeds, diagnostics = ingest_seeds(args.paths)
    for line in diagnostics:
        print(f"INVALID {line}")
    for seed in seeds:
        result = seed.deduction
        goal = "solved" if result.solved else ("open" if result.goal_symbol else "none")
        print(
            f"OK {seed.id}: {len(seed.m_p)} stated metric(s), {len(seed.m_all)} in closure, "
            f"{len(result.trace)} step(s), goal {goal}"
        )
    return 0 if seeds and not diagnostics else 1


def cmd_stats(args) -> int:
    stats = read_stats(args.out)
    rows = read_dataset(args.out)
    print(json.dumps(stats, indent=2))
    by_seed = {}
    for row in rows:
        seed_id = row.get("provenance", {}).get("seed_id", "?")
        by_seed[seed_id] = by_seed.get(seed_id, 0) + 1
    for seed_id, count in sorted(by_seed.items()):
        print(f"{seed_id}: {count}")
    return 0


def cmd_backtranslate(args) -> int:
    problems, diagnostics = load_seed_problems(args.paths)
    for line in diagnostics:
        debug_log(f"Seed skipped: {line}", "WARN")
    rng = RNGManager(args.seed).fresh("backtranslate")
    pairs = backtranslate_pairs(problems, default_bank(), rng, args.count)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("".join(json.dumps(p, ensure_ascii=False) + "\n" for p in pairs), encoding="utf-8")
    print(f"Wrote {len(pairs)} pair(s) to {out}")
    return 0


def cmd_workbench(args) -> int:
    # Kivy is imported lazily so the batch commands run headless
    from .workbench.app import run_workbench

    run_workbench()
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "validate": cmd_validate,
    "stats": cmd_stats,
    "backtranslate": cmd_backtranslate,
    "workbench": cmd_workbench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except GeoForgeError as e:
        debug_log(str(e), "ERROR")
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
