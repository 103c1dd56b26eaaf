"""Command-line front end.

Subcommands map to the experiment registry:

    denoise        orthogonal-design sparse denoising risk
    bias-variance  cosine-basis bias/variance risk curve
    lasso          ISTA vs AMP head-to-head on random designs
    phase-diagram  the exact-recovery boundary delta_c(eps)
    clique         planted-clique sweep, or recovery from an edge list

Global flags: --seed, --replicates, --jobs, --out, --config, --svg, plus
repeatable --param KEY=VALUE overrides.  Exit codes: 0 success, 2 usage
error, 1 I/O error.
"""

import argparse
import sys
from pathlib import Path

from .experiments import EXPERIMENTS, RunConfig, UsageError, load_config, run_experiment

_SUBCOMMANDS = {
    "denoise": "denoise",
    "bias-variance": "bias_variance",
    "lasso": "lasso_compare",
    "phase-diagram": "se_phase_diagram",
    "clique": "clique_sweep",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparselab",
        description="Seeded sparse-estimation experiments with CSV/SVG output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, experiment in _SUBCOMMANDS.items():
        keys = ", ".join(EXPERIMENTS[experiment]["params"])
        p = sub.add_parser(name, help=f"run the {experiment} experiment (params: {keys})")
        p.add_argument("--seed", type=int, default=None, help="base seed (replicate r uses seed + r)")
        p.add_argument("--replicates", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None, help="concurrent replicates")
        p.add_argument("--out", type=Path, default=None, help="output directory for CSV/SVG")
        p.add_argument("--config", type=Path, default=None, help="INI config file")
        p.add_argument("--svg", action="store_true", help="also write an SVG plot")
        p.add_argument(
            "--param", action="append", default=[], metavar="KEY=VALUE",
            help="override an experiment parameter (repeatable)",
        )
    return parser


def _assemble_config(args):
    experiment = _SUBCOMMANDS[args.command]
    if args.config is not None:
        cfg = load_config(args.config)
        if cfg.experiment != experiment:
            raise UsageError(
                f"config file runs {cfg.experiment!r} but the subcommand asks for {experiment!r}"
            )
    else:
        cfg = RunConfig(experiment=experiment)
    if args.seed is not None:
        cfg.base_seed = args.seed
    if args.replicates is not None:
        cfg.replicates = args.replicates
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.out is not None:
        cfg.output_dir = args.out
    if args.svg:
        cfg.svg = True
    for item in args.param:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        cfg.parameters[key.strip()] = value.strip()
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _assemble_config(args)
        table = run_experiment(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    names = [name for name, _ in table.columns]
    print(f"{cfg.experiment}: {len(table.rows)} rows ({', '.join(names)})")
    if cfg.output_dir is not None:
        print(f"wrote {Path(cfg.output_dir) / (cfg.experiment + '.csv')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
