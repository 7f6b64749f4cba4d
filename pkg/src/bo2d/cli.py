"""Command-line entry point: ``bo2d <experiment> --config FILE [--out DIR]``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .config import ConfigError, RunConfig, parse_config, parse_config_text, serialize_config
from .experiments import EXIT_CONFIG, EXIT_IO, run

COMMANDS = {
    "evolve": "evolve",
    "kernel-check": "kernel_check",
    "decay": "decay",
    "commutators": "commutators",
    "jbound": "jbound",
    "scatter": "scatter",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bo2d", description="2D generalized Benjamin-Ono laboratory")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, config_required: bool = True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=config_required, help="key = value configuration file")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        return p

    add("evolve", "nonlinear (or linear) evolution with diagnostics")
    add("kernel-check", "compare the kernel and multiplier linear propagators")
    p = add("decay", "fit the dispersive decay rate of the linear group")
    p.add_argument("--theta", type=float, help="decay rate theta in (0, 1]")
    p = add("commutators", "commutator and product inequality ratios")
    p.add_argument("--kind", help="kato, kato_ponce, leibniz, calderon, product_A or product_dx")
    p.add_argument("--seeds", type=int, help="number of seeded samples")
    p = add("jbound", "tabulate J(t)", config_required=False)
    p.add_argument("--p", type=int, dest="jp", help="nonlinearity power")
    p.add_argument("--tmax", type=float, help="largest time")
    p = add("scatter", "scattering profiles of a small-data solution")
    p.add_argument("--r", type=float, help="Sobolev index of the convergence norm")
    return parser


def _overrides(args) -> dict:
    pairs = {
        "theta": getattr(args, "theta", None),
        "kind": getattr(args, "kind", None),
        "seeds": getattr(args, "seeds", None),
        "jbound_p": getattr(args, "jp", None),
        "t_max": getattr(args, "tmax", None),
        "r": getattr(args, "r", None),
    }
    return {k: v for k, v in pairs.items() if v is not None}


def load_config(args) -> RunConfig:
    experiment = COMMANDS[args.command]
    if args.config is None:
        # only jbound runs without a file; it needs no grid
        cfg = parse_config_text("nx = 8\nny = 8\nLx = 1\nLy = 1\n")
    else:
        cfg = parse_config(args.config)
    cfg = dataclasses.replace(cfg, experiment=experiment, **_overrides(args))
    if args.out:
        cfg.output_dir = args.out
    # re-validate after command-line overrides
    notices = cfg.notices
    cfg = parse_config_text(serialize_config(cfg))
    cfg.notices = notices
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
