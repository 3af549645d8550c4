"""Command-line entry points.

Subcommands
-----------
needles        two-needle mixture benchmark (repeated ladder runs)
phylo          switched-alignment tree benchmark plus its MH baseline
spectral-scan  exact-chain temperature scaling table and inequality suites
optimize       mode search with the below-unit ladder extension
summarize      recompute summary.json from the trace files of a finished run

Exit codes: 0 success, 2 configuration error, 3 numerical or diagnostic
failure, 4 scan bands violated.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import harness
from .errors import ConfigurationError, DiagnosticError, NumericalError
from .phylo import build_two_tree_alignment, PhyloTarget
from .proposals import BallKernel, CauchyKernel, CompoundNniKernel, InterningKernel, NniKernel
from .rng import RngStream
from .samplers import geometric_ladder, tune_ladder
from .targets import needles_mixture, shifted_ridge_target


def parse_ladder(text: str) -> tuple[float, ...] | str:
    """Decode --ladder: "auto", an explicit list starting at 1, or "t,tau"."""
    if text == "auto":
        return "auto"
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse ladder {text!r}") from exc
    if not vals:
        raise ConfigurationError("empty ladder")
    if vals[0] == 1.0:
        return vals
    if len(vals) == 2 and vals[0] > vals[1] > 1.0:
        return tuple(geometric_ladder(vals[0], vals[1]))
    raise ConfigurationError(
        f"ladder {text!r} is neither 'auto', an explicit ladder starting at 1, "
        "nor a 'top,ratio' pair with top > ratio > 1"
    )


def _auto_ladder(experiment: str, cfg) -> tuple[float, ...]:
    """Run the pilot-based tuner for a known experiment target."""
    if experiment in ("needles", "optimize-needles"):
        target = needles_mixture()
        return tuple(tune_ladder(target, BallKernel(cfg.local_radius),
                                 CauchyKernel(cfg.cauchy_scale),
                                 np.zeros(2), cfg.seed, s=cfg.s))
    if experiment == "optimize-ridge":
        target = shifted_ridge_target()
        return tuple(tune_ladder(target, BallKernel(cfg.local_radius),
                                 CauchyKernel(cfg.cauchy_scale),
                                 np.zeros(2), cfg.seed, s=cfg.s))
    if experiment == "phylo":
        rng = RngStream(cfg.seed, harness.DATA_STREAM).generator()
        alignment, tree_a, _ = build_two_tree_alignment(rng, cfg.n_sites)
        target = PhyloTarget(alignment)
        return tuple(tune_ladder(target, InterningKernel(NniKernel(), target),
                                 InterningKernel(CompoundNniKernel(cfg.compound_p), target),
                                 target.intern(tree_a), cfg.seed, s=cfg.s))
    raise ConfigurationError(f"no automatic ladder for {experiment!r}")


def _build_config(cls, args, overrides: dict):
    """dataclass defaults < --config file < explicit flags."""
    fields = {f.name for f in dataclasses.fields(cls)}
    merged: dict = {}
    if args.config is not None:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ConfigurationError("--config must contain a JSON object")
        for key, val in file_cfg.items():
            if key == "experiment":
                continue
            if key not in fields:
                raise ConfigurationError(f"unknown config key {key!r}")
            merged[key] = tuple(val) if isinstance(val, list) else val
    for key, val in overrides.items():
        if val is not None:
            merged[key] = val
    merged["seed"] = args.seed
    return cls(**merged)


def _add_common(sp, with_reps: bool = False, with_jobs: bool = False):
    sp.add_argument("--seed", type=int, required=True,
                    help="master seed (required)")
    sp.add_argument("--config", help="JSON file with config fields")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--iters", type=int, help="iterations after burn-in")
    sp.add_argument("--burn-in", type=int, dest="burn_in")
    sp.add_argument("--thin", type=int)
    sp.add_argument("--ladder", help="'auto', '1,t1,...', or 'top,ratio'")
    sp.add_argument("--s", type=float, help="long-range branch probability")
    if with_reps:
        sp.add_argument("--reps", type=int, help="independent repetitions")
    if with_jobs:
        sp.add_argument("--jobs", type=int, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steepmc",
                                     description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("needles", help="two-needle mixture benchmark")
    _add_common(sp, with_reps=True, with_jobs=True)

    sp = sub.add_parser("phylo", help="switched-alignment tree benchmark")
    _add_common(sp)
    sp.add_argument("--sites", type=int, dest="n_sites",
                    help="sites per alignment half")
    sp.add_argument("--baseline-iters", type=int, dest="baseline_iters")

    sp = sub.add_parser("spectral-scan", help="temperature scaling table")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--config", help="JSON file with config fields")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--temperatures", help="comma-separated scan points")
    sp.add_argument("--s", type=float)

    sp = sub.add_parser("optimize", help="mode search")
    _add_common(sp)
    sp.add_argument("--objective", choices=("needles", "ridge"))
    sp.add_argument("--extra-cold", type=int, dest="extra_cold",
                    help="temperatures appended below 1")

    sp = sub.add_parser("summarize", help="recompute summary.json from traces")
    sp.add_argument("out_dir", help="directory of a finished run")
    sp.add_argument("--check", action="store_true",
                    help="fail (exit 3) if the stored summary differs")
    return parser


def _resolve_ladder(args, cfg, experiment: str):
    if args.ladder is None:
        return cfg
    parsed = parse_ladder(args.ladder)
    if parsed == "auto":
        parsed = _auto_ladder(experiment, cfg)
    return dataclasses.replace(cfg, ladder=tuple(parsed))


def _run(args) -> int:
    if args.command == "needles":
        cfg = _build_config(harness.NeedlesConfig, args, {
            "reps": args.reps, "n_iter": args.iters, "burn_in": args.burn_in,
            "thin": args.thin, "s": args.s, "jobs": args.jobs,
        })
        cfg = _resolve_ladder(args, cfg, "needles")
        out = args.out or "needles_out"
        summary = harness.run_needles(cfg, out)
        print(f"needles: {cfg.reps} reps -> {out}/summary.json "
              f"(mean p_hat {summary['p_hat_mean']:.4f})")
        return 0

    if args.command == "phylo":
        cfg = _build_config(harness.PhyloConfig, args, {
            "n_iter": args.iters, "burn_in": args.burn_in, "thin": args.thin,
            "s": args.s, "n_sites": args.n_sites,
            "baseline_iters": args.baseline_iters,
        })
        cfg = _resolve_ladder(args, cfg, "phylo")
        out = args.out or "phylo_out"
        summary = harness.run_phylo(cfg, out)
        print(f"phylo: mass A {summary['mass_a']:.3f}, "
              f"mass B {summary['mass_b']:.3f}, "
              f"switches {summary['switches_ab']} -> {out}/summary.json")
        return 0

    if args.command == "spectral-scan":
        overrides: dict = {"s": args.s}
        if args.temperatures is not None:
            overrides["temperatures"] = tuple(
                float(v) for v in args.temperatures.split(","))
        cfg = _build_config(harness.ScanConfig, args, overrides)
        out = args.out or "scan_out"
        summary, all_pass = harness.run_spectral_scan(cfg, out)
        print(f"spectral-scan: slope_E {summary['slope_exploring']:.3f}, "
              f"slope_S {summary['slope_sampling']:.3f}, "
              f"bands {'pass' if all_pass else 'FAIL'} -> {out}/summary.json")
        return 0 if all_pass else 4

    if args.command == "optimize":
        cfg = _build_config(harness.OptimizeConfig, args, {
            "n_iter": args.iters, "burn_in": args.burn_in, "thin": args.thin,
            "s": args.s, "objective": args.objective,
            "extra_cold": args.extra_cold,
        })
        cfg = _resolve_ladder(args, cfg, f"optimize-{cfg.objective}")
        out = args.out or "optimize_out"
        summary = harness.run_optimize(cfg, out)
        print(f"optimize: best {summary['best_state']}, "
              f"distance {summary['distance_to_optimum']:.4f} "
              f"-> {out}/summary.json")
        return 0

    if args.command == "summarize":
        from pathlib import Path
        out = Path(args.out_dir)
        summary = harness.summarize_dir(out)
        text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
        if args.check:
            stored = (out / "summary.json").read_text()
            if stored != text:
                print("summarize: recomputed summary differs from stored file",
                      file=sys.stderr)
                return 3
            print("summarize: recomputed summary matches stored file")
            return 0
        sys.stdout.write(text)
        return 0

    raise ConfigurationError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, DiagnosticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
