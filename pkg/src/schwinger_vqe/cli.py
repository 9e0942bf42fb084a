"""Command-line interface for the experiment harness.

Subcommands mirror the experiment kinds; every one accepts ``--config``
pointing at a JSON file plus individual flag overrides.  Results are written
as CSV files and a run manifest into the output directory.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, ExperimentConfig
from .experiments import (
    convergence_run,
    initial_point_stats,
    mass_sweep,
    noise_sweep,
    pca_experiment,
)
from .schwinger import analytic_spectrum


def _shots_value(text: str):
    if text == "exact":
        return "exact"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('shots must be a positive integer or "exact"')


def _add_common_options(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", metavar="PATH", help="JSON configuration file")
    sp.add_argument("--m", type=float, help="bare mass")
    sp.add_argument("--m-min", type=float, dest="m_min")
    sp.add_argument("--m-max", type=float, dest="m_max")
    sp.add_argument("--m-step", type=float, dest="m_step")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--iterations", type=int)
    sp.add_argument("--shots", type=_shots_value, help='photon pairs per setting, or "exact"')
    sp.add_argument("--noise", choices=("none", "qubit1", "both"), dest="noise_mode")
    sp.add_argument("--epsilon", type=float, help="dephasing strength in [0, 1]")
    sp.add_argument("--runs", type=int, help="number of random starts (stats/pca)")
    sp.add_argument("--seed", type=int, help="master random seed")
    sp.add_argument("--out", dest="out_dir", metavar="DIR", help="output directory")


_OVERRIDE_FIELDS = (
    "m",
    "m_min",
    "m_max",
    "m_step",
    "trials",
    "iterations",
    "shots",
    "noise_mode",
    "epsilon",
    "runs",
    "seed",
    "out_dir",
)


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    overrides = {
        name: getattr(args, name)
        for name in _OVERRIDE_FIELDS
        if getattr(args, name, None) is not None
    }
    return cfg.replace(**overrides) if overrides else cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schwinger-vqe",
        description="Variational ground-state search for the two-qubit lattice "
        "Schwinger model on a simulated polarization-optics setup.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="print the analytic spectrum at a mass")
    _add_common_options(sp)

    sp = sub.add_parser("sweep-mass", help="optimization trials over a mass grid")
    _add_common_options(sp)

    sp = sub.add_parser("sweep-noise", help="trials over a (mass x noise strength) grid")
    _add_common_options(sp)

    sp = sub.add_parser("converge", help="per-iteration energy traces at one mass")
    _add_common_options(sp)

    sp = sub.add_parser("stats", help="outcome statistics over random initial points")
    _add_common_options(sp)

    sp = sub.add_parser("pca", help="initial-point batch plus PCA of final parameters")
    _add_common_options(sp)

    return parser


def _run_spectrum(cfg: ExperimentConfig) -> None:
    info = analytic_spectrum(cfg.m)
    print(f"m = {cfg.m:.12g}")
    for name, value in (("E4", info.e4), ("E3", info.e3), ("E2", info.e2), ("E1", info.e1)):
        print(f"{name} = {value:.12g}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "spectrum":
            _run_spectrum(cfg)
        elif args.command == "sweep-mass":
            records = mass_sweep(cfg)
            print(f"wrote {len(records)} trial records to {cfg.out_dir}/mass_sweep.csv")
        elif args.command == "sweep-noise":
            records = noise_sweep(cfg)
            print(f"wrote {len(records)} trial records to {cfg.out_dir}/noise_sweep.csv")
        elif args.command == "converge":
            result = convergence_run(cfg)
            final = result["median_energy"][-1]
            print(
                f"wrote {result['traces'].shape[0]} traces to {cfg.out_dir}/convergence.csv "
                f"(final median energy {final:.6g})"
            )
        elif args.command == "stats":
            stats = initial_point_stats(cfg)
            print(f"wrote {len(stats.energies)} runs to {cfg.out_dir}/stats_raw.csv")
        elif args.command == "pca":
            result = pca_experiment(cfg)
            fractions = ", ".join(f"{v:.4f}" for v in result.explained_variance)
            print(f"wrote projections to {cfg.out_dir}/pca.csv (explained variance {fractions})")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
