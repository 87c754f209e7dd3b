"""Command line interface.

Subcommands:
    run       one evolution run from a config file, with optional report
    campaign  many runs with consecutive seeds, CSV + figure outputs
    fi-curve  frequency-current curve of a neuron preset
    compare   Mann-Whitney U test between two campaign summaries
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys

from spikeneat import harness
from spikeneat.cartpole import write_trajectory_csv
from spikeneat.neat import serialize_genome
from spikeneat.neuron import PRESETS, fi_curve, write_fi_csv
from spikeneat.snn import write_raster_csv


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikeneat",
        description="Evolve spiking and sigmoidal cart-pole controllers.",
    )
    sub = parser.add_subparsers(required=True)

    p_run = sub.add_parser("run", help="single evolution run")
    p_run.add_argument("--config", required=True, help="key = value config file")
    p_run.add_argument("--out", help="directory for progress/trajectory/champion outputs")
    p_run.add_argument(
        "--raster",
        type=int,
        nargs="?",
        const=500,
        default=None,
        metavar="STEPS",
        help="also write a spike raster for the first STEPS control steps (default 500)",
    )
    p_run.set_defaults(handler=_cmd_run)

    p_campaign = sub.add_parser("campaign", help="multi-run campaign")
    p_campaign.add_argument("--config", required=True)
    p_campaign.add_argument("--runs", type=int, required=True)
    p_campaign.add_argument("--out", required=True, help="output directory")
    p_campaign.set_defaults(handler=_cmd_campaign)

    p_fi = sub.add_parser("fi-curve", help="neuron frequency-current curve")
    p_fi.add_argument("--params", choices=sorted(PRESETS), default="default")
    p_fi.add_argument("--out", required=True, help="CSV path; a PNG is written alongside")
    p_fi.add_argument("--i-min", type=float, default=0.0)
    p_fi.add_argument("--i-max", type=float, default=200.0)
    p_fi.add_argument("--steps", type=int, default=21)
    p_fi.add_argument("--window", type=int, default=1000, help="ms per current level")
    p_fi.set_defaults(handler=_cmd_fi_curve)

    p_cmp = sub.add_parser("compare", help="Mann-Whitney U test between two campaigns")
    p_cmp.add_argument("--a", required=True, help="first campaign directory")
    p_cmp.add_argument("--b", required=True, help="second campaign directory")
    p_cmp.set_defaults(handler=_cmd_compare)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = harness.parse_config(args.config)
    result = harness.run_evolution(cfg)
    if result.success:
        print(f"success in generation {result.generations}")
    else:
        print(f"failure: no solution within {cfg.max_generations} generations")
    print(f"best fitness {max(result.best_fitness):.0f} over {len(result.best_fitness)} generations")
    if args.out is None:
        return 0
    os.makedirs(args.out, exist_ok=True)
    means, sds = harness.fitness_progress([result.best_fitness])
    harness.write_progress_csv(means, sds, os.path.join(args.out, "progress.csv"))
    with open(os.path.join(args.out, "champion.genome"), "w") as fh:
        fh.write(serialize_genome(result.champion))
    replay = harness.replay_champion(result, cfg)
    write_trajectory_csv(replay.trajectory, os.path.join(args.out, "trajectory.csv"))
    from spikeneat import plots

    plots.progress_figure(means, sds, os.path.join(args.out, "progress.png"))
    plots.trajectory_figure(replay.trajectory, os.path.join(args.out, "trajectory.png"))
    if args.raster is not None:
        _write_raster(result, cfg, args.raster, os.path.join(args.out, "raster.csv"))
    print(f"outputs written to {args.out}")
    return 0


def _write_raster(result: harness.RunResult, cfg: harness.TaskConfig, steps: int, path: str) -> None:
    # Re-run the champion's episode on the traced Python path, stopping
    # after the requested number of control steps.
    from spikeneat.cartpole import failed
    from spikeneat.cartpole import step as plant_step

    if steps < 1:
        raise ValueError(f"raster needs at least 1 control step, got {steps}")
    rng = harness._eval_rng(cfg.seed, *result.champion_stream)
    net = harness.prepare_network(result.champion, cfg, fast=False)
    net.record_trace = True
    state = harness._initial_state(cfg, rng)
    plant = cfg.plant()
    for _ in range(steps):
        obs = harness.observe(state, cfg.markovian, plant, cfg.x_dot_range, cfg.theta_dot_range)
        force = net.control_force(net.step(obs, rng))
        state = plant_step(state, force, plant)
        if failed(state, plant):
            break
    write_raster_csv(net.trace, path)


def _cmd_campaign(args: argparse.Namespace) -> int:
    cfg = harness.parse_config(args.config)
    result = harness.campaign(cfg, args.runs, out_dir=args.out)
    successes = sum(1 for g in result.outcomes if g is not None)
    print(f"{successes}/{args.runs} runs succeeded (failure rate {result.failure_rate:.2f})")
    best = "n/a" if result.best is None else str(result.best)
    worst = "n/a" if result.worst is None else str(result.worst)
    print(f"generations: best {best}, worst {worst}, median {result.median:g}, mean {result.mean:.2f}")
    print(f"outputs written to {args.out}")
    return 0


def _cmd_fi_curve(args: argparse.Namespace) -> int:
    rows = fi_curve(
        PRESETS[args.params],
        i_min=args.i_min,
        i_max=args.i_max,
        steps=args.steps,
        window_ms=args.window,
    )
    write_fi_csv(rows, args.out)
    from spikeneat import plots

    png = os.path.splitext(args.out)[0] + ".png"
    plots.fi_figure(rows, png, title=f"f-I curve ({args.params})")
    print(f"wrote {args.out} and {png}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    gens_a = harness.read_summary_generations(os.path.join(args.a, "summary.csv"))
    gens_b = harness.read_summary_generations(os.path.join(args.b, "summary.csv"))
    u, p = harness.mann_whitney_u(gens_a, gens_b)
    print(f"a: n={len(gens_a)}, median generations {statistics.median(gens_a):g}")
    print(f"b: n={len(gens_b)}, median generations {statistics.median(gens_b):g}")
    print(f"Mann-Whitney U = {u:g} (a over b), two-sided p = {p:.6g}")
    if p < 0.05:
        print("difference significant at p < 0.05")
    else:
        print("no significant difference at p < 0.05")
    return 0


if __name__ == "__main__":
    sys.exit(main())
