"""Command-line interface.

Subcommands: analyze (closed forms), design-mu (decoy-probability design
range), simulate (one episode), montecarlo, calibrate (detector threshold),
reproduce (bundled experiment CSVs). Exit codes: 0 success, 2 configuration
validation failure, 3 numeric non-convergence.
"""

import argparse
import os
import sys

import numpy as np

from . import analysis, scenarios
from .detector import calibrate_threshold, moving_average
from .harness import (
    MuSweepReport,
    ScenarioError,
    export_csv,
    mu_sweep,
    run_episode,
    run_monte_carlo,
    scenario_from_config,
)
from .linalg import ConvergenceError, StabilityError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="eavesim",
        description="Remote state estimation under active eavesdropping: "
        "simulation, closed-form analysis, and detector calibration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, episodes=False):
        p.add_argument("--config", help="scenario config file (see README for the format)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--out", help="output CSV path (or directory for reproduce)")
        p.add_argument("--mu", type=float, help="decoy probability override")
        p.add_argument("--threshold", type=float, help="detector threshold override")
        if episodes:
            p.add_argument("--episodes", type=int, help="episode count override")

    common(sub.add_parser("simulate", help="run one episode, write its trace"))
    common(sub.add_parser("montecarlo", help="run seeded episodes, aggregate"), episodes=True)
    common(sub.add_parser("analyze", help="print the closed-form steady-state report"))
    p_design = sub.add_parser("design-mu", help="print the decoy-probability design range")
    common(p_design)
    p_design.add_argument(
        "--gamma-e",
        type=float,
        nargs="*",
        help="eavesdropper dropout probabilities to evaluate (default: scenario value)",
    )
    common(sub.add_parser("calibrate", help="calibrate the zero-false-alarm threshold"), episodes=True)
    p_rep = sub.add_parser("reproduce", help="write the bundled experiment CSVs")
    p_rep.add_argument("experiment", choices=["fig4", "fig5", "fig6", "fig7"])
    common(p_rep)
    return parser


def _scenario(args):
    overrides = {}
    if args.mu is not None:
        overrides["mu"] = args.mu
    if args.threshold is not None:
        overrides["h"] = args.threshold
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "episodes", None) is not None:
        overrides["episodes"] = args.episodes
    if args.config:
        return scenario_from_config(args.config, overrides)
    scn = scenarios.detection_scenario()
    from dataclasses import replace

    if "mu" in overrides:
        scn = replace(scn, mu=overrides["mu"])
    if "h" in overrides:
        scn = replace(scn, detector=replace(scn.detector, h=overrides["h"]))
    if "master_seed" in overrides:
        scn = replace(scn, master_seed=overrides["master_seed"])
    if "episodes" in overrides:
        scn = replace(scn, episodes=overrides["episodes"])
    return scn


def _cmd_simulate(args):
    scn = _scenario(args)
    trace = run_episode(scn)
    print(f"episode horizon={trace.horizon} attack_onset={trace.lambda_time} tau={trace.tau}")
    for phase, (tr_p, tr_pe, steps) in trace.phase_averages().items():
        print(f"  {phase:18s} steps={steps:6d} trP={tr_p:.6g} trPe={tr_pe:.6g}")
    if args.out:
        export_csv(trace, args.out)
        print(f"trace written to {args.out}")
    return EXIT_OK


def _cmd_montecarlo(args):
    scn = _scenario(args)
    report = run_monte_carlo(scn)
    delays = report.delays
    print(f"episodes={report.episodes} false_alarms={report.false_alarms} undetected={report.undetected}")
    if delays.size:
        print(
            f"delay mean={delays.mean():.1f} median={np.median(delays):.1f} "
            f"p90={np.quantile(delays, 0.9):.1f}"
        )
    print(f"bayes_risk={report.bayes_risk():.6g} (c={scn.detector.c})")
    for phase in ("pre_attack", "attack_undetected", "encoded"):
        tr_p, tr_pe, steps, se_p, se_pe = report.phase_average(phase)
        print(
            f"  {phase:18s} steps={steps:8d} trP={tr_p:.6g} (se {se_p:.2g}) "
            f"trPe={tr_pe:.6g} (se {se_pe:.2g})"
        )
    err_u, err_e = report.encoded_phase_errors()
    print(
        f"closed forms: J={report.j_user_closed:.6g} Je={report.j_eaves_closed:.6g} "
        f"encoded-phase rel. err: user={err_u:.3%} eaves={err_e:.3%}"
    )
    if args.out:
        export_csv(report, args.out)
        print(f"per-episode summary written to {args.out}")
    return EXIT_OK


def _cmd_analyze(args):
    scn = _scenario(args)
    model = scn.system
    rep = analysis.steady_state_report(model, scn.channel.gamma_bar, scn.channel.gamma_e, scn.mu)
    print(f"rho(A)        = {np.max(np.abs(np.linalg.eigvals(model.a))):.6g}")
    print(f"trace pbar    = {np.trace(model.pbar):.6g}")
    print(f"trace P_op    = {np.trace(rep.p_op):.6g}")
    print(f"trace P_n     = {np.trace(rep.p_n):.6g}")
    print(f"J(mu={scn.mu})   = {rep.j:.6g}")
    print(f"Je(mu={scn.mu})  = {rep.j_e:.6g}")
    flag = "" if rep.mu_op.feasible else "  [outside [0,1))"
    print(f"mu_op         = {rep.mu_op.value:.6g}{flag}")
    return EXIT_OK


def _cmd_design_mu(args):
    scn = _scenario(args)
    gammas = args.gamma_e if args.gamma_e else [scn.channel.gamma_e]
    model = scn.system
    tr_pop = float(np.trace(analysis.open_loop_cov(model)))
    print(f"trace P_op = {tr_pop:.6g}")
    for ge in gammas:
        design = analysis.mu_op(ge, model)
        if design.feasible:
            print(f"gamma_e={ge}: confidentiality requires mu in ({design.value:.4f}, 1)")
        else:
            print(f"gamma_e={ge}: mu_op={design.value:.4f} outside [0,1); no feasible range")
    return EXIT_OK


def _cmd_calibrate(args):
    scn = _scenario(args)
    onset = scn.channel.lambda_time
    if not onset:
        raise ScenarioError("calibration needs a fixed attack onset (lambda_time >= 1)")
    result = calibrate_threshold(
        scn.detector,
        lambda_time=onset,
        episodes=scn.episodes,
        master_seed=scn.master_seed,
        horizon=scn.horizon,
    )
    print(
        f"calibrated h = {result.h:.6g} over {result.episodes} episodes "
        f"(grid {result.grid[0]:.1e} .. {result.grid[-1]:.1e}, {result.grid.size} points)"
    )
    if args.out:
        export_csv(result, args.out)
        print(f"calibration table written to {args.out}")
    return EXIT_OK


def _cmd_reproduce(args):
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    if args.experiment == "fig4":
        model = scenarios.benchmark_system()
        mu_grid = np.linspace(0.0, 0.99, 100)
        for label, gamma_bar, gamma_e in scenarios.relative_performance_cases():
            report = mu_sweep(model, gamma_bar, gamma_e, mu_grid, label=label)
            path = os.path.join(out_dir, f"fig4_{label}.csv")
            export_csv(report, path)
            print(f"{label}: gamma_bar={gamma_bar} gamma_e={gamma_e} -> {path}")
        return EXIT_OK

    scn = _scenario(args) if args.config else scenarios.detection_scenario()
    if args.seed is not None:
        from dataclasses import replace

        scn = replace(scn, master_seed=args.seed)
    trace = run_episode(scn)
    if args.experiment == "fig5":
        avg = moving_average(trace.lam, 100)
        path = os.path.join(out_dir, "fig5_moving_average.csv")
        rows = zip(trace.k, trace.lam, avg)
        from .harness import _write_rows

        _write_rows(path, ("k", "lambda", "moving_avg"), rows)
    elif args.experiment == "fig6":
        path = os.path.join(out_dir, "fig6_posterior.csv")
        export_csv(trace, path, columns=("k", "lambda", "m_hat"))
    else:
        path = os.path.join(out_dir, "fig7_traces.csv")
        export_csv(trace, path, columns=("k", "nu", "trP", "trPe", "se_user", "se_eaves"))
    print(f"attack_onset={trace.lambda_time} tau={trace.tau} -> {path}")
    return EXIT_OK


_HANDLERS = {
    "simulate": _cmd_simulate,
    "montecarlo": _cmd_montecarlo,
    "analyze": _cmd_analyze,
    "design-mu": _cmd_design_mu,
    "calibrate": _cmd_calibrate,
    "reproduce": _cmd_reproduce,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ScenarioError, StabilityError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
