#!/usr/bin/env python3
"""Benchmark the compiled episode kernels against the pure-numpy fallback.

Runs the same pre-drawn episode workload through every importable backend
and reports steps/second plus the speedup of the compiled extension.

    python benchmarks/bench_kernels.py [--horizon N] [--episodes N]
"""

import argparse
import time

import numpy as np

from eavesim import analysis, scenarios
from eavesim.coder import EncodingPolicy
from eavesim.kernels import available_backends
from eavesim.plant import EpisodeStreams


def episode_inputs(scenario, episode):
    model = scenario.system
    chan = scenario.channel
    det = scenario.detector
    horizon = scenario.horizon
    streams = EpisodeStreams.from_seed(scenario.master_seed, episode=episode)
    onset = chan.lambda_time
    w = streams.process.standard_normal((horizon, model.n)) @ model.chol_q.T
    v = streams.measure.standard_normal((horizon, model.m)) @ model.chol_r.T
    decoy = streams.decoy.standard_normal((horizon, model.n)) @ model.chol_pbar.T
    x0 = model.chol_sigma0 @ streams.init.standard_normal(model.n)
    ks = np.arange(1, horizon + 1)
    drop_p = np.where(ks < onset, chan.gamma, chan.gamma_bar)
    lam = (streams.channel_user.random(horizon) >= drop_p).astype(np.int8)
    lam_e = ((ks >= onset) & (streams.channel_eaves.random(horizon) >= chan.gamma_e)).astype(np.int8)
    u = EncodingPolicy(scenario.mu, streams.indicator_seed).indicator_bits(horizon, start=1)
    pop = analysis.open_loop_cov(model)
    c = np.ascontiguousarray
    return (
        c(model.a), c(model.q), c(model.c), c(model.kbar), c(model.pbar),
        c(pop + model.pbar), c(model.sigma0), c(pop), c(x0), c(w), c(v),
        c(decoy), lam, lam_e, np.ascontiguousarray(u),
        det.kappa, det.gamma, det.gamma_bar, det.h, False,
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=2000)
    parser.add_argument("--episodes", type=int, default=100)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    scenario = scenarios.detection_scenario(horizon=args.horizon)
    inputs = [episode_inputs(scenario, ep) for ep in range(args.episodes)]
    total_steps = args.horizon * args.episodes

    backends = available_backends()
    print(f"workload: {args.episodes} episodes x {args.horizon} steps "
          f"({total_steps} steps), best of {args.repeat}")
    times = {}
    for name, mod in backends.items():
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            for inp in inputs:
                mod.run_episode_core(*inp)
            best = min(best, time.perf_counter() - t0)
        times[name] = best
        print(f"  {name:10s} {best:8.3f}s   {total_steps / best / 1e6:8.2f} Msteps/s")

    if "compiled" in times and "python" in times:
        print(f"speedup (compiled vs python): {times['python'] / times['compiled']:.1f}x")
    elif "compiled" not in times:
        print("compiled backend not built; only the fallback was timed")

    # the scalar posterior kernel
    lam = inputs[0][12]
    for name, mod in backends.items():
        t0 = time.perf_counter()
        for _ in range(2000):
            mod.shiryaev_path(lam, 5e-6, 0.2, 0.3)
        dt = time.perf_counter() - t0
        print(f"  shiryaev_path {name:10s} {2000 * lam.size / dt / 1e6:8.2f} Msteps/s")


if __name__ == "__main__":
    main()
