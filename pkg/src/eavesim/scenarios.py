"""Bundled parameter sets: the benchmark plant and the reproduction scenarios."""

from .channel import ChannelModel
from .detector import DetectorConfig
from .harness import Scenario
from .plant import SystemModel

__all__ = [
    "benchmark_system",
    "relative_performance_cases",
    "detection_scenario",
    "steady_phase_scenario",
]


def benchmark_system():
    """The second-order benchmark plant used by all bundled experiments."""
    return SystemModel.from_matrices(
        a=[[0.5, 0.1], [0.4, 0.6]],
        c=[[1.0, 0.0], [0.0, 1.0]],
        q=[[0.01, 0.0], [0.0, 0.01]],
        r=[[0.01, 0.0], [0.0, 0.01]],
    )


def relative_performance_cases():
    """Channel pairings for the mu-sweep comparison.

    The eavesdropper's channel is respectively worse than, equal to, and
    better than the user's degraded channel, plus the extreme of a perfect
    eavesdropper channel against a fully jammed user.
    """
    return [
        ("worse", 0.5, 0.7),
        ("equal", 0.5, 0.5),
        ("better", 0.5, 0.3),
        ("extreme", 1.0, 0.0),
    ]


def detection_scenario(
    mu=0.8,
    horizon=2000,
    episodes=1000,
    master_seed=20240601,
    h=3e-3,
    kappa=5e-6,
    lambda_time=700,
):
    """Quickest-detection scenario: nominal dropout 0.2 degrading to 0.3 at
    the onset, eavesdropper dropout 0.3, geometric prior 5e-6."""
    return Scenario(
        system=benchmark_system(),
        channel=ChannelModel(
            gamma=0.2, gamma_bar=0.3, gamma_e=0.3, lambda_time=lambda_time, kappa=kappa
        ),
        mu=mu,
        detector=DetectorConfig(kappa=kappa, gamma=0.2, gamma_bar=0.3, h=h),
        horizon=horizon,
        master_seed=master_seed,
        episodes=episodes,
    )


def steady_phase_scenario(
    gamma_bar,
    gamma_e,
    mu,
    horizon=100_000,
    master_seed=20240601,
    episodes=1,
):
    """Attack ongoing and already detected from the first step.

    Isolates the encoded steady phase so simulated time averages can be
    compared against the closed-form expectations without burn-in phases.
    """
    gamma = gamma_bar / 2
    return Scenario(
        system=benchmark_system(),
        channel=ChannelModel(
            gamma=gamma, gamma_bar=gamma_bar, gamma_e=gamma_e, lambda_time=0, kappa=5e-6
        ),
        mu=mu,
        detector=DetectorConfig(kappa=5e-6, gamma=gamma, gamma_bar=gamma_bar, h=1e-6),
        horizon=horizon,
        master_seed=master_seed,
        episodes=episodes,
        start_detected=True,
    )
