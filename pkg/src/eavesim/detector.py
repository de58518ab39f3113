"""Bayesian quickest detection of the attack from the user's channel outcomes.

The attack onset has a geometric prior; before it the dropout probability is
gamma, after it gamma_bar. The sufficient statistic is the scalar no-change
posterior m = P[no attack yet | outcomes so far], driven by a two-branch
Bayes update. The published form of this recursion carries no dependence on
the current outcome; it coincides with the reception branch below, so the
full observation-dependent filter is implemented and the reception branch is
checked against that form algebraically in the tests.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels

__all__ = [
    "DetectorConfig",
    "ShiryaevState",
    "CalibrationResult",
    "update_posterior",
    "check_stop",
    "bayes_risk",
    "calibrate_threshold",
    "moving_average",
    "default_threshold_grid",
]


@dataclass(frozen=True)
class DetectorConfig:
    """Prior and channel parameters of the detector plus its operating point.

    h is the stopping threshold on the no-change posterior; c is the
    per-step delay penalty used only when evaluating the Bayes risk. The
    two are independent configuration values.
    """

    kappa: float
    gamma: float
    gamma_bar: float
    h: float
    c: float = 0.1

    def __post_init__(self):
        problems = self.validate()
        if problems:
            raise ValueError("invalid DetectorConfig: " + "; ".join(problems))

    def validate(self):
        problems = []
        for name in ("kappa", "gamma", "gamma_bar", "h"):
            val = getattr(self, name)
            if not 0.0 < val < 1.0:
                problems.append(f"{name} must be in (0,1), got {val}")
        if self.c < 0.0:
            problems.append(f"c must be >= 0, got {self.c}")
        return problems


@dataclass
class ShiryaevState:
    """No-change posterior, time index, and the stopping time once declared."""

    m_hat: float = 1.0
    k: int = 0
    stopped_at: Optional[int] = None


def update_posterior(state, lam, config):
    """One Bayes update of the no-change posterior.

    With prior-predictive p = (1-kappa) m:

        reception (lam=1):  m' = p (1-gamma) / ((1-gamma_bar) + (gamma_bar-gamma) p)
        dropout   (lam=0):  m' = p gamma     / (gamma_bar - (gamma_bar-gamma) p)

    Denominators stay away from zero for valid configs. Returns a new state
    at time k+1; the stopping mark carries over unchanged.
    """
    p = (1.0 - config.kappa) * state.m_hat
    if lam == 1:
        m_next = p * (1.0 - config.gamma) / (
            (1.0 - config.gamma_bar) + (config.gamma_bar - config.gamma) * p
        )
    else:
        m_next = p * config.gamma / (
            config.gamma_bar - (config.gamma_bar - config.gamma) * p
        )
    return ShiryaevState(m_hat=m_next, k=state.k + 1, stopped_at=state.stopped_at)


def check_stop(state, h):
    """Stop when the no-change posterior has fallen to the threshold.

    The comparison is m_hat <= h. Records the stopping time on the state
    the first time it triggers (it never changes afterwards) and returns
    whether the detector has stopped.
    """
    if state.stopped_at is None and state.k >= 1 and state.m_hat <= h:
        state.stopped_at = state.k
    return state.stopped_at is not None


def bayes_risk(episodes, c):
    """Empirical detection cost: c * mean positive delay + false-alarm rate.

    episodes is a sequence of (tau, lambda_time) pairs with finite tau.
    """
    episodes = list(episodes)
    if not episodes:
        raise ValueError("bayes_risk needs at least one episode")
    taus = np.array([float(t) for t, _ in episodes])
    onsets = np.array([float(l) for _, l in episodes])
    if not np.all(np.isfinite(taus)):
        raise ValueError("bayes_risk needs finite stopping times")
    delay = np.maximum(taus - onsets, 0.0)
    false_alarm = np.mean(taus < onsets)
    return float(c * delay.mean() + false_alarm)


def default_threshold_grid():
    """61 logarithmic candidate thresholds spanning 1e-6 .. 1e-1."""
    return np.logspace(-6, -1, 61)


@dataclass(frozen=True)
class CalibrationResult:
    """Zero-false-alarm threshold choice plus the per-candidate diagnostics."""

    h: float
    grid: np.ndarray
    false_alarms: np.ndarray
    mean_delay: np.ndarray
    episodes: int

    def rows(self):
        for h, fa, d in zip(self.grid, self.false_alarms, self.mean_delay):
            yield h, int(fa), d


def calibrate_threshold(
    config,
    lambda_time,
    episodes=1000,
    master_seed=0,
    horizon=None,
    grid=None,
):
    """Pick the largest grid threshold that never stops before the attack.

    Simulates `episodes` channel-outcome sequences with the attack starting
    at lambda_time, runs the posterior over each, and for every candidate h
    counts episodes whose posterior reaches h before the onset (a false
    alarm) and records the mean positive detection delay among episodes
    that stop. The returned h is the largest candidate with zero false
    alarms; candidates are resolved only to the grid spacing. The grid
    minimum is returned if every candidate false-alarms.
    """
    if episodes < 1:
        raise ValueError("calibration needs at least one episode")
    if lambda_time < 1:
        raise ValueError(f"lambda_time must be >= 1, got {lambda_time}")
    grid = default_threshold_grid() if grid is None else np.asarray(grid, dtype=float)
    grid = np.sort(grid)
    if horizon is None:
        horizon = lambda_time + 1999
    n_pre = lambda_time - 1

    min_pre = np.empty(episodes)
    first_cross = np.full((episodes, grid.size), -1, dtype=np.int64)
    ks = np.arange(1, horizon + 1)
    drop_p = np.where(ks < lambda_time, config.gamma, config.gamma_bar)
    for ep in range(episodes):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=master_seed, spawn_key=(ep,)))
        )
        lam_bits = (rng.random(horizon) >= drop_p).astype(np.int8)
        path = kernels.shiryaev_path(
            lam_bits, config.kappa, config.gamma, config.gamma_bar
        )
        min_pre[ep] = path[:n_pre].min() if n_pre > 0 else np.inf
        # the running minimum is non-increasing, so the first time the path
        # reaches each candidate h is one binary search per candidate
        running = np.minimum.accumulate(path)
        idx = np.searchsorted(-running, -grid, side="left")
        hit = idx < horizon
        first_cross[ep, hit] = idx[hit] + 1

    false_alarms = np.empty(grid.size, dtype=np.int64)
    mean_delay = np.full(grid.size, np.nan)
    for gi in range(grid.size):
        crossed = first_cross[:, gi]
        false_alarms[gi] = int(np.sum((crossed > 0) & (crossed < lambda_time)))
        detected = crossed[crossed >= lambda_time]
        if detected.size:
            mean_delay[gi] = float(np.mean(detected - lambda_time))

    ok = np.nonzero(false_alarms == 0)[0]
    chosen = grid[ok[-1]] if ok.size else grid[0]
    return CalibrationResult(
        h=float(chosen),
        grid=grid,
        false_alarms=false_alarms,
        mean_delay=mean_delay,
        episodes=episodes,
    )


def moving_average(outcomes, window):
    """Sliding mean of a bit sequence; the first window-1 entries average
    the available prefix."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    x = np.asarray(outcomes, dtype=float)
    csum = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(1, x.size + 1)
    lo = np.maximum(idx - window, 0)
    return (csum[idx] - csum[lo]) / (idx - lo)
