"""Episode orchestration, Monte Carlo aggregation, and CSV export.

An episode runs through three phases: before the attack the user's channel
is nominal and the eavesdropper silent; from the attack onset the user's
channel degrades and the eavesdropper starts intercepting while the sensor,
unaware, keeps sending estimates; once the detector trips, the sensor mixes
decoy noise into its transmissions. The hot per-step loop lives in
eavesim.kernels; this module prepares the random draws, wraps results, and
aggregates across episodes.
"""

import configparser
import csv
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import analysis
from .channel import ChannelModel, sample_attack_time
from .coder import EncodingPolicy
from .detector import DetectorConfig
from .kernels import run_episode_core
from .plant import EpisodeStreams, SystemModel

__all__ = [
    "Scenario",
    "ScenarioError",
    "EpisodeTrace",
    "EpisodeSummary",
    "MonteCarloReport",
    "MuSweepReport",
    "run_episode",
    "run_monte_carlo",
    "mu_sweep",
    "export_csv",
    "load_csv",
]

TRACE_COLUMNS = ("k", "lambda", "lambda_e", "u", "nu", "m_hat", "trP", "trPe", "se_user", "se_eaves")


class ScenarioError(ValueError):
    """Scenario configuration violates its invariants."""


@dataclass(frozen=True)
class Scenario:
    """Everything needed to run seeded episodes of the full pipeline."""

    system: SystemModel
    channel: ChannelModel
    mu: float
    detector: DetectorConfig
    horizon: int
    master_seed: int = 0
    episodes: int = 100
    shared_seed: Optional[int] = None
    start_detected: bool = False

    def __post_init__(self):
        problems = self.validate()
        if problems:
            raise ScenarioError("invalid scenario: " + "; ".join(problems))

    def validate(self):
        problems = []
        if not 0.0 <= self.mu < 1.0:
            problems.append(f"mu must be in [0,1), got {self.mu}")
        if self.horizon < 1:
            problems.append(f"horizon must be >= 1, got {self.horizon}")
        if self.episodes < 1:
            problems.append(f"episodes must be >= 1, got {self.episodes}")
        # horizon <= lambda_time is legal: it models an attack that never
        # starts inside the window (the no-attack control case).
        onset = self.channel.lambda_time
        if self.start_detected and onset not in (0, None):
            problems.append("start_detected episodes must have the attack ongoing (lambda_time=0)")
        if not self.start_detected and onset == 0:
            problems.append("lambda_time=0 requires start_detected")
        return problems


@dataclass
class EpisodeTrace:
    """Per-step records of one episode plus its summary quantities."""

    k: np.ndarray
    lam: np.ndarray
    lam_e: np.ndarray
    u: np.ndarray
    nu: np.ndarray
    m_hat: np.ndarray
    tr_p: np.ndarray
    tr_pe: np.ndarray
    se_user: np.ndarray
    se_eaves: np.ndarray
    lambda_time: int
    tau: Optional[int]

    @property
    def horizon(self):
        return self.k.size

    @property
    def delay(self):
        """Positive detection delay, or None when the episode never stopped."""
        if self.tau is None:
            return None
        return max(0, self.tau - self.lambda_time)

    def phase_masks(self):
        """Disjoint boolean masks for the three phases, keyed by name.

        A false alarm (tau before the onset) truncates the pre-attack phase:
        encoding is active from tau regardless.
        """
        tau_eff = self.tau if self.tau is not None else self.horizon + 1
        return {
            "pre_attack": (self.k < self.lambda_time) & (self.k < tau_eff),
            "attack_undetected": (self.k >= self.lambda_time) & (self.k < tau_eff),
            "encoded": self.k >= tau_eff,
        }

    def phase_averages(self):
        """Per-phase time-averaged covariance traces: {phase: (trP, trPe, steps)}."""
        out = {}
        for name, mask in self.phase_masks().items():
            steps = int(mask.sum())
            if steps:
                out[name] = (float(self.tr_p[mask].mean()), float(self.tr_pe[mask].mean()), steps)
            else:
                out[name] = (math.nan, math.nan, 0)
        return out


def run_episode(scenario, seed=None, episode=None):
    """Run one seeded episode and return its trace.

    The same (seed, episode) pair always reproduces the identical trace.
    seed defaults to the scenario's master seed; pass episode to select one
    member of the Monte Carlo family.
    """
    model = scenario.system
    chan = scenario.channel
    det = scenario.detector
    horizon = scenario.horizon
    n = model.n

    streams = EpisodeStreams.from_seed(
        scenario.master_seed if seed is None else seed, episode=episode
    )
    onset = chan.lambda_time
    if onset is None:
        onset = sample_attack_time(chan.kappa, streams.attack)

    w = streams.process.standard_normal((horizon, n)) @ model.chol_q.T
    v = streams.measure.standard_normal((horizon, model.m)) @ model.chol_r.T
    decoy = streams.decoy.standard_normal((horizon, n)) @ model.chol_pbar.T
    x0 = model.chol_sigma0 @ streams.init.standard_normal(n)

    ks = np.arange(1, horizon + 1, dtype=np.int64)
    uu = streams.channel_user.random(horizon)
    ue = streams.channel_eaves.random(horizon)
    drop_p = np.where(ks < onset, chan.gamma, chan.gamma_bar)
    lam_bits = (uu >= drop_p).astype(np.int8)
    lam_e_bits = ((ks >= onset) & (ue >= chan.gamma_e)).astype(np.int8)

    ind_seed = scenario.shared_seed if scenario.shared_seed is not None else streams.indicator_seed
    policy = EncodingPolicy(mu=scenario.mu, shared_seed=ind_seed)
    u_bits = np.ascontiguousarray(policy.indicator_bits(horizon, start=1))

    pop = analysis.open_loop_cov(model)
    pn = pop + model.pbar

    contig = np.ascontiguousarray
    nu, m_hat, tr_p, tr_pe, se_u, se_e, tau = run_episode_core(
        contig(model.a),
        contig(model.q),
        contig(model.c),
        contig(model.kbar),
        contig(model.pbar),
        contig(pn),
        contig(model.sigma0),
        contig(pop),
        contig(x0),
        contig(w),
        contig(v),
        contig(decoy),
        lam_bits,
        lam_e_bits,
        u_bits,
        det.kappa,
        det.gamma,
        det.gamma_bar,
        det.h,
        scenario.start_detected,
    )
    return EpisodeTrace(
        k=ks,
        lam=lam_bits,
        lam_e=lam_e_bits,
        u=u_bits,
        nu=nu,
        m_hat=m_hat,
        tr_p=tr_p,
        tr_pe=tr_pe,
        se_user=se_u,
        se_eaves=se_e,
        lambda_time=int(onset),
        tau=None if tau < 0 else int(tau),
    )


@dataclass(frozen=True)
class EpisodeSummary:
    """Compact per-episode record kept by the Monte Carlo driver."""

    episode: int
    lambda_time: int
    tau: Optional[int]
    delay: Optional[int]
    false_alarm: bool
    min_m_pre_attack: float
    steps_to_probe: Optional[int]
    phase_tr_p: dict
    phase_tr_pe: dict
    phase_steps: dict


@dataclass
class MonteCarloReport:
    """Aggregates over seeded episodes plus closed-form comparison columns."""

    scenario: Scenario
    summaries: list
    probe: float
    j_user_closed: float
    j_eaves_closed: float

    @property
    def episodes(self):
        return len(self.summaries)

    @property
    def delays(self):
        return np.array([s.delay for s in self.summaries if s.delay is not None], dtype=float)

    @property
    def false_alarms(self):
        return sum(s.false_alarm for s in self.summaries)

    @property
    def undetected(self):
        return sum(s.tau is None for s in self.summaries)

    def phase_average(self, phase):
        """Pooled time-average (trP, trPe, total steps, se_trP, se_trPe) for a phase."""
        means_p, means_pe, weights = [], [], []
        for s in self.summaries:
            steps = s.phase_steps.get(phase, 0)
            if steps:
                means_p.append(s.phase_tr_p[phase])
                means_pe.append(s.phase_tr_pe[phase])
                weights.append(steps)
        if not weights:
            return math.nan, math.nan, 0, math.nan, math.nan
        means_p = np.array(means_p)
        means_pe = np.array(means_pe)
        weights = np.array(weights, dtype=float)
        avg_p = float(np.average(means_p, weights=weights))
        avg_pe = float(np.average(means_pe, weights=weights))
        n_ep = len(weights)
        se_p = float(means_p.std(ddof=1) / np.sqrt(n_ep)) if n_ep > 1 else math.nan
        se_pe = float(means_pe.std(ddof=1) / np.sqrt(n_ep)) if n_ep > 1 else math.nan
        return avg_p, avg_pe, int(weights.sum()), se_p, se_pe

    def encoded_phase_errors(self):
        """Relative deviation of the encoded-phase averages from the closed forms."""
        avg_p, avg_pe, steps, _, _ = self.phase_average("encoded")
        if not steps:
            return math.nan, math.nan
        return (
            abs(avg_p - self.j_user_closed) / self.j_user_closed,
            abs(avg_pe - self.j_eaves_closed) / self.j_eaves_closed,
        )

    def bayes_risk(self):
        """Empirical detection cost over stopped episodes (c from the detector)."""
        pairs = [(s.tau, s.lambda_time) for s in self.summaries if s.tau is not None]
        if not pairs:
            return math.nan
        taus = np.array([t for t, _ in pairs], dtype=float)
        onsets = np.array([l for _, l in pairs], dtype=float)
        c = self.scenario.detector.c
        return float(c * np.maximum(taus - onsets, 0.0).mean() + np.mean(taus < onsets))

    def probe_fraction(self, within):
        """Fraction of episodes whose posterior fell below the probe within
        `within` post-attack steps."""
        hits = sum(
            1
            for s in self.summaries
            if s.steps_to_probe is not None and s.steps_to_probe <= within
        )
        return hits / self.episodes


def run_monte_carlo(scenario, episodes=None, master_seed=None, probe=1e-2):
    """Run seeded episodes and aggregate.

    Episodes are independent (episode index e uses the spawned child e of
    the master seed), so the report is invariant to execution order; they
    are evaluated in index order here. probe is a diagnostic posterior
    level whose first post-attack crossing time is recorded per episode.
    """
    episodes = scenario.episodes if episodes is None else episodes
    master = scenario.master_seed if master_seed is None else master_seed
    summaries = []
    for ep in range(episodes):
        trace = run_episode(scenario, seed=master, episode=ep)
        post = trace.k >= trace.lambda_time
        below = np.nonzero(post & (trace.m_hat < probe))[0]
        steps_to_probe = (
            int(trace.k[below[0]] - trace.lambda_time) if below.size else None
        )
        pre = trace.k < trace.lambda_time
        min_pre = float(trace.m_hat[pre].min()) if pre.any() else math.nan
        averages = trace.phase_averages()
        summaries.append(
            EpisodeSummary(
                episode=ep,
                lambda_time=trace.lambda_time,
                tau=trace.tau,
                delay=trace.delay,
                false_alarm=trace.tau is not None and trace.tau < trace.lambda_time,
                min_m_pre_attack=min_pre,
                steps_to_probe=steps_to_probe,
                phase_tr_p={p: a[0] for p, a in averages.items()},
                phase_tr_pe={p: a[1] for p, a in averages.items()},
                phase_steps={p: a[2] for p, a in averages.items()},
            )
        )
    return MonteCarloReport(
        scenario=scenario,
        summaries=summaries,
        probe=probe,
        j_user_closed=analysis.j_user(scenario.mu, scenario.channel.gamma_bar, scenario.system),
        j_eaves_closed=analysis.j_eaves(scenario.mu, scenario.channel.gamma_e, scenario.system),
    )


@dataclass(frozen=True)
class MuSweepReport:
    """Closed-form user/eavesdropper traces over a grid of decoy probabilities."""

    label: str
    gamma_bar: float
    gamma_e: float
    mu: np.ndarray
    j: np.ndarray
    j_e: np.ndarray

    @property
    def relgap(self):
        return (self.j_e - self.j) / self.j


def mu_sweep(model, gamma_bar, gamma_e, mu_grid=None, label=""):
    """Evaluate the trace objectives over a mu grid for one channel pairing."""
    if mu_grid is None:
        mu_grid = np.linspace(0.0, 0.99, 100)
    mu_grid = np.asarray(mu_grid, dtype=float)
    j = np.array([analysis.j_user(m, gamma_bar, model) for m in mu_grid])
    j_e = np.array([analysis.j_eaves(m, gamma_e, model) for m in mu_grid])
    return MuSweepReport(
        label=label, gamma_bar=gamma_bar, gamma_e=gamma_e, mu=mu_grid, j=j, j_e=j_e
    )


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return f"{value:.9g}"


def _write_rows(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"failed writing CSV to {path}: {exc}") from exc


def export_csv(obj, path, columns=None):
    """Write a trace or report to a headered CSV file.

    EpisodeTrace rows are per step (optionally restricted to a subset of
    trace columns), MuSweepReport rows are per grid point, CalibrationResult
    rows are per candidate threshold, MonteCarloReport rows are per episode.
    Floats are serialized with 9 significant digits.
    """
    from .detector import CalibrationResult

    if isinstance(obj, EpisodeTrace):
        cols = TRACE_COLUMNS if columns is None else tuple(columns)
        unknown = set(cols) - set(TRACE_COLUMNS)
        if unknown:
            raise ValueError(f"unknown trace columns: {sorted(unknown)}")
        arrays = {
            "k": obj.k,
            "lambda": obj.lam,
            "lambda_e": obj.lam_e,
            "u": obj.u,
            "nu": obj.nu,
            "m_hat": obj.m_hat,
            "trP": obj.tr_p,
            "trPe": obj.tr_pe,
            "se_user": obj.se_user,
            "se_eaves": obj.se_eaves,
        }
        rows = zip(*(arrays[c] for c in cols)) if obj.horizon else []
        _write_rows(path, cols, rows)
    elif isinstance(obj, MuSweepReport):
        rows = zip(obj.mu, obj.j, obj.j_e, obj.relgap)
        _write_rows(path, ("mu", "J", "Je", "relgap"), rows)
    elif isinstance(obj, CalibrationResult):
        _write_rows(path, ("h", "false_alarms", "mean_delay"), obj.rows())
    elif isinstance(obj, MonteCarloReport):
        header = (
            "episode",
            "lambda_time",
            "tau",
            "delay",
            "false_alarm",
            "min_m_pre_attack",
            "steps_to_probe",
            "trP_encoded",
            "trPe_encoded",
        )
        rows = (
            (
                s.episode,
                s.lambda_time,
                -1 if s.tau is None else s.tau,
                -1 if s.delay is None else s.delay,
                s.false_alarm,
                s.min_m_pre_attack,
                -1 if s.steps_to_probe is None else s.steps_to_probe,
                s.phase_tr_p["encoded"],
                s.phase_tr_pe["encoded"],
            )
            for s in obj.summaries
        )
        _write_rows(path, header, rows)
    else:
        raise TypeError(f"no CSV exporter for {type(obj).__name__}")


def load_csv(path):
    """Read a headered CSV back as {column: float ndarray} (9-digit round trip)."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
    except OSError as exc:
        raise OSError(f"failed reading CSV from {path}: {exc}") from exc
    cols = {name: np.array([float(r[i]) if r[i] else math.nan for r in rows]) for i, name in enumerate(header)}
    return cols


def _parse_value(raw):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def scenario_from_config(path, overrides=None):
    """Build a Scenario from a TOML-style key-value config file.

    Sections [system], [channel], [encoding], [detector], [run]; values are
    JSON literals (numbers, booleans, nested arrays for matrices). See the
    README for a complete example. overrides is an optional {key: value}
    mapping applied on top (mu, h, master_seed, episodes, horizon).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise ScenarioError(f"config file not found: {path}")
    try:
        sec = {name: {k: _parse_value(v) for k, v in parser[name].items()} for name in parser.sections()}
        system = SystemModel.from_matrices(
            a=sec["system"]["a"],
            c=sec["system"]["c"],
            q=sec["system"]["q"],
            r=sec["system"]["r"],
            sigma0=sec["system"].get("sigma0"),
        )
        chan_sec = sec["channel"]
        channel = ChannelModel(
            gamma=chan_sec["gamma"],
            gamma_bar=chan_sec["gamma_bar"],
            gamma_e=chan_sec["gamma_e"],
            lambda_time=chan_sec.get("lambda_time"),
            kappa=chan_sec.get("kappa", 1e-4),
        )
        det_sec = sec.get("detector", {})
        detector = DetectorConfig(
            kappa=det_sec.get("kappa", channel.kappa),
            gamma=det_sec.get("gamma", channel.gamma),
            gamma_bar=det_sec.get("gamma_bar", channel.gamma_bar),
            h=det_sec.get("h", 3e-3),
            c=det_sec.get("c", 0.1),
        )
        run_sec = sec.get("run", {})
        enc_sec = sec.get("encoding", {})
        overrides = overrides or {}
        return Scenario(
            system=system,
            channel=channel,
            mu=overrides.get("mu", enc_sec.get("mu", 0.0)),
            detector=(
                replace(detector, h=overrides["h"]) if "h" in overrides else detector
            ),
            horizon=overrides.get("horizon", run_sec.get("horizon", 2000)),
            master_seed=overrides.get("master_seed", run_sec.get("master_seed", 0)),
            episodes=overrides.get("episodes", run_sec.get("episodes", 100)),
            shared_seed=enc_sec.get("shared_seed"),
            start_detected=run_sec.get("start_detected", False),
        )
    except KeyError as exc:
        raise ScenarioError(f"config {path} is missing required key {exc}") from exc
