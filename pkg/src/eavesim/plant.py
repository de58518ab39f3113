"""Plant simulation: LTI dynamics, the sensor's steady-state local filter,
decoy noise packets, and the per-episode random-stream layout.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DimensionError,
    StabilityError,
    check_symmetric_psd,
    kalman_gain,
    solve_dare,
    solve_lyapunov,
    spectral_radius,
)

__all__ = ["SystemModel", "PlantState", "EpisodeStreams", "step_plant", "sample_noise_packet"]


@dataclass(frozen=True)
class SystemModel:
    """Stable LTI plant with derived steady-state filter quantities.

    Fields a, c, q, r, sigma0 define x' = a x + w, y = c x + v with
    w ~ N(0, q), v ~ N(0, r), x0 ~ N(0, sigma0). pbar and kbar are the
    sensor filter's steady-state error covariance and gain; they are
    derived in from_matrices, not supplied.
    """

    a: np.ndarray
    c: np.ndarray
    q: np.ndarray
    r: np.ndarray
    sigma0: np.ndarray
    pbar: np.ndarray
    kbar: np.ndarray
    chol_q: np.ndarray = field(repr=False, default=None)
    chol_r: np.ndarray = field(repr=False, default=None)
    chol_sigma0: np.ndarray = field(repr=False, default=None)
    chol_pbar: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_matrices(cls, a, c, q, r, sigma0=None):
        """Validate parameters and derive the steady-state filter.

        sigma0 defaults to the stationary state covariance (the plant then
        starts in steady state), which is the natural choice for long-run
        statistics.
        """
        a = np.asarray(a, dtype=float)
        c = np.asarray(c, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"a must be square, got {a.shape}")
        rho = spectral_radius(a)
        if rho >= 1.0:
            raise StabilityError(f"plant must be stable, rho(a) = {rho:.6f}")
        q = check_symmetric_psd(q, "q")
        r = check_symmetric_psd(r, "r")
        if sigma0 is None:
            sigma0 = solve_lyapunov(a, q)
        sigma0 = check_symmetric_psd(sigma0, "sigma0")
        pbar = solve_dare(a, c, q, r, sigma0=sigma0)
        kbar = kalman_gain(a, c, q, r, pbar)
        return cls(
            a=a, c=c, q=q, r=r, sigma0=sigma0, pbar=pbar, kbar=kbar,
            chol_q=np.linalg.cholesky(q),
            chol_r=np.linalg.cholesky(r),
            chol_sigma0=np.linalg.cholesky(sigma0),
            chol_pbar=np.linalg.cholesky(pbar),
        )

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def m(self):
        return self.c.shape[0]


@dataclass
class PlantState:
    """True state, the sensor's current estimate, and the time index."""

    x: np.ndarray
    xs_hat: np.ndarray
    k: int = 0


@dataclass(frozen=True)
class EpisodeStreams:
    """Independent random streams for one episode.

    Each consumer (process noise, measurement noise, decoy packets, the two
    channels, attack-time draw, initial state) gets its own generator, so
    varying one scenario knob never perturbs the draws of the others. The
    indicator stream is identified by an integer seed because sensor and
    user must be able to regenerate it independently.
    """

    process: np.random.Generator
    measure: np.random.Generator
    decoy: np.random.Generator
    channel_user: np.random.Generator
    channel_eaves: np.random.Generator
    attack: np.random.Generator
    init: np.random.Generator
    indicator_seed: int

    @classmethod
    def from_seed(cls, seed, episode=None):
        """Build the per-episode streams from a master seed.

        With an episode index, child streams are spawned per episode so
        Monte Carlo runs are reproducible and order-independent.
        """
        if isinstance(seed, np.random.SeedSequence):
            root = seed
        elif episode is None:
            root = np.random.SeedSequence(entropy=seed)
        else:
            root = np.random.SeedSequence(entropy=seed, spawn_key=(episode,))
        children = root.spawn(8)
        gens = [np.random.Generator(np.random.PCG64(c)) for c in children[:7]]
        ind_seed = int(children[7].generate_state(1, np.uint64)[0])
        return cls(*gens, indicator_seed=ind_seed)


def initial_plant_state(model, streams):
    """Draw x0 ~ N(0, sigma0); the sensor estimate starts at zero."""
    x0 = model.chol_sigma0 @ streams.init.standard_normal(model.n)
    return PlantState(x=x0, xs_hat=np.zeros(model.n), k=0)


def step_plant(state, model, streams):
    """Advance the plant one step and run the sensor's steady-state filter.

    x' = A x + w, y' = C x' + v, and the sensor updates its estimate with
    the fixed steady-state gain:

        xs' = A xs + kbar (y' - C A xs)

    Returns a new PlantState; the measurement is internal to the sensor.
    """
    w = model.chol_q @ streams.process.standard_normal(model.n)
    v = model.chol_r @ streams.measure.standard_normal(model.m)
    x_next = model.a @ state.x + w
    y_next = model.c @ x_next + v
    pred = model.a @ state.xs_hat
    xs_next = pred + model.kbar @ (y_next - model.c @ pred)
    return PlantState(x=x_next, xs_hat=xs_next, k=state.k + 1)


def sample_noise_packet(model, streams):
    """Draw one decoy packet ~ N(0, pbar), independent of the plant noise."""
    return model.chol_pbar @ streams.decoy.standard_normal(model.n)
