"""Sensor-side encoding (estimate vs decoy noise) and the two receiver
estimators with their exact covariance recursions.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EncodingPolicy",
    "Packet",
    "EstimatorState",
    "encode",
    "user_update",
    "eaves_update",
    "eaves_belief_cov_update",
]

_BLOCK = 4096


@dataclass
class EncodingPolicy:
    """Pre-arranged pseudo-random indicator stream plus the alarm flag.

    The indicator u_k decides whether the sensor transmits a decoy
    (P[u_k = 0] = mu). It is a pure function of (shared_seed, k): sensor and
    legitimate user regenerate the identical stream from the shared seed, so
    no side channel is needed while the encoding is active. nu is the
    current alarm flag (1 = no eavesdropper detected yet).
    """

    mu: float
    shared_seed: int
    nu: int = 1
    _gen: np.random.Generator = field(default=None, repr=False)
    _uniforms: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.mu < 1.0:
            raise ValueError(f"mu must be in [0,1), got {self.mu}")
        self._gen = np.random.Generator(np.random.Philox(key=self.shared_seed))
        self._uniforms = np.empty(0)

    def _ensure(self, upto):
        if upto > self._uniforms.size:
            grow = max(_BLOCK, upto - self._uniforms.size)
            self._uniforms = np.concatenate([self._uniforms, self._gen.random(grow)])

    def indicator(self, k):
        """u_k in {0, 1} with P[u_k = 0] = mu."""
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        self._ensure(k + 1)
        return int(self._uniforms[k] >= self.mu)

    def indicator_bits(self, length, start=0):
        """The indicator stream u_start .. u_{start+length-1} as int8."""
        self._ensure(start + length)
        return (self._uniforms[start:start + length] >= self.mu).astype(np.int8)


@dataclass
class Packet:
    """What actually leaves the sensor at time k."""

    payload: np.ndarray
    k: int


@dataclass
class EstimatorState:
    """One receiver's estimate, bookkept error covariance, and time index."""

    x_hat: np.ndarray
    p: np.ndarray
    k: int = 0
    role: str = "user"


def encode(nu, u_k, xs_hat, n_k, k=0):
    """Form the transmitted packet.

    The sensor sends its state estimate while no eavesdropper has been
    detected (nu = 1), and also when the indicator says so during the
    encoded phase ((nu, u) = (0, 1)). Only (nu, u) = (0, 0) transmits the
    decoy noise.
    """
    if nu == 1 or u_k == 1:
        return Packet(payload=xs_hat, k=k)
    return Packet(payload=n_k, k=k)


def user_update(state, lam, u_k, packet, model):
    """Legitimate-user estimator step.

    On an informative receipt ((lam, u) = (1, 1)) the user synchronizes to
    the sensor estimate and its covariance drops to pbar. On a dropout, or
    on a receipt the shared indicator marks as decoy, it predicts through
    the model: x <- A x, P <- A P A' + Q.

    Before detection the caller passes u_k = 1 for every step (all packets
    carry the estimate then); the indicator stream still advances so both
    ends stay synchronized.
    """
    if lam == 1 and u_k == 1:
        return EstimatorState(
            x_hat=np.array(packet.payload, dtype=float, copy=True),
            p=model.pbar.copy(),
            k=state.k + 1,
            role=state.role,
        )
    return EstimatorState(
        x_hat=model.a @ state.x_hat,
        p=model.a @ state.p @ model.a.T + model.q,
        k=state.k + 1,
        role=state.role,
    )


def eaves_update(state, lam_e, u_k, packet, model, noise_cov=None):
    """Eavesdropper estimator step, bookkept from the simulator's view.

    The eavesdropper cannot observe u_k; it uses every received payload as
    if it were the sensor estimate. The true indicator is used here only to
    assign the correct covariance: synchronizing to the estimate gives pbar,
    swallowing a decoy gives the noise-receipt covariance (open-loop plus
    pbar), and a dropout predicts through the model.
    """
    if noise_cov is None:
        from .analysis import noise_cov as _noise_cov

        noise_cov = _noise_cov(model)
    if lam_e == 1:
        p_next = model.pbar.copy() if u_k == 1 else noise_cov.copy()
        return EstimatorState(
            x_hat=np.array(packet.payload, dtype=float, copy=True),
            p=p_next,
            k=state.k + 1,
            role=state.role,
        )
    return EstimatorState(
        x_hat=model.a @ state.x_hat,
        p=model.a @ state.p @ model.a.T + model.q,
        k=state.k + 1,
        role=state.role,
    )


def eaves_belief_cov_update(p, lam_e, model):
    """Covariance the eavesdropper itself believes it has.

    Diagnostic companion to eaves_update: the eavesdropper assumes every
    receipt synchronizes it to the sensor estimate, so its self-assessed
    covariance is pbar on any receipt and the prediction update otherwise.
    """
    if lam_e == 1:
        return model.pbar.copy()
    return model.a @ p @ model.a.T + model.q
