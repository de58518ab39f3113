"""Bernoulli dropout channels for the legitimate user and the eavesdropper,
and the attack-onset model.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

__all__ = ["ChannelModel", "ChannelOutcome", "sample_outcome", "sample_attack_time"]


@dataclass(frozen=True)
class ChannelModel:
    """Channel qualities before and during an attack.

    gamma is the user's nominal dropout probability, gamma_bar the degraded
    dropout probability once the attack starts (gamma < gamma_bar), gamma_e
    the eavesdropper's dropout probability. Before the attack onset
    lambda_time the eavesdropper has no channel at all. lambda_time=None
    means the onset is drawn from the geometric prior with parameter kappa;
    lambda_time=0 models an attack already in progress at episode start.

    Boundary values gamma_bar=1 (full jamming) and gamma_e in {0, 1} are
    allowed; they are meaningful extremes of the analysis.
    """

    gamma: float
    gamma_bar: float
    gamma_e: float
    lambda_time: Optional[int] = None
    kappa: float = 1e-4

    def __post_init__(self):
        problems = self.validate()
        if problems:
            raise ValueError("invalid ChannelModel: " + "; ".join(problems))

    def validate(self):
        problems = []
        if not 0.0 < self.gamma < 1.0:
            problems.append(f"gamma must be in (0,1), got {self.gamma}")
        if not 0.0 < self.gamma_bar <= 1.0:
            problems.append(f"gamma_bar must be in (0,1], got {self.gamma_bar}")
        if not self.gamma < self.gamma_bar:
            problems.append(
                f"attack must degrade the user channel: gamma={self.gamma} "
                f">= gamma_bar={self.gamma_bar}"
            )
        if not 0.0 <= self.gamma_e <= 1.0:
            problems.append(f"gamma_e must be in [0,1], got {self.gamma_e}")
        if self.lambda_time is not None and self.lambda_time < 0:
            problems.append(f"lambda_time must be >= 0, got {self.lambda_time}")
        if not 0.0 < self.kappa < 1.0:
            problems.append(f"kappa must be in (0,1), got {self.kappa}")
        return problems


class ChannelOutcome(NamedTuple):
    lam: int
    lam_e: int


def sample_outcome(model, k, rng, lambda_time=None):
    """Draw the two reception bits at time k.

    P[lam = 0] is gamma before the attack and gamma_bar during it. The
    eavesdropper receives nothing before the attack; afterwards
    P[lam_e = 1] = 1 - gamma_e. The two bits are independent draws (the
    model treats both links as independent Bernoulli processes; nothing
    couples them).

    Both uniforms are consumed every step so the stream layout does not
    depend on the phase.
    """
    if k < 0:
        raise ValueError(f"time index must be >= 0, got {k}")
    onset = model.lambda_time if lambda_time is None else lambda_time
    if onset is None:
        raise ValueError("attack time not set; pass lambda_time or fix it in the model")
    u_user, u_eaves = rng.random(2)
    attacked = k >= onset
    drop_p = model.gamma_bar if attacked else model.gamma
    lam = 0 if u_user < drop_p else 1
    lam_e = 0 if not attacked else (0 if u_eaves < model.gamma_e else 1)
    return ChannelOutcome(lam=lam, lam_e=lam_e)


def sample_attack_time(kappa, rng):
    """Geometric attack onset on {1, 2, ...}: P[L = k] = (1-kappa)^(k-1) kappa."""
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must be in (0,1), got {kappa}")
    return int(rng.geometric(kappa))
