"""Closed-form steady-state performance of both receivers.

All expressions reduce to discrete Lyapunov solutions. The dropout-counting
chains behind them: the user's chain restarts whenever an informative packet
lands (probability (1-gamma_bar)(1-mu) per step during an attack); the
eavesdropper's chain restarts on any receipt, landing on the estimate with
probability (1-gamma_e)(1-mu) and on a decoy with probability
(1-gamma_e) mu.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import StabilityError, solve_lyapunov, spectral_radius

__all__ = [
    "SteadyStateReport",
    "MuDesign",
    "open_loop_cov",
    "noise_cov",
    "user_stationary",
    "eaves_stationary",
    "expected_cov_user",
    "expected_cov_eaves",
    "j_user",
    "j_eaves",
    "mu_op",
    "conditional_cov_user",
    "conditional_cov_eaves",
    "steady_state_report",
]


def open_loop_cov(model):
    """Asymptotic state covariance when no packets are ever used.

    This is the Lyapunov solution L(A, Q); it benchmarks both receivers:
    the user should stay below it, the eavesdropper should be pushed above.
    """
    rho = spectral_radius(model.a)
    if rho >= 1.0:
        raise StabilityError(f"open-loop covariance needs rho(A) < 1, got {rho:.6f}")
    return solve_lyapunov(model.a, model.q)


def noise_cov(model):
    """Error covariance after consuming a decoy packet: open-loop plus pbar."""
    return open_loop_cov(model) + model.pbar


def user_stationary(j, gamma_bar, mu):
    """Stationary probability that the user is j steps past its last sync.

    pi_j = (gamma_bar + (1-gamma_bar) mu)^j (1-gamma_bar)(1-mu).
    """
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    if not (0.0 <= gamma_bar < 1.0 and 0.0 <= mu < 1.0):
        raise ValueError(
            "no stationary distribution: the chain never returns to the "
            f"synchronized state for gamma_bar={gamma_bar}, mu={mu}"
        )
    stall = gamma_bar + (1.0 - gamma_bar) * mu
    return stall**j * (1.0 - gamma_bar) * (1.0 - mu)


def eaves_stationary(j, gamma_e, mu):
    """Stationary probability of the eavesdropper's chain state j.

    State 0: estimate received; state 1: decoy received; each subsequent
    dropout adds 2, preserving the parity of the last receipt:

        pi_0 = (1-gamma_e)(1-mu),  pi_1 = (1-gamma_e) mu,
        pi_{j+2} = gamma_e pi_j.
    """
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    if not 0.0 <= gamma_e < 1.0:
        raise ValueError(
            f"no stationary distribution: every packet is dropped for gamma_e={gamma_e}"
        )
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must be in [0,1], got {mu}")
    root = (1.0 - gamma_e) * (1.0 - mu) if j % 2 == 0 else (1.0 - gamma_e) * mu
    return gamma_e ** (j // 2) * root


def expected_cov_user(gamma_bar, mu, model):
    """Steady-state expected error covariance of the legitimate user.

    (1-gamma_bar)(1-mu) W + (gamma_bar + (1-gamma_bar) mu) S with
    W = L(sqrt(s) A, pbar), S = L(sqrt(s) A, Q), s = gamma_bar + (1-gamma_bar) mu.

    At the boundary (gamma_bar = 1 or mu = 1) no informative packet ever
    arrives and the limit is the open-loop covariance.
    """
    stall = gamma_bar + (1.0 - gamma_bar) * mu
    if stall >= 1.0:
        return open_loop_cov(model)
    t = np.sqrt(stall) * model.a
    w = solve_lyapunov(t, model.pbar)
    s = solve_lyapunov(t, model.q)
    return (1.0 - gamma_bar) * (1.0 - mu) * w + stall * s


def expected_cov_eaves(gamma_e, mu, model):
    """Steady-state expected error covariance of the eavesdropper.

    (1-gamma_e)(1-mu) W_e + gamma_e S_e + (1-gamma_e) mu H_e with
    W_e = L(sqrt(gamma_e) A, pbar), S_e = L(sqrt(gamma_e) A, Q),
    H_e = L(sqrt(gamma_e) A, noise_cov).

    At gamma_e = 1 nothing is ever received and the limit is open loop.
    """
    if gamma_e >= 1.0:
        return open_loop_cov(model)
    t = np.sqrt(gamma_e) * model.a
    w_e = solve_lyapunov(t, model.pbar)
    s_e = solve_lyapunov(t, model.q)
    h_e = solve_lyapunov(t, noise_cov(model))
    return (1.0 - gamma_e) * (1.0 - mu) * w_e + gamma_e * s_e + (1.0 - gamma_e) * mu * h_e


def j_user(mu, gamma_bar, model):
    """Trace objective of the legitimate user."""
    return float(np.trace(expected_cov_user(gamma_bar, mu, model)))


def j_eaves(mu, gamma_e, model):
    """Trace objective of the eavesdropper."""
    return float(np.trace(expected_cov_eaves(gamma_e, mu, model)))


class MuDesign(NamedTuple):
    """Decoy-probability threshold with a feasibility flag.

    feasible is False when the closed form lands outside [0, 1) (possible
    for extreme channel pairings); the raw value is reported either way.
    """

    value: float
    feasible: bool


def mu_op(gamma_e, model):
    """Decoy probability at which the eavesdropper reaches open loop.

    Solves j_eaves(mu) = trace(open_loop_cov) for mu in closed form; any
    mu strictly above it pushes the eavesdropper's expected covariance
    trace beyond open loop while the user stays below it.
    """
    if not 0.0 <= gamma_e < 1.0:
        raise ValueError(f"gamma_e must be in [0,1), got {gamma_e}")
    pop = open_loop_cov(model)
    tr_pop = float(np.trace(pop))
    t = np.sqrt(gamma_e) * model.a
    tr_w = float(np.trace(solve_lyapunov(t, model.pbar)))
    tr_s = float(np.trace(solve_lyapunov(t, model.q)))
    tr_h = float(np.trace(solve_lyapunov(t, pop + model.pbar)))
    value = (gamma_e * (tr_s - tr_w) + tr_w - tr_pop) / ((gamma_e - 1.0) * (tr_h - tr_w))
    return MuDesign(value=float(value), feasible=0.0 <= value < 1.0)


def _prediction_unroll(model, root, steps):
    """root propagated through `steps` prediction updates: A^j root A'^j + sum A^i Q A'^i."""
    p = root.copy()
    for _ in range(steps):
        p = model.a @ p @ model.a.T + model.q
    return p


def conditional_cov_user(j, model):
    """Expected user covariance given it is j steps past the last sync."""
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    return _prediction_unroll(model, model.pbar, j)


def conditional_cov_eaves(j, model):
    """Expected eavesdropper covariance given chain state j.

    Even j: j/2 prediction steps after an estimate receipt; odd j:
    (j-1)/2 prediction steps after a decoy receipt.
    """
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    if j % 2 == 0:
        return _prediction_unroll(model, model.pbar, j // 2)
    return _prediction_unroll(model, noise_cov(model), (j - 1) // 2)


@dataclass(frozen=True)
class SteadyStateReport:
    """Every closed-form quantity for one (gamma_bar, gamma_e, mu) design point."""

    p_op: np.ndarray
    p_n: np.ndarray
    w: np.ndarray
    s: np.ndarray
    w_e: np.ndarray
    s_e: np.ndarray
    h_e: np.ndarray
    j: float
    j_e: float
    mu_op: MuDesign


def steady_state_report(model, gamma_bar, gamma_e, mu):
    """Assemble the full closed-form report for one design point."""
    pop = open_loop_cov(model)
    p_n = pop + model.pbar
    stall = gamma_bar + (1.0 - gamma_bar) * mu
    if stall < 1.0:
        t_u = np.sqrt(stall) * model.a
        w = solve_lyapunov(t_u, model.pbar)
        s = solve_lyapunov(t_u, model.q)
    else:
        w = pop.copy()
        s = pop.copy()
    if gamma_e < 1.0:
        t_e = np.sqrt(gamma_e) * model.a
        w_e = solve_lyapunov(t_e, model.pbar)
        s_e = solve_lyapunov(t_e, model.q)
        h_e = solve_lyapunov(t_e, p_n)
        design = mu_op(gamma_e, model)
    else:
        w_e = pop.copy()
        s_e = pop.copy()
        h_e = pop.copy()
        design = MuDesign(value=float("nan"), feasible=False)
    return SteadyStateReport(
        p_op=pop,
        p_n=p_n,
        w=w,
        s=s,
        w_e=w_e,
        s_e=s_e,
        h_e=h_e,
        j=j_user(mu, gamma_bar, model),
        j_e=j_eaves(mu, gamma_e, model),
        mu_op=design,
    )
