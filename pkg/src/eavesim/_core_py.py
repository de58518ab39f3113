"""Pure-numpy implementation of the per-step simulation kernels.

Drop-in twin of the compiled module eavesim._core; eavesim.kernels picks
whichever is importable. Keep the two implementations behaviorally
identical: the per-step arithmetic below is the reference semantics.
"""

import numpy as np

BACKEND = "python"


def shiryaev_path(lam_bits, kappa, gamma, gamma_bar, m0=1.0):
    """No-change posterior after each outcome in lam_bits, starting from m0."""
    lam_bits = np.asarray(lam_bits)
    out = np.empty(lam_bits.size, dtype=np.float64)
    m = float(m0)
    for i in range(lam_bits.size):
        p = (1.0 - kappa) * m
        if lam_bits[i] == 1:
            m = p * (1.0 - gamma) / ((1.0 - gamma_bar) + (gamma_bar - gamma) * p)
        else:
            m = p * gamma / (gamma_bar - (gamma_bar - gamma) * p)
        out[i] = m
    return out


def run_episode_core(
    a,
    q,
    c,
    kbar,
    pbar,
    pn,
    p_user0,
    p_eaves0,
    x0,
    w,
    v,
    decoy,
    lam_bits,
    lam_e_bits,
    u_bits,
    kappa,
    gamma,
    gamma_bar,
    h,
    start_detected,
):
    """Simulate one episode step by step.

    All randomness is pre-drawn: w/v/decoy are noise draws, lam/lam_e the
    reception bits (the eavesdropper's are zero before the attack), u the
    pre-arranged indicator bits. Returns the alarm-flag path, the no-change
    posterior path, both bookkept covariance traces, both true squared
    errors, and the stopping time (0 when the episode starts already
    detected, -1 when never detected).
    """
    horizon = len(lam_bits)
    at = a.T

    x = np.array(x0, dtype=float, copy=True)
    xs = np.zeros_like(x)
    xu = np.zeros_like(x)
    xe = np.zeros_like(x)
    p_u = np.array(p_user0, dtype=float, copy=True)
    p_e = np.array(p_eaves0, dtype=float, copy=True)

    nu_out = np.empty(horizon, dtype=np.int8)
    m_out = np.empty(horizon, dtype=np.float64)
    tr_p = np.empty(horizon, dtype=np.float64)
    tr_pe = np.empty(horizon, dtype=np.float64)
    se_u = np.empty(horizon, dtype=np.float64)
    se_e = np.empty(horizon, dtype=np.float64)

    m = 1.0
    detected = bool(start_detected)
    tau = 0 if detected else -1

    for i in range(horizon):
        # plant and sensor filter
        x = a @ x + w[i]
        y = c @ x + v[i]
        pred = a @ xs
        xs = pred + kbar @ (y - c @ pred)

        # detector on the user's channel outcome; the alarm reaches the
        # sensor within the step
        lam = int(lam_bits[i])
        p_pred = (1.0 - kappa) * m
        if lam == 1:
            m = p_pred * (1.0 - gamma) / (
                (1.0 - gamma_bar) + (gamma_bar - gamma) * p_pred
            )
        else:
            m = p_pred * gamma / (gamma_bar - (gamma_bar - gamma) * p_pred)
        if not detected and m <= h:
            detected = True
            tau = i + 1
        nu = 0 if detected else 1

        u_eff = int(u_bits[i]) if nu == 0 else 1
        payload = xs if u_eff == 1 else decoy[i]

        # legitimate user
        if lam == 1 and u_eff == 1:
            xu = payload.copy()
            p_u = pbar.copy()
        else:
            xu = a @ xu
            p_u = a @ p_u @ at + q

        # eavesdropper (uses whatever it receives)
        if lam_e_bits[i] == 1:
            xe = payload.copy()
            p_e = pbar.copy() if u_eff == 1 else pn.copy()
        else:
            xe = a @ xe
            p_e = a @ p_e @ at + q

        nu_out[i] = nu
        m_out[i] = m
        tr_p[i] = np.trace(p_u)
        tr_pe[i] = np.trace(p_e)
        d_u = x - xu
        d_e = x - xe
        se_u[i] = float(d_u @ d_u)
        se_e[i] = float(d_e @ d_e)

    return nu_out, m_out, tr_p, tr_pe, se_u, se_e, tau
