"""Dense small-matrix numerics: spectral radius, discrete Lyapunov and Riccati solvers.

Everything here operates on plain numpy arrays at desk scale (n <= 10 or so).
The solvers are iterative fixed-point schemes with explicit residual checks,
which keeps them self-verifying: a returned solution always satisfies its
defining equation to the documented tolerance.
"""

import numpy as np

__all__ = [
    "DimensionError",
    "StabilityError",
    "ConvergenceError",
    "spectral_radius",
    "solve_lyapunov",
    "solve_dare",
    "kalman_gain",
    "check_symmetric_psd",
    "symmetrize",
]


class DimensionError(ValueError):
    """Input matrix has the wrong shape."""


class StabilityError(ValueError):
    """Operation requires a Schur-stable matrix (spectral radius < 1)."""


class ConvergenceError(RuntimeError):
    """Iterative solver exhausted its iteration budget."""


def _as_square(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def symmetrize(m):
    """Average a matrix with its transpose (kills asymmetry drift)."""
    return 0.5 * (m + m.T)


def spectral_radius(m):
    """Largest absolute eigenvalue of a square matrix.

    Parameters
    ----------
    m : (n, n) array_like

    Returns
    -------
    float
        max |eig(m)|, always >= 0.
    """
    m = _as_square(m)
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def check_symmetric_psd(m, name="matrix", sym_rtol=1e-10, eig_floor=-1e-10):
    """Validate that a matrix is symmetric positive semidefinite.

    Symmetry is checked relative to the matrix scale; the eigenvalue floor
    absorbs roundoff. Raises ValueError on violation, returns the
    symmetrized matrix otherwise.
    """
    m = _as_square(m, name)
    scale = max(1.0, float(np.linalg.norm(m, "fro")))
    if np.linalg.norm(m - m.T, "fro") > sym_rtol * scale:
        raise ValueError(f"{name} is not symmetric within {sym_rtol} relative")
    ms = symmetrize(m)
    eigs = np.linalg.eigvalsh(ms)
    if eigs.min() < eig_floor:
        raise ValueError(f"{name} has negative eigenvalue {eigs.min():.3e}")
    return ms


def solve_lyapunov(t, u, resid_rtol=1e-11, max_iter=500_000):
    """Solve the discrete Lyapunov equation V = T V T' + U.

    Uses the fixed-point iteration V <- T V T' + U starting from U, with
    symmetrization after every step. T must be Schur stable; U must be
    symmetric PSD. The returned V satisfies
    ||V - T V T' - U||_F < resid_rtol * max(1, ||U||_F).

    Parameters
    ----------
    t : (n, n) array_like
        Transition matrix, spectral radius < 1.
    u : (n, n) array_like
        Symmetric PSD forcing term.

    Returns
    -------
    (n, n) ndarray
        Symmetric PSD solution.

    Raises
    ------
    StabilityError
        If spectral_radius(t) >= 1.
    DimensionError
        If shapes are inconsistent.
    ConvergenceError
        If the residual target is not met within max_iter sweeps.
    """
    t = _as_square(t, "T")
    u = check_symmetric_psd(u, "U")
    if t.shape != u.shape:
        raise DimensionError(f"T and U shapes differ: {t.shape} vs {u.shape}")
    rho = spectral_radius(t)
    if rho >= 1.0:
        raise StabilityError(f"T must satisfy rho(T) < 1, got rho = {rho:.6f}")

    scale = max(1.0, float(np.linalg.norm(u, "fro")))
    v = u.copy()
    for _ in range(max_iter):
        nxt = t @ v @ t.T + u
        resid = float(np.linalg.norm(nxt - v, "fro"))
        v = symmetrize(nxt)
        if resid < resid_rtol * scale:
            # resid above bounds the defining-equation residual of the
            # previous iterate; confirm it for the one we return.
            true_resid = float(np.linalg.norm(t @ v @ t.T + u - v, "fro"))
            if true_resid < resid_rtol * scale:
                return v
    raise ConvergenceError(
        f"Lyapunov iteration did not reach residual {resid_rtol:g} "
        f"in {max_iter} sweeps (rho(T) = {rho:.6f})"
    )


def solve_dare(a, c, q, r, sigma0=None, step_tol=1e-13, max_iter=10**6):
    """Steady-state measurement-updated Kalman error covariance.

    Iterates the filtering Riccati map

        S      = A P A' + Q
        P_next = S - S C' (C S C' + R)^{-1} C S

    until successive iterates agree to step_tol in Frobenius norm. The fixed
    point is the steady-state covariance of the optimal filter's estimate
    after incorporating the current measurement.

    Convergence is guaranteed under the standing assumptions ((A, C)
    observable, (A, sqrt(Q)) controllable, Q and R positive definite); those
    are caller obligations, the solver only checks that iteration converges.

    Parameters
    ----------
    a : (n, n) array_like
    c : (m, n) array_like
    q : (n, n) array_like
        Process noise covariance, positive definite.
    r : (m, m) array_like
        Measurement noise covariance, positive definite.
    sigma0 : (n, n) array_like, optional
        Iteration start; defaults to Q.

    Returns
    -------
    (n, n) ndarray
        Symmetric PSD solution with fixed-point residual below 1e-10.
    """
    a = _as_square(a, "A")
    n = a.shape[0]
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[1] != n:
        raise DimensionError(f"C must be (m, {n}), got {c.shape}")
    m = c.shape[0]
    q = check_symmetric_psd(q, "Q")
    r_mat = check_symmetric_psd(r, "R")
    if q.shape != (n, n) or r_mat.shape != (m, m):
        raise DimensionError("Q/R dimensions inconsistent with A/C")

    p = q.copy() if sigma0 is None else check_symmetric_psd(sigma0, "sigma0")
    for _ in range(max_iter):
        s = a @ p @ a.T + q
        gain = np.linalg.solve(c @ s @ c.T + r_mat, c @ s).T
        nxt = symmetrize(s - gain @ c @ s)
        if float(np.linalg.norm(nxt - p, "fro")) < step_tol:
            return nxt
        p = nxt
    raise ConvergenceError(f"Riccati iteration did not converge in {max_iter} steps")


def kalman_gain(a, c, q, r, pbar):
    """Steady-state gain paired with the solve_dare covariance.

    With S = A pbar A' + Q, returns K = S C' (C S C' + R)^{-1}; the filter
    x <- A x + K (y - C A x) then has steady error covariance pbar.
    """
    s = a @ pbar @ a.T + q
    return np.ascontiguousarray(np.linalg.solve(c @ s @ c.T + r, (s @ c.T).T).T)
