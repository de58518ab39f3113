import numpy as np
import pytest
import scipy.linalg as sla

from eavesim.linalg import (
    ConvergenceError,
    DimensionError,
    StabilityError,
    kalman_gain,
    solve_dare,
    solve_lyapunov,
    spectral_radius,
)

from conftest import random_psd, random_stable

A_BENCH = np.array([[0.5, 0.1], [0.4, 0.6]])
Q_BENCH = 0.01 * np.eye(2)
R_BENCH = 0.01 * np.eye(2)


def truncated_lyapunov_sum(t, u, terms):
    """Independent oracle: partial sum of T^j U (T')^j."""
    total = np.zeros_like(u)
    term = u.copy()
    for _ in range(terms):
        total += term
        term = t @ term @ t.T
    return total


class TestSpectralRadius:
    def test_identity(self):
        assert spectral_radius(np.eye(2)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert spectral_radius(np.diag([0.5, 0.1])) == pytest.approx(0.5)

    def test_benchmark_plant(self):
        assert spectral_radius(A_BENCH) == pytest.approx(0.7562, abs=1e-4)

    def test_scaling_homogeneity(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = rng.integers(1, 5)
            m = rng.standard_normal((n, n))
            k = rng.uniform(-3.0, 3.0)
            assert spectral_radius(k * m) == pytest.approx(
                abs(k) * spectral_radius(m), abs=1e-9
            )

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            spectral_radius(np.ones((2, 3)))


class TestSolveLyapunov:
    def test_zero_transition(self):
        v = solve_lyapunov(np.zeros((2, 2)), np.eye(2))
        np.testing.assert_allclose(v, np.eye(2), atol=1e-12)

    def test_scalar_geometric_series(self):
        v = solve_lyapunov(np.array([[0.5]]), np.array([[1.0]]))
        assert v[0, 0] == pytest.approx(4.0 / 3.0, abs=1e-10)

    def test_benchmark_residual_and_sum(self):
        t = np.sqrt(0.3) * A_BENCH
        v = solve_lyapunov(t, Q_BENCH)
        resid = np.linalg.norm(t @ v @ t.T + Q_BENCH - v, "fro")
        assert resid < 1e-10 * max(1.0, np.linalg.norm(Q_BENCH, "fro"))
        oracle = truncated_lyapunov_sum(t, Q_BENCH, 200)
        np.testing.assert_allclose(v, oracle, atol=1e-10)

    def test_truncated_sum_oracle_randomized(self):
        rng = np.random.default_rng(11)
        for n in (1, 2, 3, 4):
            for _ in range(5):
                t = random_stable(rng, n, rho_target=rng.uniform(0.3, 0.9))
                u = random_psd(rng, n)
                rho = spectral_radius(t)
                norm_u = max(1.0, np.linalg.norm(u))
                terms = int(np.ceil(np.log(1e-12 / norm_u) / (2 * np.log(rho)))) + 1
                oracle = truncated_lyapunov_sum(t, u, terms)
                np.testing.assert_allclose(solve_lyapunov(t, u), oracle, atol=1e-8)

    def test_linearity_in_forcing(self):
        rng = np.random.default_rng(13)
        t = random_stable(rng, 3, 0.8)
        u1, u2 = random_psd(rng, 3), random_psd(rng, 3)
        lhs = solve_lyapunov(t, u1 + u2)
        rhs = solve_lyapunov(t, u1) + solve_lyapunov(t, u2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_scipy_cross_check(self):
        rng = np.random.default_rng(17)
        t = random_stable(rng, 4, 0.85)
        u = random_psd(rng, 4)
        np.testing.assert_allclose(
            solve_lyapunov(t, u), sla.solve_discrete_lyapunov(t, u), atol=1e-9
        )

    def test_unstable_rejected(self):
        with pytest.raises(StabilityError):
            solve_lyapunov(1.01 * np.eye(2), np.eye(2))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            solve_lyapunov(0.5 * np.eye(2), np.eye(3))


class TestSolveDare:
    def test_scalar_single_update(self):
        # a = 0 collapses the fixed point to one Bayes update: qr/(q+r)
        p = solve_dare(np.array([[0.0]]), np.array([[1.0]]), [[0.01]], [[0.01]])
        assert p[0, 0] == pytest.approx(0.005, abs=1e-12)

    def test_benchmark_trace(self):
        p = solve_dare(A_BENCH, np.eye(2), Q_BENCH, R_BENCH)
        assert np.trace(p) == pytest.approx(0.0114, abs=5e-4)

    def test_fixed_point_residual(self):
        rng = np.random.default_rng(19)
        systems = [(A_BENCH, np.eye(2), Q_BENCH, R_BENCH)]
        for n in (1, 2, 3):
            a = random_stable(rng, n, 0.8)
            c = rng.standard_normal((n, n))
            q = random_psd(rng, n) + 1e-3 * np.eye(n)
            r = random_psd(rng, n) + 1e-3 * np.eye(n)
            systems.append((a, c, q, r))
        for a, c, q, r in systems:
            p = solve_dare(a, c, q, r)
            s = a @ p @ a.T + q
            rhs = s - s @ c.T @ np.linalg.solve(c @ s @ c.T + r, c @ s)
            assert np.linalg.norm(rhs - p, "fro") < 1e-10
            np.testing.assert_allclose(p, p.T, atol=1e-12)
            assert np.linalg.eigvalsh(p).min() > -1e-12

    def test_scipy_cross_check(self):
        # scipy solves the one-step-ahead form; the measurement update of its
        # solution must match ours
        sigma = sla.solve_discrete_are(A_BENCH.T, np.eye(2), Q_BENCH, R_BENCH)
        filtered = sigma - sigma @ np.linalg.solve(sigma + R_BENCH, sigma)
        ours = solve_dare(A_BENCH, np.eye(2), Q_BENCH, R_BENCH)
        np.testing.assert_allclose(ours, filtered, atol=1e-9)

    def test_iteration_cap(self):
        with pytest.raises(ConvergenceError):
            solve_dare(A_BENCH, np.eye(2), Q_BENCH, R_BENCH, max_iter=2)

    def test_gain_consistency(self):
        p = solve_dare(A_BENCH, np.eye(2), Q_BENCH, R_BENCH)
        k = kalman_gain(A_BENCH, np.eye(2), Q_BENCH, R_BENCH, p)
        s = A_BENCH @ p @ A_BENCH.T + Q_BENCH
        np.testing.assert_allclose((np.eye(2) - k) @ s, p, atol=1e-10)
