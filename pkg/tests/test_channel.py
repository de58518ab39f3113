import numpy as np
import pytest

from eavesim.channel import ChannelModel, sample_attack_time, sample_outcome


@pytest.fixture
def chan():
    return ChannelModel(gamma=0.2, gamma_bar=0.3, gamma_e=0.3, lambda_time=700, kappa=5e-6)


class TestChannelModel:
    def test_degradation_required(self):
        with pytest.raises(ValueError):
            ChannelModel(gamma=0.3, gamma_bar=0.2, gamma_e=0.3, lambda_time=1)

    def test_boundary_cases_allowed(self):
        ChannelModel(gamma=0.2, gamma_bar=1.0, gamma_e=0.0, lambda_time=1)
        ChannelModel(gamma=0.2, gamma_bar=0.3, gamma_e=1.0, lambda_time=1)

    def test_bad_probability_rejected(self):
        with pytest.raises(ValueError):
            ChannelModel(gamma=0.0, gamma_bar=0.3, gamma_e=0.3, lambda_time=1)


class TestSampleOutcome:
    def test_no_eavesdropper_channel_before_attack(self, chan):
        rng = np.random.default_rng(0)
        assert all(sample_outcome(chan, k, rng).lam_e == 0 for k in range(699))

    def test_fully_jammed(self):
        chan = ChannelModel(gamma=0.2, gamma_bar=1.0, gamma_e=0.3, lambda_time=10)
        rng = np.random.default_rng(1)
        assert all(sample_outcome(chan, 10, rng).lam == 0 for _ in range(2000))

    def test_empirical_means(self, chan):
        rng = np.random.default_rng(2)
        pre = np.array([sample_outcome(chan, 0, rng).lam for _ in range(100_000)])
        assert pre.mean() == pytest.approx(0.8, abs=0.02)
        post = np.array([sample_outcome(chan, 700, rng) for _ in range(100_000)])
        assert np.mean([o[0] for o in post]) == pytest.approx(0.7, abs=0.02)
        assert np.mean([o[1] for o in post]) == pytest.approx(0.7, abs=0.02)

    def test_independence_post_attack(self, chan):
        rng = np.random.default_rng(3)
        n = 100_000
        outs = np.array([sample_outcome(chan, 700, rng) for _ in range(n)], dtype=float)
        corr = np.corrcoef(outs[:, 0], outs[:, 1])[0, 1]
        assert abs(corr) < 4 / np.sqrt(n)

    def test_determinism(self, chan):
        a = [sample_outcome(chan, k, np.random.default_rng(7)) for k in (0, 700)]
        b = [sample_outcome(chan, k, np.random.default_rng(7)) for k in (0, 700)]
        assert a == b

    def test_negative_time_rejected(self, chan):
        with pytest.raises(ValueError):
            sample_outcome(chan, -1, np.random.default_rng(0))


class TestAttackTime:
    def test_certain_attack(self):
        rng = np.random.default_rng(4)
        assert sample_attack_time(1 - 1e-12, rng) == 1

    def test_mean(self):
        rng = np.random.default_rng(5)
        draws = np.array([sample_attack_time(0.01, rng) for _ in range(100_000)])
        # geometric mean 1/kappa = 100; tolerance from the spec scaled to N
        assert draws.mean() == pytest.approx(100.0, abs=1.0 * np.sqrt(10))

    def test_mean_large_sample(self):
        rng = np.random.default_rng(50)
        draws = rng.geometric(0.01, size=1_000_000)
        assert draws.mean() == pytest.approx(100.0, abs=1.0)

    def test_pmf_histogram(self):
        kappa = 0.05
        rng = np.random.default_rng(6)
        n = 200_000
        draws = np.array([sample_attack_time(kappa, rng) for _ in range(n)])
        for k in range(1, 40):
            p = (1 - kappa) ** (k - 1) * kappa
            observed = np.sum(draws == k)
            sigma = np.sqrt(n * p * (1 - p))
            assert abs(observed - n * p) < 3 * sigma + 1

    def test_invalid_kappa(self):
        with pytest.raises(ValueError):
            sample_attack_time(1.5, np.random.default_rng(0))
