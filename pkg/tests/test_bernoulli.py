import numpy as np
import pytest
from scipy import stats

from banditlab.bernoulli import BetaTsPolicy, BtsInfPolicy, BtsPolicy


def make_beta_ts(alpha, beta, seed=0):
    policy = BetaTsPolicy(len(alpha), rng=np.random.default_rng(seed))
    policy.alpha[:] = alpha
    policy.beta[:] = beta
    return policy


class TestBetaTs:
    def test_near_degenerate_posteriors(self):
        policy = make_beta_ts([1e6, 1.0], [1.0, 1e6], seed=1)
        hits = sum(policy.select() == 0 for _ in range(10_000))
        assert hits / 10_000 >= 0.999

    def test_single_arm(self):
        policy = BetaTsPolicy(1, rng=np.random.default_rng(2))
        assert all(policy.select() == 0 for _ in range(100))

    def test_two_arm_selection_frequency(self):
        # Beta(1,1) is uniform, so P(Beta(2,1) wins) = E[Beta(2,1)] = 2/3.
        policy = make_beta_ts([2.0, 1.0], [1.0, 1.0], seed=3)
        n = 100_000
        hits = sum(policy.select() == 0 for _ in range(n))
        assert abs(hits / n - 2.0 / 3.0) < 0.01

    def test_update_increments(self):
        policy = BetaTsPolicy(2, rng=np.random.default_rng(0))
        policy.update(0, 1)
        assert policy.alpha[0] == 2 and policy.beta[0] == 1

        policy = make_beta_ts([3.0, 1.0], [5.0, 1.0])
        policy.update(0, 0)
        assert policy.alpha[0] == 3 and policy.beta[0] == 6

    def test_update_additivity(self):
        policy = BetaTsPolicy(1, rng=np.random.default_rng(0))
        for _ in range(100):
            policy.update(0, 1)
        for _ in range(50):
            policy.update(0, 0)
        assert policy.alpha[0] == 101 and policy.beta[0] == 51

    def test_update_untouched_arms(self):
        policy = BetaTsPolicy(3, rng=np.random.default_rng(0))
        policy.update(1, 1)
        assert policy.alpha[0] == policy.alpha[2] == 1
        assert policy.beta[0] == policy.beta[2] == 1

    def test_non_binary_reward_rejected(self):
        policy = BetaTsPolicy(2, rng=np.random.default_rng(0))
        with pytest.raises(ValueError, match="non-binary reward"):
            policy.update(0, 0.5)

    def test_invalid_prior_rejected(self):
        with pytest.raises(ValueError, match="invalid Beta shape"):
            BetaTsPolicy(2, prior_alpha=0.0)

    def test_corrupted_state_rejected_at_select(self):
        policy = BetaTsPolicy(2, rng=np.random.default_rng(0))
        policy.alpha[0] = -1.0
        with pytest.raises(ValueError, match="invalid Beta shape"):
            policy.select()


class TestBts:
    def test_fresh_bank_is_uniform(self):
        policy = BtsPolicy(3, 20, rng=np.random.default_rng(4),
                           weight_rng=np.random.default_rng(5))
        n = 100_000
        counts = np.zeros(3)
        for _ in range(n):
            counts[policy.select()] += 1
        assert np.all(np.abs(counts / n - 1 / 3) < 0.01)

    def test_single_replicate_is_deterministic(self):
        policy = BtsPolicy(2, 1, rng=np.random.default_rng(6),
                           weight_rng=np.random.default_rng(7))
        policy.alpha[:, 0] = [5.0, 1.0]
        policy.beta[:, 0] = [1.0, 5.0]
        assert all(policy.select() == 0 for _ in range(200))

    def test_two_replicate_selection_frequency(self):
        # Arm 0 wins exactly when its replicate draw lands on the 0.8
        # estimate, which happens with probability 1/2.
        policy = BtsPolicy(2, 2, rng=np.random.default_rng(8),
                           weight_rng=np.random.default_rng(9))
        policy.alpha[0] = [4.0, 1.0]
        policy.beta[0] = [1.0, 4.0]
        policy.alpha[1] = [1.0, 2.0]
        policy.beta[1] = [1.0, 2.0]
        n = 100_000
        hits = sum(policy.select() == 0 for _ in range(n))
        assert abs(hits / n - 0.5) < 0.01

    def test_update_is_all_or_nothing_per_replicate(self):
        # With J=1 a success update either lands (2,1) or leaves (1,1);
        # across seeds both branches occur at roughly the coin rate and
        # nothing else ever appears.
        outcomes = {"accepted": 0, "skipped": 0}
        for seed in range(400):
            policy = BtsPolicy(2, 1, rng=np.random.default_rng(0),
                               weight_rng=np.random.default_rng(seed))
            policy.update(0, 1)
            state = (policy.alpha[0, 0], policy.beta[0, 0])
            if state == (2.0, 1.0):
                outcomes["accepted"] += 1
            elif state == (1.0, 1.0):
                outcomes["skipped"] += 1
            else:
                raise AssertionError(f"impossible replicate state {state}")
            assert policy.alpha[1, 0] == 1.0 and policy.beta[1, 0] == 1.0
        assert abs(outcomes["accepted"] / 400 - 0.5) < 0.1

    def test_update_can_skip_every_replicate(self):
        unchanged = 0
        for seed in range(600):
            policy = BtsPolicy(1, 4, rng=np.random.default_rng(0),
                               weight_rng=np.random.default_rng(seed))
            policy.update(0, 0)
            assert np.all(policy.alpha[0] == 1.0)
            deltas = policy.beta[0] - 1.0
            assert set(deltas.tolist()) <= {0.0, 1.0}
            if np.all(deltas == 0.0):
                unchanged += 1
        # All-zero coins happen with probability 1/16 per update.
        assert abs(unchanged / 600 - 1 / 16) < 0.04

    def test_update_total_increment_concentrates(self):
        policy = BtsPolicy(1, 1000, rng=np.random.default_rng(10),
                           weight_rng=np.random.default_rng(11))
        rng = np.random.default_rng(12)
        for _ in range(1000):
            policy.update(0, int(rng.integers(2)))
        increments = policy.alpha[0] + policy.beta[0] - 2.0
        assert abs(increments.mean() - 500.0) < 35.0

    def test_replicate_increments_are_binomial(self):
        # Pseudo-count increments across replicates after n updates should
        # follow Binomial(n, 1/2).
        n_updates = 16
        policy = BtsPolicy(1, 2000, rng=np.random.default_rng(13),
                           weight_rng=np.random.default_rng(14))
        for _ in range(n_updates):
            policy.update(0, 1)
        increments = (policy.alpha[0] - 1.0).astype(int)
        observed = np.bincount(increments, minlength=n_updates + 1)
        expected = stats.binom.pmf(np.arange(n_updates + 1), n_updates, 0.5) * 2000
        # Pool sparse tails so expected cell counts stay reasonable.
        keep = expected >= 5
        obs = np.concatenate(([observed[~keep].sum()], observed[keep]))
        exp = np.concatenate(([expected[~keep].sum()], expected[keep]))
        result = stats.chisquare(obs, exp * obs.sum() / exp.sum())
        assert result.pvalue > 1e-3

    def test_coin_count_is_j_per_update_independent_of_t(self):
        policy = BtsPolicy(2, 137, rng=np.random.default_rng(15),
                           weight_rng=np.random.default_rng(16))
        seen = policy.coin_draws
        assert seen == 0
        for t in range(1, 501):
            policy.update(t % 2, t % 2)
            assert policy.coin_draws - seen == 137
            seen = policy.coin_draws

    def test_selection_ignores_replicate_order(self):
        rng = np.random.default_rng(17)
        alpha = rng.integers(1, 30, size=(2, 8)).astype(float)
        beta = rng.integers(1, 30, size=(2, 8)).astype(float)
        perm = rng.permutation(8)

        def frequency(a, b, seed):
            policy = BtsPolicy(2, 8, rng=np.random.default_rng(seed),
                               weight_rng=np.random.default_rng(0))
            policy.alpha[:] = a
            policy.beta[:] = b
            n = 40_000
            return sum(policy.select() == 0 for _ in range(n)) / n

        base = frequency(alpha, beta, 18)
        shuffled = frequency(alpha[:, perm], beta[:, perm], 19)
        assert abs(base - shuffled) < 0.015

    def test_degenerates_to_greedy_with_one_replicate(self):
        policy = BtsPolicy(2, 1, rng=np.random.default_rng(20),
                           weight_rng=np.random.default_rng(21))
        policy.alpha[:, 0] = [3.0, 2.0]
        policy.beta[:, 0] = [2.0, 3.0]
        assert all(policy.select() == 0 for _ in range(100))

    def test_poisson_and_exponential_weights(self):
        for scheme in ("poisson", "exponential"):
            policy = BtsPolicy(1, 500, weights=scheme,
                               rng=np.random.default_rng(22),
                               weight_rng=np.random.default_rng(23))
            for _ in range(200):
                policy.update(0, 1)
            mean_weight_sum = (policy.alpha[0] - 1.0).mean()
            # Unit-mean weights: 200 updates add about 200 per replicate.
            assert abs(mean_weight_sum - 200.0) < 15.0

    def test_unknown_weight_scheme_rejected(self):
        with pytest.raises(ValueError, match="unknown weight scheme"):
            BtsPolicy(2, 4, weights="bayesian")

    def test_non_binary_reward_rejected(self):
        policy = BtsPolicy(2, 4, rng=np.random.default_rng(0),
                           weight_rng=np.random.default_rng(1))
        with pytest.raises(ValueError, match="non-binary reward"):
            policy.update(0, 2)


class TestBtsInf:
    def test_fresh_counts_are_uniform(self):
        policy = BtsInfPolicy(2, rng=np.random.default_rng(24))
        n = 100_000
        hits = sum(policy.select() == 0 for _ in range(n))
        assert abs(hits / n - 0.5) < 0.01

    def test_uniform_over_more_arms(self):
        policy = BtsInfPolicy(5, rng=np.random.default_rng(25))
        n = 50_000
        counts = np.zeros(5)
        for _ in range(n):
            counts[policy.select()] += 1
        assert np.all(np.abs(counts / n - 0.2) < 0.01)

    def test_dominant_arm_rarely_loses(self):
        # Arm 1 can only win or tie when every one of arm 0's four
        # successes is thinned away, probability (1/2)^4.
        policy = BtsInfPolicy(2, rng=np.random.default_rng(26))
        policy.successes[0] = 4
        n = 100_000
        hits = sum(policy.select() == 1 for _ in range(n))
        assert hits / n <= 0.0625 + 0.01

    def test_update_accumulates_counts(self):
        policy = BtsInfPolicy(2, rng=np.random.default_rng(0))
        policy.successes[0] = 3
        policy.update(0, 1)
        assert policy.successes[0] == 4
        policy.update(0, 0)
        assert policy.failures[0] == 1
        assert policy.successes[1] == 0 and policy.failures[1] == 0

    def test_non_binary_reward_rejected(self):
        policy = BtsInfPolicy(2, rng=np.random.default_rng(0))
        with pytest.raises(ValueError, match="non-binary reward"):
            policy.update(0, -1)

    def test_invalid_prior_rejected(self):
        with pytest.raises(ValueError, match="invalid Beta shape"):
            BtsInfPolicy(2, prior_beta=-2.0)
