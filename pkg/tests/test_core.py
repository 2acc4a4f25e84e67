import numpy as np
import pytest

from banditlab.core import RngStreamKey, argmax_random_tiebreak, derive_stream


def test_same_key_gives_identical_stream():
    key = RngStreamKey(1234, 0, "environment")
    a = derive_stream(key).random(1000)
    b = derive_stream(key).random(1000)
    assert np.array_equal(a, b)


def test_distinct_run_index_gives_different_stream():
    a = derive_stream(RngStreamKey(1234, 0, "environment")).random(1000)
    b = derive_stream(RngStreamKey(1234, 1, "environment")).random(1000)
    assert not np.array_equal(a, b)


def test_roles_give_uncorrelated_streams():
    policy = derive_stream(RngStreamKey(99, 0, "policy")).random(10_000)
    weights = derive_stream(RngStreamKey(99, 0, "replicate-weights")).random(10_000)
    corr = np.corrcoef(policy, weights)[0, 1]
    assert abs(corr) < 0.05


def test_unknown_role_rejected():
    with pytest.raises(ValueError, match="unknown stream role"):
        RngStreamKey(1, 0, "weights")


def test_negative_run_index_rejected():
    with pytest.raises(ValueError):
        RngStreamKey(1, -1, "policy")


def test_argmax_unique_maximum():
    rng = np.random.default_rng(0)
    assert argmax_random_tiebreak([0.2, 0.7, 0.1], rng) == 1


def test_argmax_singleton():
    rng = np.random.default_rng(0)
    assert argmax_random_tiebreak([0.5], rng) == 0


def test_argmax_tie_split_is_uniform():
    rng = np.random.default_rng(42)
    hits = sum(argmax_random_tiebreak([1.0, 1.0, 0.3], rng) == 0 for _ in range(100_000))
    assert abs(hits / 100_000 - 0.5) < 0.01


def test_argmax_empty_rejected():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError, match="empty candidate set"):
        argmax_random_tiebreak([], rng)


def test_argmax_nan_rejected():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError, match="non-finite value"):
        argmax_random_tiebreak([0.1, float("nan"), 0.3], rng)


def test_argmax_never_returns_nonmaximal():
    rng = np.random.default_rng(7)
    for _ in range(500):
        values = rng.integers(0, 4, size=6).astype(float)  # plenty of ties
        best = values.max()
        pick = argmax_random_tiebreak(values, rng)
        assert values[pick] == best


@pytest.mark.parametrize("scale", [0.5, 2.0, 1e-3, 1e3])
def test_argmax_scale_invariance(scale):
    base = np.random.default_rng(11)
    for _ in range(200):
        values = base.integers(0, 5, size=8).astype(float)
        seed = int(base.integers(0, 2**32))
        first = argmax_random_tiebreak(values, np.random.default_rng(seed))
        second = argmax_random_tiebreak(scale * values, np.random.default_rng(seed))
        assert first == second


def test_argmax_shift_invariance():
    base = np.random.default_rng(13)
    for _ in range(200):
        values = base.integers(0, 5, size=8).astype(float)
        seed = int(base.integers(0, 2**32))
        first = argmax_random_tiebreak(values, np.random.default_rng(seed))
        second = argmax_random_tiebreak(values + 3.25, np.random.default_rng(seed))
        assert first == second
