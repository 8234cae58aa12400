import numpy as np
import pytest

from colorshift import AugmentPolicy, LabeledDataset, augment_epoch, shifted_copies
from colorshift.augment import draw_shifts


def small_dataset(rng, n=6):
    return LabeledDataset(rng.uniform(0, 1, (n, 4, 4, 3)),
                          rng.integers(0, 3, n), ["a", "b", "c"])


def test_empty_dataset_stays_empty():
    ds = LabeledDataset(np.zeros((0, 4, 4, 3)), np.zeros(0, dtype=int), ["a"])
    out = augment_epoch(ds, AugmentPolicy(), epoch_seed=0)
    assert len(out) == 0


def test_originals_come_first_bit_identical(rng):
    ds = small_dataset(rng)
    out = augment_epoch(ds, AugmentPolicy(), epoch_seed=1)
    assert len(out) == 2 * len(ds)
    assert np.array_equal(out.images[:len(ds)], ds.images)
    assert np.array_equal(out.labels, np.concatenate([ds.labels, ds.labels]))


def test_same_epoch_seed_reproduces(rng):
    ds = small_dataset(rng)
    a = augment_epoch(ds, AugmentPolicy(), epoch_seed=7)
    b = augment_epoch(ds, AugmentPolicy(), epoch_seed=7)
    assert np.array_equal(a.images, b.images)


def test_distinct_epoch_seeds_draw_distinct_shifts(rng):
    policy = AugmentPolicy()
    a = draw_shifts(10, policy, np.random.default_rng(0))
    b = draw_shifts(10, policy, np.random.default_rng(1))
    assert a != b


def test_copies_multiply_the_dataset(rng):
    ds = small_dataset(rng)
    out = augment_epoch(ds, AugmentPolicy(copies=3), epoch_seed=2)
    assert len(out) == 4 * len(ds)
    assert out.labels.tolist() == ds.labels.tolist() * 4


def test_value_channel_matches_source(rng):
    ds = small_dataset(rng)
    out = augment_epoch(ds, AugmentPolicy(copies=2), epoch_seed=3)
    source_value = ds.images.max(axis=-1)
    for block in range(1, 3):
        copies = out.images[block * len(ds):(block + 1) * len(ds)]
        assert np.abs(copies.max(axis=-1) - source_value).max() <= 1e-6


def test_policy_validation():
    with pytest.raises(ValueError):
        AugmentPolicy(copies=0)
    with pytest.raises(ValueError):
        AugmentPolicy(sat_range=(-2.0, 1.0))
    with pytest.raises(ValueError):
        AugmentPolicy(hue_range=(0.8, 0.2))


def test_shifted_copies_shapes(rng):
    X = rng.uniform(0, 1, (4, 3, 3, 3))
    out = shifted_copies(X, AugmentPolicy(copies=2), seed=5)
    assert out.shape == (8, 3, 3, 3)
