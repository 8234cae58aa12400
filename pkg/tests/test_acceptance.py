"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Thresholds are fixed; the desk-scale experiment configuration was frozen
from the pilot run logged in docs/pilot.md.
"""

import time

import numpy as np
import pytest

from colorshift import (
    AugmentPolicy,
    DataFormatError,
    HueMeanClassifier,
    LabeledDataset,
    MlpClassifier,
    ValueOnlyClassifier,
    evaluate,
    evaluate_targeted,
    generate_shape_dataset,
    grid_oracle,
    hsv_to_rgb,
    parse_cifar10,
    rgb_to_hsv,
    run_attack,
    serialize_cifar10,
)
from colorshift.classifiers import mlp_loss_and_grads
from conftest import CountingClassifier, uniform_image


def _report(name: str, ok: bool, detail: str = ""):
    suffix = f"  ({detail})" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'}: {name}{suffix}")
    assert ok, f"{name}{suffix}"


def test_color_math_round_trip():
    rng = np.random.default_rng(123)
    pixels = rng.uniform(0.0, 1.0, size=(100000, 3))
    start = time.perf_counter()
    err = np.abs(hsv_to_rgb(rgb_to_hsv(pixels)) - pixels).max()
    elapsed = time.perf_counter() - start
    canonical = (
        np.array_equal(rgb_to_hsv(np.array([1.0, 0.0, 0.0])), [0.0, 1.0, 1.0])
        and np.array_equal(rgb_to_hsv(np.array([0.5, 0.5, 0.5])), [0.0, 0.0, 0.5])
        and np.allclose(rgb_to_hsv(np.array([0.0, 0.0, 1.0])), [2 / 3, 1.0, 1.0],
                        atol=1e-15)
    )
    _report("color math: 1e5 round trips within 1e-6, canonical triples, < 1 s",
            bool(err <= 1e-6 and canonical and elapsed < 1.0),
            f"max err {err:.2e}, {elapsed * 1000:.0f} ms")


def test_value_invariance():
    from colorshift import ColorShift, shift_rgb

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        img = rng.uniform(0, 1, (6, 6, 3))
        shift = ColorShift(rng.uniform(0, 1), rng.uniform(-1, 1))
        worst = max(worst, np.abs(shift_rgb(img, shift).max(-1) - img.max(-1)).max())

    trials = 25
    failures, exact_budget = 0, 0
    for i in range(100):
        clf = CountingClassifier(ValueOnlyClassifier(10))
        out = run_attack(rng.uniform(0, 1, (6, 6, 3)), clf, trials=trials, seed=i)
        failures += not out.success
        exact_budget += clf.calls == trials + 1  # one original + N trial queries
    _report("value invariance: brightness within 1e-6; value-only attack fails "
            "100/100 with exactly N queries",
            bool(worst <= 1e-6 and failures == 100 and exact_budget == 100),
            f"max value drift {worst:.2e}, {failures}/100 failed")


def test_search_schedule_fidelity():
    img = uniform_image(0.6, sat=0.5)
    clf = HueMeanClassifier(8)
    trials = 40
    bound_ok = True
    for seed in range(100):
        out = run_attack(img, clf, trials=trials, seed=seed)
        if out.success and abs(out.shift.delta_s) > out.trial_index / trials:
            bound_ok = False

    first_trial_ok = True
    for seed in range(50):
        out = run_attack(uniform_image(0.3), HueMeanClassifier(4), trials=1, seed=seed)
        if out.success and out.shift.delta_s != 0.0:
            first_trial_ok = False

    a = run_attack(img, clf, trials=trials, seed=11, image_index=2)
    b = run_attack(img, clf, trials=trials, seed=11, image_index=2)
    reproducible = (a.success == b.success and a.shift == b.shift
                    and a.trial_index == b.trial_index
                    and np.array_equal(a.adversarial, b.adversarial))
    _report("search schedule: |delta_s| <= trial/N, trial 0 hue-only, "
            "bit-reproducible outcomes",
            bool(bound_ok and first_trial_ok and reproducible))


def test_search_oracle_consistency():
    start = time.perf_counter()
    img = uniform_image(0.125)
    clf = HueMeanClassifier(4)
    hits = grid_oracle(img, clf, hue_steps=1000, sat_steps=1)
    measure = len(hits) / 1000
    wins = sum(run_attack(img, clf, trials=20, seed=s).success for s in range(200))
    elapsed = time.perf_counter() - start
    _report("oracle consistency: arc measure 3/4 by grid, 200/200 seeds succeed "
            "at N=20, < 10 s",
            bool(measure == 0.75 and wins == 200 and elapsed < 10.0),
            f"measure {measure}, {wins}/200, {elapsed:.1f} s")


def test_desk_scale_accuracy_gap_and_augmented_recovery():
    start = time.perf_counter()
    train = generate_shape_dataset(200, 16, "class-correlated", seed=11)
    test = generate_shape_dataset(100, 16, "class-correlated", seed=12)

    plain = MlpClassifier(hidden_units=32, epochs=30, seed=3)
    plain.fit(train.images, train.labels)
    plain_report = evaluate(test, plain, trials=200, seed=42)

    augmented = MlpClassifier(hidden_units=32, epochs=30, seed=3, augment=AugmentPolicy())
    augmented.fit(train.images, train.labels)
    augmented_report = evaluate(test, augmented, trials=200, seed=42)

    elapsed = time.perf_counter() - start
    gap = plain_report.clean_accuracy - plain_report.adversarial_accuracy
    recovered = augmented_report.adversarial_accuracy - plain_report.adversarial_accuracy
    _report("desk-scale gap: unaugmented drops >= 30 points, augmented recovers "
            ">= half the gap, < 2 min",
            bool(gap >= 0.30 and recovered >= 0.5 * gap and elapsed < 120.0),
            f"clean {plain_report.clean_accuracy:.3f} -> adv "
            f"{plain_report.adversarial_accuracy:.3f}, augmented adv "
            f"{augmented_report.adversarial_accuracy:.3f}, {elapsed:.0f} s")


def _sector_dataset(n, k=4, size=6):
    hues = (np.arange(n) + 0.5) / n
    images = np.stack([uniform_image(h, size=size) for h in hues])
    labels = np.minimum((hues * k).astype(int), k - 1)
    return LabeledDataset(images, labels, [f"sector_{i}" for i in range(k)])


def test_success_curve_shape():
    dataset = _sector_dataset(200)
    report = evaluate(dataset, HueMeanClassifier(4), trials=20, seed=0)
    analytic = 1.0 - 0.25 ** np.arange(1, 21)  # arc measure 3/4 per image
    deviation = np.abs(report.success_by_trial - analytic).max()
    monotone = bool(np.all(np.diff(report.success_by_trial) >= 0))
    _report("success curve: monotone and within 5 points of the analytic "
            "1-(1-mu)^(i+1) at every trial over 200 images",
            bool(monotone and deviation <= 0.05),
            f"max deviation {deviation:.3f}")


def test_targeted_success_and_reachability():
    dataset = _sector_dataset(200).subset(np.arange(0, 200, 10))
    report = evaluate_targeted(dataset, HueMeanClassifier(4), trials=64, seed=0)
    _report("targeted: all 3 non-original targets reached on every image, "
            "mean reachable labels = 4",
            bool(report.targeted_success_rate == 1.0
                 and report.mean_reachable_labels == 4.0))


def test_cifar10_parser():
    rng = np.random.default_rng(99)
    payload = rng.integers(0, 256, size=2 * 3072, dtype=np.uint8).tobytes()
    data = bytes([4]) + payload[:3072] + bytes([9]) + payload[3072:]
    round_trip = serialize_cifar10(parse_cifar10(data)) == data

    bad = bytes([3]) + bytes(3072) + bytes([12]) + bytes(3072)
    with pytest.raises(DataFormatError) as excinfo:
        parse_cifar10(bad)
    names_index = "record 1" in str(excinfo.value)
    _report("CIFAR-10 parser: 2-record file round-trips byte-exactly, bad label "
            "rejected with its record index",
            bool(round_trip and names_index))


def test_mlp_gradient_check():
    rng = np.random.default_rng(5)
    X2 = rng.normal(size=(5, 8))
    y = rng.integers(0, 4, size=5)
    params = (rng.normal(size=(8, 6)) * 0.5, rng.normal(size=6) * 0.5,
              rng.normal(size=(6, 4)) * 0.5, rng.normal(size=4) * 0.5)
    _, grads = mlp_loss_and_grads(params, X2, y)
    eps = 1e-6
    worst = 0.0
    for pi, (param, grad) in enumerate(zip(params, grads)):
        flat = param.reshape(-1)
        for j in range(flat.size):
            mutated = [p.copy() for p in params]
            mutated[pi].reshape(-1)[j] = flat[j] + eps
            hi, _ = mlp_loss_and_grads(tuple(mutated), X2, y)
            mutated[pi].reshape(-1)[j] = flat[j] - eps
            lo, _ = mlp_loss_and_grads(tuple(mutated), X2, y)
            numeric = (hi - lo) / (2 * eps)
            analytic = grad.reshape(-1)[j]
            denom = max(abs(numeric), abs(analytic), 1e-8)
            worst = max(worst, abs(numeric - analytic) / denom)
    _report("MLP gradients: analytic matches central differences within 1e-4",
            bool(worst <= 1e-4), f"worst relative error {worst:.2e}")
