"""Random-search generation of adversarial color-shifted images.

The attack draws a hue rotation uniformly from [0, 1) and a saturation
offset from U(-i/N, i/N) at trial i (so the first trial shifts hue only
and the saturation interval grows linearly), applies the shift, and stops
at the first shifted image that satisfies the goal predicate.  It queries
the classifier for labels only and never touches the brightness channel.

A brute-force grid sweep over the same shift space serves as an
independent oracle for validating the search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .colorspace import ColorShift, apply_shift, hsv_to_rgb, quantize_rgb, rgb_to_hsv
from .validation import check_single_image

GOAL_UNTARGETED = "untargeted"  # succeed when the label differs from the original prediction
GOAL_UNTARGETED_VS_LABEL = "untargeted-vs-label"  # ... from a supplied ground-truth label
GOAL_TARGETED = "targeted"  # succeed when the label equals the requested target

_GOALS = (GOAL_UNTARGETED, GOAL_UNTARGETED_VS_LABEL, GOAL_TARGETED)


@dataclass(frozen=True)
class AttackOutcome:
    """Result of one attack run.

    On success ``adversarial``, ``shift`` and ``trial_index`` are set and
    ``final_label`` satisfies the goal; on failure they are None and
    ``final_label`` equals ``original_label`` (the surviving image is the
    original).
    """

    success: bool
    original_label: int
    final_label: int
    adversarial: np.ndarray | None = None
    shift: ColorShift | None = None
    trial_index: int | None = None


def _predict_one(classifier, img: np.ndarray, quantize: bool) -> int:
    probe = quantize_rgb(img) if quantize else img
    return int(np.asarray(classifier.predict(probe[np.newaxis]))[0])


def _goal_predicate(goal: str, original_label: int, target, true_label):
    if goal == GOAL_UNTARGETED:
        return lambda label: label != original_label
    if goal == GOAL_UNTARGETED_VS_LABEL:
        return lambda label: label != true_label
    return lambda label: label == target


def _check_goal_args(goal: str, classifier, target, true_label) -> None:
    if goal not in _GOALS:
        raise ValueError(f"unknown goal {goal!r}; expected one of {_GOALS}")
    if goal == GOAL_TARGETED:
        if target is None:
            raise ValueError("targeted goal requires a target label")
        num_classes = getattr(classifier, "num_classes", None)
        if num_classes is not None and not 0 <= int(target) < num_classes:
            raise ValueError(f"target {target} outside [0, {num_classes})")
    if goal == GOAL_UNTARGETED_VS_LABEL and true_label is None:
        raise ValueError("untargeted-vs-label goal requires true_label")


def run_attack(image, classifier, *, trials: int = 1000, goal: str = GOAL_UNTARGETED,
               target: int | None = None, true_label: int | None = None, seed: int = 0,
               image_index: int = 0, quantize: bool = False) -> AttackOutcome:
    """Search for a color shift that flips the classifier's answer.

    Parameters
    ----------
    image : (height, width, 3) float array in [0, 1].
    classifier : object with ``predict(batch) -> labels``; queried one
        image at a time, labels only.
    trials : maximum number of shifted images to try.
    goal : one of the GOAL_* constants.  ``targeted`` additionally needs
        ``target`` (which must differ from the classifier's prediction on
        the original image); ``untargeted-vs-label`` needs ``true_label``.
    seed, image_index : the random stream is derived from this pair, so a
        batch of attacks is reproducible regardless of scheduling order.
    quantize : when True every probe (including the original) is snapped
        to the 8-bit grid before classification, modeling a classifier
        that receives saved images.

    The outcome is bit-reproducible given (image, parameters).  Classifier
    transport failures propagate; they are never counted as trials.
    """
    image = check_single_image(image)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if seed < 0 or image_index < 0:
        raise ValueError("seed and image_index must be non-negative")
    _check_goal_args(goal, classifier, target, true_label)

    original_label = _predict_one(classifier, image, quantize)
    if goal == GOAL_TARGETED and int(target) == original_label:
        raise ValueError(
            f"target {target} equals the prediction on the original image; "
            "pick a different target")
    accepts = _goal_predicate(goal, original_label, target, true_label)

    hsv = rgb_to_hsv(image)
    rng = np.random.default_rng([seed, image_index])
    for i in range(trials):
        bound = i / trials
        shift = ColorShift(float(rng.uniform(0.0, 1.0)), float(rng.uniform(-bound, bound)))
        candidate = hsv_to_rgb(apply_shift(hsv, shift))
        label = _predict_one(classifier, candidate, quantize)
        if accepts(label):
            return AttackOutcome(True, original_label, label, candidate, shift, i)
    return AttackOutcome(False, original_label, original_label)


class ColorShiftAttack(BaseEstimator):
    """Estimator-style wrapper around :func:`run_attack`.

    Holds the attack configuration as parameters so it clones and
    introspects like any other estimator; ``run`` executes one attack.
    """

    def __init__(self, classifier=None, trials: int = 1000, goal: str = GOAL_UNTARGETED,
                 target: int | None = None, seed: int = 0, quantize: bool = False):
        self.classifier = classifier
        self.trials = trials
        self.goal = goal
        self.target = target
        self.seed = seed
        self.quantize = quantize

    def run(self, image, image_index: int = 0, true_label: int | None = None) -> AttackOutcome:
        if self.classifier is None:
            raise ValueError("a classifier must be supplied")
        return run_attack(image, self.classifier, trials=self.trials, goal=self.goal,
                          target=self.target, true_label=true_label, seed=self.seed,
                          image_index=image_index, quantize=self.quantize)


def make_shift_grid(hue_steps: int, sat_steps: int) -> list[ColorShift]:
    """Build the standard sweep grid over the shift space.

    Hue takes the ``hue_steps`` values i/hue_steps (the wheel is circular,
    so the endpoint would duplicate 0).  Saturation divides [-1, 1] into
    ``sat_steps`` equal intervals, giving sat_steps + 1 offsets; the
    degenerate sat_steps == 1 collapses to the single offset 0 so a
    hue-only sweep stays a one-row grid.  The identity shift is on every
    grid with even (or 1) sat_steps.
    """
    if hue_steps < 1 or sat_steps < 1:
        raise ValueError("hue_steps and sat_steps must be >= 1")
    hues = [i / hue_steps for i in range(hue_steps)]
    if sat_steps == 1:
        sats = [0.0]
    else:
        sats = [-1.0 + 2.0 * j / sat_steps for j in range(sat_steps + 1)]
    return [ColorShift(h, s) for s in sats for h in hues]


def grid_oracle(image, classifier, *, goal: str = GOAL_UNTARGETED, target: int | None = None,
                true_label: int | None = None, hue_steps: int = 360, sat_steps: int = 1,
                quantize: bool = False) -> list[tuple[ColorShift, int]]:
    """Exhaustively sweep the shift grid and return every goal-satisfying shift.

    Results are sorted by |delta_s| ascending then delta_h ascending, i.e.
    least-saturation-damage first.  This is the brute-force ground truth the
    random search is validated against.
    """
    image = check_single_image(image)
    _check_goal_args(goal, classifier, target, true_label)
    original_label = _predict_one(classifier, image, quantize)
    accepts = _goal_predicate(goal, original_label, target, true_label)

    hsv = rgb_to_hsv(image)
    hits = []
    for shift in make_shift_grid(hue_steps, sat_steps):
        label = _predict_one(classifier, hsv_to_rgb(apply_shift(hsv, shift)), quantize)
        if accepts(label):
            hits.append((shift, label))
    hits.sort(key=lambda pair: (abs(pair[0].delta_s), pair[0].delta_h))
    return hits


def label_reachability(image, classifier, shifts, quantize: bool = False) -> set[int]:
    """Distinct labels the classifier emits across a sweep of shifts.

    The prediction on the unshifted image is always included.
    """
    image = check_single_image(image)
    labels = {_predict_one(classifier, image, quantize)}
    hsv = rgb_to_hsv(image)
    for shift in shifts:
        labels.add(_predict_one(classifier, hsv_to_rgb(apply_shift(hsv, shift)), quantize))
    return labels
