"""Color-shift data augmentation for defensive training.

Each epoch a dataset is extended with freshly shifted copies of every
image: hue rotated by U(0, 1) and saturation offset by U(-1, 1) by
default.  Labels are copied unchanged and the brightness channel of every
copy matches its source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .colorspace import ColorShift, shift_rgb
from .validation import check_image_batch


@dataclass(frozen=True)
class AugmentPolicy:
    """Shift distributions and copy count used for one training run."""

    hue_range: tuple[float, float] = (0.0, 1.0)
    sat_range: tuple[float, float] = (-1.0, 1.0)
    copies: int = 1

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("copies must be a positive integer")
        if self.hue_range[0] > self.hue_range[1] or self.sat_range[0] > self.sat_range[1]:
            raise ValueError("distribution ranges must be (low, high) with low <= high")
        if self.sat_range[0] < -1.0 or self.sat_range[1] > 1.0:
            raise ValueError("saturation range must lie within [-1, 1]")


def draw_shifts(n: int, policy: AugmentPolicy, rng: np.random.Generator) -> list[ColorShift]:
    """Draw n independent shifts from the policy's distributions."""
    dh = rng.uniform(policy.hue_range[0], policy.hue_range[1], size=n)
    ds = rng.uniform(policy.sat_range[0], policy.sat_range[1], size=n)
    return [ColorShift(float(a), float(b)) for a, b in zip(dh, ds)]


def shifted_copies(images, policy: AugmentPolicy, seed) -> np.ndarray:
    """Return policy.copies shifted copies of every image, copy-major order."""
    X = check_image_batch(images)
    rng = np.random.default_rng(seed)
    blocks = []
    for _ in range(policy.copies):
        shifts = draw_shifts(len(X), policy, rng)
        blocks.append(np.stack([shift_rgb(img, s) for img, s in zip(X, shifts)]) if len(X)
                      else X.copy())
    return np.concatenate(blocks) if blocks else X.copy()


def augment_epoch(dataset, policy: AugmentPolicy, epoch_seed):
    """One epoch's training set: the originals followed by shifted copies.

    Deterministic given epoch_seed; distinct seeds draw distinct shifts.
    """
    from .dataio import LabeledDataset

    copies = shifted_copies(dataset.images, policy, epoch_seed)
    images = np.concatenate([dataset.images, copies])
    labels = np.concatenate([dataset.labels] + [dataset.labels] * policy.copies)
    return LabeledDataset(images=images, labels=labels, class_names=list(dataset.class_names))
