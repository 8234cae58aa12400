"""Input validation helpers for image arrays and label vectors."""

from __future__ import annotations

import numpy as np


def check_rgb_image(img, name: str = "image") -> np.ndarray:
    """Coerce to float64 and require a trailing (r, g, b) axis in [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim < 1 or arr.shape[-1] != 3:
        raise ValueError(f"{name} must have a trailing axis of size 3 (r, g, b)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite channel values")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError(f"{name} has channel values outside [0, 1]")
    return arr


def check_hsv_image(img, name: str = "image") -> np.ndarray:
    """Coerce to float64 and require h in [0, 1) and s, v in [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim < 1 or arr.shape[-1] != 3:
        raise ValueError(f"{name} must have a trailing axis of size 3 (h, s, v)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite component values")
    if arr.size:
        h, sv = arr[..., 0], arr[..., 1:]
        if h.min() < 0.0 or h.max() >= 1.0:
            raise ValueError(f"{name} has hue outside [0, 1)")
        if sv.min() < 0.0 or sv.max() > 1.0:
            raise ValueError(f"{name} has saturation or value outside [0, 1]")
    return arr


def check_image_batch(X, name: str = "X") -> np.ndarray:
    """Validate a stack of images shaped (n, height, width, 3)."""
    arr = check_rgb_image(X, name=name)
    if arr.ndim != 4:
        raise ValueError(f"{name} must be shaped (n, height, width, 3), got {arr.shape}")
    return arr


def check_single_image(img, name: str = "image") -> np.ndarray:
    """Validate one image shaped (height, width, 3)."""
    arr = check_rgb_image(img, name=name)
    if arr.ndim != 3:
        raise ValueError(f"{name} must be shaped (height, width, 3), got {arr.shape}")
    return arr


def check_labels(y, n_samples: int | None = None, name: str = "y") -> np.ndarray:
    """Validate a vector of non-negative integer class labels."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise ValueError(f"{name} must contain integer labels")
    arr = arr.astype(np.int64)
    if arr.size and arr.min() < 0:
        raise ValueError(f"{name} contains negative labels")
    if n_samples is not None and len(arr) != n_samples:
        raise ValueError(f"{name} has {len(arr)} entries for {n_samples} samples")
    return arr
