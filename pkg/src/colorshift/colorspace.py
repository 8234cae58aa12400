"""RGB <-> HSV conversion and brightness-preserving color shifts.

Images are float arrays in [0, 1] with a trailing (r, g, b) or (h, s, v)
axis; any number of leading axes is accepted (single pixels, images, or
batches).  Hue lives on the unit circle [0, 1), and achromatic pixels
(saturation 0) always store hue 0 so equal colors compare equal.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .validation import check_hsv_image, check_rgb_image


class ColorShift(NamedTuple):
    """A uniform color shift: hue rotation (applied mod 1) and saturation offset."""

    delta_h: float
    delta_s: float


def check_shift(shift) -> ColorShift:
    """Validate a (delta_h, delta_s) pair; delta_s must lie in [-1, 1]."""
    delta_h, delta_s = float(shift[0]), float(shift[1])
    if not (np.isfinite(delta_h) and np.isfinite(delta_s)):
        raise ValueError("color shift components must be finite")
    if abs(delta_s) > 1.0:
        raise ValueError(f"saturation shift must lie in [-1, 1], got {delta_s}")
    return ColorShift(delta_h, delta_s)


def _wrap_hue_delta(delta_h: float) -> float:
    d = float(delta_h) % 1.0
    # Python's float mod rounds tiny negatives up to exactly 1.0; fold back.
    return 0.0 if d >= 1.0 else d


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Convert RGB in [0, 1] to HSV with the hexagonal hue mapping.

    Value is the per-pixel channel maximum, saturation is chroma over value
    (0 for black), and hue is the wheel position in [0, 1) with red at 0.
    Achromatic pixels get hue 0.
    """
    rgb = check_rgb_image(rgb)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.maximum(np.maximum(r, g), b)
    minc = np.minimum(np.minimum(r, g), b)
    chroma = maxc - minc

    v = maxc
    s = np.zeros_like(maxc)
    np.divide(chroma, maxc, out=s, where=maxc > 0)

    safe = np.where(chroma > 0, chroma, 1.0)
    rc = (maxc - r) / safe
    gc = (maxc - g) / safe
    bc = (maxc - b) / safe
    # Channel priority r, g, b on ties matches the stdlib colorsys convention.
    h6 = np.select([r == maxc, g == maxc], [bc - gc, 2.0 + rc - bc], default=4.0 + gc - rc)
    h = np.mod(h6 / 6.0, 1.0)
    h = np.where(h >= 1.0, 0.0, h)  # mod can round up to 1.0 for tiny negatives
    h = np.where(chroma == 0, 0.0, h)
    return np.stack([h, s, v], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Convert HSV back to RGB via the inverse hexagonal mapping.

    Accepts any hue in [0, 1) even for gray pixels; when saturation is 0
    the hue is irrelevant and the output is (v, v, v).
    """
    hsv = check_hsv_image(hsv)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    h6 = h * 6.0
    sector = np.minimum(np.floor(h6), 5.0)
    f = h6 - sector
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    sector = sector.astype(np.int64)

    conds = [sector == 0, sector == 1, sector == 2, sector == 3, sector == 4]
    r = np.select(conds, [v, q, p, p, t], default=v)
    g = np.select(conds, [t, v, v, q, p], default=p)
    b = np.select(conds, [p, p, t, v, v], default=q)
    return np.stack([r, g, b], axis=-1)


def apply_shift(hsv: np.ndarray, shift) -> np.ndarray:
    """Shift hue by delta_h around the wheel and saturation by delta_s (clipped).

    The value component is passed through bit-identically.  Pixels whose
    saturation lands on 0 are re-canonicalized to hue 0.
    """
    hsv = check_hsv_image(hsv)
    delta_h, delta_s = check_shift(shift)
    d = _wrap_hue_delta(delta_h)
    h = hsv[..., 0] + d  # in [0, 2); subtracting 1 is exact, no mod rounding
    h = np.where(h >= 1.0, h - 1.0, h)
    s = np.clip(hsv[..., 1] + delta_s, 0.0, 1.0)
    h = np.where(s == 0.0, 0.0, h)
    return np.stack([h, s, hsv[..., 2]], axis=-1)


def shift_rgb(rgb: np.ndarray, shift) -> np.ndarray:
    """Apply a color shift to an RGB image: convert, shift, convert back."""
    return hsv_to_rgb(apply_shift(rgb_to_hsv(rgb), shift))


def rgb_to_uint8(rgb: np.ndarray) -> np.ndarray:
    """Quantize float channels to 8-bit, rounding half away from zero."""
    rgb = check_rgb_image(rgb)
    return np.clip(np.floor(rgb * 255.0 + 0.5), 0.0, 255.0).astype(np.uint8)


def quantize_rgb(rgb: np.ndarray) -> np.ndarray:
    """Snap float channels to the 8-bit grid (what a saved image would hold)."""
    return rgb_to_uint8(rgb) / 255.0


class ColorShifter(TransformerMixin, BaseEstimator):
    """Stateless transformer applying one fixed color shift to images.

    Parameters
    ----------
    delta_h : float
        Hue rotation, applied mod 1.
    delta_s : float
        Saturation offset in [-1, 1]; results are clipped to [0, 1].
    """

    def __init__(self, delta_h: float = 0.0, delta_s: float = 0.0):
        self.delta_h = delta_h
        self.delta_s = delta_s

    def fit(self, X=None, y=None):
        check_shift((self.delta_h, self.delta_s))
        return self

    def transform(self, X) -> np.ndarray:
        return shift_rgb(X, (self.delta_h, self.delta_s))
