import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def uniform_image(hue: float, sat: float = 1.0, value: float = 1.0,
                  size: int = 4) -> np.ndarray:
    """A size x size image where every pixel is the same HSV color."""
    from colorshift import hsv_to_rgb

    return np.ascontiguousarray(
        np.broadcast_to(hsv_to_rgb(np.array([hue, sat, value])), (size, size, 3)))


class CountingClassifier:
    """Wraps a classifier and counts single-image predict queries."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    @property
    def num_classes(self):
        return self.inner.num_classes

    @property
    def thread_safe(self):
        return getattr(self.inner, "thread_safe", True)

    def predict(self, X):
        self.calls += len(X)
        return self.inner.predict(X)


class RecordingClassifier(CountingClassifier):
    """Also keeps every queried image and every answered label."""

    def __init__(self, inner):
        super().__init__(inner)
        self.queries = []
        self.labels = []

    def predict(self, X):
        out = super().predict(X)
        self.queries.extend(np.array(img, copy=True) for img in X)
        self.labels.extend(int(v) for v in out)
        return out
