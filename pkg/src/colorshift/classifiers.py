"""Label-only image classifiers used to exercise and evaluate the attack.

All classifiers answer hard labels for batches shaped (n, height, width, 3)
and are deterministic functions of the pixel values.  `ValueOnlyClassifier`
reads nothing but per-pixel brightness and is therefore immune to color
shifts; `HueMeanClassifier` reads nothing but the global hue statistic and
is maximally vulnerable; `MlpClassifier` is a small trainable network
standing in for the large CNNs the attack targets in practice.
"""

from __future__ import annotations

import struct

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .augment import AugmentPolicy, shifted_copies
from .colorspace import rgb_to_hsv
from .validation import check_image_batch, check_labels


class ImageClassifier(BaseEstimator, ClassifierMixin):
    """Interface: deterministic hard-label predictions over image batches.

    Implementations expose ``num_classes`` and ``predict(X) -> (n,) labels``
    with every label in [0, num_classes).  ``thread_safe`` declares whether
    concurrent predict calls are allowed; exclusive classifiers are
    serialized by the callers.
    """

    thread_safe = True

    def fit(self, X=None, y=None):
        return self

    def predict(self, X):  # pragma: no cover - interface stub
        raise NotImplementedError


class ValueOnlyClassifier(ImageClassifier):
    """Labels by mean per-pixel brightness only; blind to hue and saturation."""

    def __init__(self, num_classes: int = 10):
        self.num_classes = num_classes

    def predict(self, X) -> np.ndarray:
        X = check_image_batch(X)
        if self.num_classes < 1:
            raise ValueError("num_classes must be >= 1")
        value = X.max(axis=-1)
        mean = value.reshape(len(X), -1).mean(axis=1) if len(X) else np.zeros(0)
        labels = np.floor(mean * self.num_classes).astype(np.int64)
        return np.minimum(labels, self.num_classes - 1)


def circular_mean_hue(images) -> np.ndarray:
    """Saturation-weighted circular mean hue of each image, in [0, 1).

    Each pixel contributes a unit vector at angle 2*pi*h weighted by its
    saturation, so gray pixels (where hue is meaningless) contribute
    nothing.  A fully gray image comes out at hue 0.
    """
    X = check_image_batch(images)
    hsv = rgb_to_hsv(X)
    angles = 2.0 * np.pi * hsv[..., 0]
    weight = hsv[..., 1]
    cos_sum = (weight * np.cos(angles)).reshape(len(X), -1).sum(axis=1)
    sin_sum = (weight * np.sin(angles)).reshape(len(X), -1).sum(axis=1)
    mean = np.mod(np.arctan2(sin_sum, cos_sum) / (2.0 * np.pi), 1.0)
    return np.where(mean >= 1.0, 0.0, mean)


class HueMeanClassifier(ImageClassifier):
    """Labels by which of k equal hue sectors the circular mean hue falls in.

    Rotating every hue by delta rotates the label by exactly delta, which
    makes the misclassifying hue arc analytically known and the classifier a
    convenient oracle target.
    """

    def __init__(self, sectors: int = 4):
        self.sectors = sectors

    @property
    def num_classes(self) -> int:
        return self.sectors

    def predict(self, X) -> np.ndarray:
        if self.sectors < 2:
            raise ValueError("sectors must be >= 2")
        mean = circular_mean_hue(X)
        labels = np.floor(mean * self.sectors).astype(np.int64)
        return np.minimum(labels, self.sectors - 1)


def _forward(X2, W1, b1, W2, b2):
    hidden = np.maximum(X2 @ W1 + b1, 0.0)
    scores = hidden @ W2 + b2
    return hidden, scores


def softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def mlp_loss_and_grads(params, X2, y):
    """Mean softmax cross-entropy and its gradients for one minibatch.

    params is the tuple (W1, b1, W2, b2); X2 is the flattened input batch.
    """
    W1, b1, W2, b2 = params
    n = len(X2)
    hidden, scores = _forward(X2, W1, b1, W2, b2)
    shifted = scores - scores.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1)) + scores.max(axis=1)
    loss = float((log_z - scores[np.arange(n), y]).mean())

    dscores = softmax(scores)
    dscores[np.arange(n), y] -= 1.0
    dscores /= n
    dW2 = hidden.T @ dscores
    db2 = dscores.sum(axis=0)
    dhidden = dscores @ W2.T
    dhidden[hidden <= 0.0] = 0.0
    dW1 = X2.T @ dhidden
    db1 = dhidden.sum(axis=0)
    return loss, (dW1, db1, dW2, db2)


_MODEL_HEADER = struct.Struct("<4sIII")  # magic + input/hidden/class sizes, 16 bytes
_MODEL_MAGIC = b"MLPW"


class MlpClassifier(ImageClassifier):
    """One-hidden-layer ReLU network trained with minibatch SGD.

    Training is bit-deterministic given ``seed``.  When ``augment`` is set,
    every epoch trains on the original batch plus freshly color-shifted
    copies drawn per the policy, which is the defensive-training recipe the
    evaluation harness measures.

    Parameters
    ----------
    hidden_units : int
        Width of the single hidden layer.
    epochs, batch_size, learning_rate : SGD hyperparameters.
    seed : int
        Master seed for initialization, shuffling and augmentation draws.
    augment : AugmentPolicy or None
        Per-epoch color-shift augmentation; None trains on originals only.
    """

    def __init__(self, hidden_units: int = 32, epochs: int = 30, batch_size: int = 32,
                 learning_rate: float = 0.1, seed: int = 0, augment: AugmentPolicy | None = None):
        self.hidden_units = hidden_units
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed
        self.augment = augment

    @property
    def num_classes(self) -> int:
        self._check_fitted()
        return self.n_classes_

    def _check_fitted(self):
        if not hasattr(self, "W1_"):
            raise NotFittedError("this MlpClassifier instance is not fitted yet")

    def fit(self, X, y):
        X = check_image_batch(X)
        y = check_labels(y, n_samples=len(X))
        if len(X) == 0:
            raise ValueError("cannot fit on an empty dataset")

        n, height, width, _ = X.shape
        input_dim = 3 * height * width
        n_classes = int(y.max()) + 1
        rng = np.random.default_rng(self.seed)

        W1 = rng.normal(0.0, np.sqrt(2.0 / input_dim), size=(input_dim, self.hidden_units))
        b1 = np.zeros(self.hidden_units)
        W2 = rng.normal(0.0, np.sqrt(2.0 / self.hidden_units), size=(self.hidden_units, n_classes))
        b2 = np.zeros(n_classes)

        for epoch in range(self.epochs):
            if self.augment is not None:
                copies = shifted_copies(X, self.augment, seed=[self.seed, 1 + epoch])
                Xe = np.concatenate([X, copies]).reshape(-1, input_dim)
                ye = np.concatenate([y] + [y] * self.augment.copies)
            else:
                Xe = X.reshape(n, input_dim)
                ye = y
            order = rng.permutation(len(Xe))
            for start in range(0, len(Xe), self.batch_size):
                idx = order[start:start + self.batch_size]
                _, grads = mlp_loss_and_grads((W1, b1, W2, b2), Xe[idx], ye[idx])
                W1 -= self.learning_rate * grads[0]
                b1 -= self.learning_rate * grads[1]
                W2 -= self.learning_rate * grads[2]
                b2 -= self.learning_rate * grads[3]

        self.W1_, self.b1_, self.W2_, self.b2_ = W1, b1, W2, b2
        self.input_shape_ = (height, width)
        self.input_dim_ = input_dim
        self.n_classes_ = n_classes
        self.classes_ = np.arange(n_classes)
        self.train_accuracy_ = float((self._argmax(X) == y).mean())
        return self

    def _argmax(self, X) -> np.ndarray:
        X2 = X.reshape(len(X), -1)
        if X2.shape[1] != self.input_dim_:
            raise ValueError(
                f"input dimension {X2.shape[1]} does not match the model's {self.input_dim_}")
        _, scores = _forward(X2, self.W1_, self.b1_, self.W2_, self.b2_)
        return scores.argmax(axis=1)  # ties resolve to the lowest class index

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_image_batch(X)
        return self._argmax(X)

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_image_batch(X)
        X2 = X.reshape(len(X), -1)
        if X2.shape[1] != self.input_dim_:
            raise ValueError(
                f"input dimension {X2.shape[1]} does not match the model's {self.input_dim_}")
        _, scores = _forward(X2, self.W1_, self.b1_, self.W2_, self.b2_)
        return softmax(scores)

    def save(self, path) -> None:
        """Write the weights as little-endian float32 after a 16-byte header."""
        self._check_fitted()
        params = [self.W1_, self.b1_, self.W2_, self.b2_]
        if not all(np.all(np.isfinite(p)) for p in params):
            raise ValueError("refusing to save non-finite parameters")
        header = _MODEL_HEADER.pack(_MODEL_MAGIC, self.input_dim_, self.hidden_units,
                                    self.n_classes_)
        with open(path, "wb") as fh:
            fh.write(header)
            for p in params:
                fh.write(np.ascontiguousarray(p, dtype="<f4").tobytes())

    @classmethod
    def load(cls, path) -> "MlpClassifier":
        """Reload a saved model; float32 parameters round-trip bit-exactly."""
        from .errors import DataFormatError

        with open(path, "rb") as fh:
            blob = fh.read()
        if len(blob) < _MODEL_HEADER.size:
            raise DataFormatError("model file shorter than its header")
        magic, input_dim, hidden, n_classes = _MODEL_HEADER.unpack_from(blob)
        if magic != _MODEL_MAGIC:
            raise DataFormatError(f"bad model magic {magic!r}")
        counts = [input_dim * hidden, hidden, hidden * n_classes, n_classes]
        expected = _MODEL_HEADER.size + 4 * sum(counts)
        if len(blob) != expected:
            raise DataFormatError(f"model file has {len(blob)} bytes, expected {expected}")
        flat = np.frombuffer(blob, dtype="<f4", offset=_MODEL_HEADER.size).astype(np.float64)
        if not np.all(np.isfinite(flat)):
            raise DataFormatError("model file contains non-finite parameters")

        model = cls(hidden_units=hidden)
        offsets = np.cumsum([0] + counts)
        model.W1_ = flat[offsets[0]:offsets[1]].reshape(input_dim, hidden)
        model.b1_ = flat[offsets[1]:offsets[2]]
        model.W2_ = flat[offsets[2]:offsets[3]].reshape(hidden, n_classes)
        model.b2_ = flat[offsets[3]:offsets[4]]
        model.input_dim_ = input_dim
        model.input_shape_ = None  # any (h, w) with 3*h*w == input_dim is accepted
        model.n_classes_ = n_classes
        model.classes_ = np.arange(n_classes)
        return model


def load_mlp(path) -> MlpClassifier:
    """Convenience alias for MlpClassifier.load."""
    return MlpClassifier.load(path)
