"""Dataset and image file I/O.

Covers the CIFAR-10 binary batch format (3073-byte records: one label
byte, then 1024-byte R, G, B planes of a row-major 32x32 image), binary
PPM (P6, maxval 255), directory datasets (PPM files plus a labels CSV),
and a deterministic synthetic generator that renders colored shapes on
gray backgrounds -- the desk-scale stand-in for natural photos, where the
class is carried by the silhouette and (optionally) leaked by the color.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .colorspace import hsv_to_rgb, rgb_to_uint8
from .errors import DataFormatError
from .validation import check_image_batch, check_labels

CIFAR10_CLASSES = ["airplane", "automobile", "bird", "cat", "deer",
                   "dog", "frog", "horse", "ship", "truck"]

SHAPE_CLASSES = ("circle", "square", "triangle", "cross")

_CIFAR_RECORD = 3073  # 1 label byte + 3 * 1024 pixel bytes


@dataclass
class LabeledDataset:
    """Images with ground-truth labels and class names.

    images : (n, height, width, 3) float64 array in [0, 1]
    labels : (n,) integer array, each < len(class_names)
    """

    images: np.ndarray
    labels: np.ndarray
    class_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.images = check_image_batch(self.images, name="images")
        self.labels = check_labels(self.labels, n_samples=len(self.images), name="labels")
        if not self.class_names:
            top = int(self.labels.max()) + 1 if len(self.labels) else 0
            self.class_names = [f"class_{i}" for i in range(top)]
        if len(self.labels) and int(self.labels.max()) >= len(self.class_names):
            raise ValueError("labels reference classes beyond class_names")

    def __len__(self) -> int:
        return len(self.images)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices)
        return LabeledDataset(self.images[idx], self.labels[idx], list(self.class_names))


def parse_cifar10(data: bytes) -> LabeledDataset:
    """Parse CIFAR-10 binary batch bytes into a dataset.

    Rejects inputs whose length is not a multiple of the 3073-byte record
    size, and any record whose label byte exceeds 9 (the error names the
    offending record index).
    """
    if len(data) % _CIFAR_RECORD != 0:
        raise DataFormatError(
            f"byte length {len(data)} is not a multiple of the {_CIFAR_RECORD}-byte record size")
    n = len(data) // _CIFAR_RECORD
    raw = np.frombuffer(data, dtype=np.uint8).reshape(n, _CIFAR_RECORD)
    labels = raw[:, 0].astype(np.int64)
    bad = np.nonzero(labels > 9)[0]
    if bad.size:
        raise DataFormatError(f"record {int(bad[0])} has label byte {int(labels[bad[0]])} > 9")
    planes = raw[:, 1:].reshape(n, 3, 32, 32)
    images = planes.transpose(0, 2, 3, 1).astype(np.float64) / 255.0
    if n == 0:
        images = images.reshape(0, 32, 32, 3)
    return LabeledDataset(images, labels, list(CIFAR10_CLASSES))


def serialize_cifar10(dataset: LabeledDataset) -> bytes:
    """Inverse of parse_cifar10; byte-exact for datasets it produced."""
    images = dataset.images
    if images.shape[1:] != (32, 32, 3):
        raise DataFormatError("CIFAR-10 records hold 32x32 RGB images")
    if len(dataset.labels) and int(dataset.labels.max()) > 9:
        raise DataFormatError("CIFAR-10 labels must be in [0, 9]")
    out = bytearray()
    for img, label in zip(images, dataset.labels):
        out.append(int(label))
        out += rgb_to_uint8(img).transpose(2, 0, 1).tobytes()
    return bytes(out)


def _next_ppm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        ch = data[pos:pos + 1]
        if ch == b"#":
            newline = data.find(b"\n", pos)
            pos = len(data) if newline < 0 else newline + 1
        elif ch.isspace():
            pos += 1
        else:
            break
    if pos >= len(data):
        raise DataFormatError("unexpected end of PPM header")
    start = pos
    while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
        pos += 1
    return data[start:pos], pos


def read_ppm(data: bytes) -> np.ndarray:
    """Decode a binary PPM (P6, maxval 255) into a float image in [0, 1]."""
    magic, pos = _next_ppm_token(data, 0)
    if magic != b"P6":
        raise DataFormatError(f"not a binary PPM: magic {magic!r}")
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _next_ppm_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise DataFormatError(f"PPM {name} is not an integer: {token!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise DataFormatError(f"bad PPM dimensions {width}x{height}")
    if maxval != 255:
        raise DataFormatError(f"unsupported PPM maxval {maxval}; only 255 is handled")
    pos += 1  # exactly one whitespace byte separates the header from the raster
    expected = 3 * width * height
    raster = data[pos:pos + expected]
    if len(raster) < expected:
        raise DataFormatError(f"truncated PPM raster: {len(raster)} of {expected} bytes")
    if len(data) > pos + expected:
        raise DataFormatError("trailing bytes after the PPM raster")
    arr = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return arr.astype(np.float64) / 255.0


def write_ppm(img: np.ndarray) -> bytes:
    """Encode an image as binary PPM, quantizing with round-half-away-from-zero."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[-1] != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise DataFormatError(f"expected a (height, width, 3) image, got shape {img.shape}")
    height, width = img.shape[0], img.shape[1]
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + rgb_to_uint8(img).tobytes()


def load_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return read_ppm(fh.read())


def save_ppm(img: np.ndarray, path) -> None:
    with open(path, "wb") as fh:
        fh.write(write_ppm(img))


@dataclass(frozen=True)
class ShapeSpec:
    """Parameters for one rendered image: geometry plus fill and background."""

    shape: str
    hue: float
    saturation: float
    value: float
    background: float
    center_x: float  # canvas fractions
    center_y: float
    area_fraction: float

    def __post_init__(self):
        if self.shape not in SHAPE_CLASSES:
            raise ValueError(f"unknown shape {self.shape!r}")
        if not 0.10 <= self.area_fraction <= 0.60:
            raise ValueError("shapes must cover between 10% and 60% of the canvas")


def _shape_mask(spec: ShapeSpec, grid: int) -> np.ndarray:
    coords = (np.arange(grid) + 0.5) / grid
    yy, xx = np.meshgrid(coords, coords, indexing="ij")
    dx = xx - spec.center_x
    dy = yy - spec.center_y
    a = spec.area_fraction
    if spec.shape == "circle":
        return dx * dx + dy * dy <= a / np.pi
    if spec.shape == "square":
        half = np.sqrt(a) / 2.0
        return (np.abs(dx) <= half) & (np.abs(dy) <= half)
    if spec.shape == "triangle":
        # up-pointing isoceles with height equal to base width
        w = np.sqrt(2.0 * a)
        rel = (dy + w / 2.0) / w  # 0 at the apex, 1 at the base
        return (rel >= 0.0) & (rel <= 1.0) & (np.abs(dx) <= rel * w / 2.0)
    w = np.sqrt(a / 5.0)  # cross of two 3w-long, w-wide bars (union area 5w^2)
    half_len = 1.5 * w
    horizontal = (np.abs(dx) <= half_len) & (np.abs(dy) <= w / 2.0)
    vertical = (np.abs(dy) <= half_len) & (np.abs(dx) <= w / 2.0)
    return horizontal | vertical


def render_shape(spec: ShapeSpec, size: int, supersample: int = 4) -> np.ndarray:
    """Render one anti-aliased shape image (supersampled box filter)."""
    if size < 8:
        raise ValueError("size must be >= 8")
    grid = size * supersample
    mask = _shape_mask(spec, grid).astype(np.float64)
    coverage = mask.reshape(size, supersample, size, supersample).mean(axis=(1, 3))
    fill = hsv_to_rgb(np.array([spec.hue, spec.saturation, spec.value]))
    return spec.background + coverage[:, :, None] * (fill - spec.background)


def generate_shape_dataset(n_per_class: int, size: int,
                           color_policy: str = "class-correlated",
                           seed: int = 0) -> LabeledDataset:
    """Render a labeled dataset of colored shapes on gray backgrounds.

    With the ``class-correlated`` policy each class draws its fill hue from
    a disjoint arc of width 0.1 centered at c/num_classes, planting a color
    shortcut that a lazy model will exploit; ``uniform-random`` draws hue
    from U(0, 1) so only the silhouette predicts the class.  Deterministic
    given seed.
    """
    if color_policy not in ("class-correlated", "uniform-random"):
        raise ValueError(f"unknown color policy {color_policy!r}")
    if n_per_class < 0:
        raise ValueError("n_per_class must be >= 0")
    rng = np.random.default_rng(seed)
    num_classes = len(SHAPE_CLASSES)
    images, labels = [], []
    for c, shape in enumerate(SHAPE_CLASSES):
        for _ in range(n_per_class):
            if color_policy == "class-correlated":
                hue = (c / num_classes + rng.uniform(-0.05, 0.05)) % 1.0
                hue = 0.0 if hue >= 1.0 else hue
            else:
                hue = rng.uniform(0.0, 1.0)
            spec = ShapeSpec(
                shape=shape,
                hue=hue,
                saturation=rng.uniform(0.65, 1.0),
                value=rng.uniform(0.75, 1.0),
                background=rng.uniform(0.08, 0.32),
                center_x=0.5 + rng.uniform(-0.05, 0.05),
                center_y=0.5 + rng.uniform(-0.05, 0.05),
                area_fraction=rng.uniform(0.12, 0.35),
            )
            images.append(render_shape(spec, size))
            labels.append(c)
    if not images:
        return LabeledDataset(np.zeros((0, size, size, 3)), np.zeros(0, dtype=np.int64),
                              list(SHAPE_CLASSES))
    return LabeledDataset(np.stack(images), np.array(labels), list(SHAPE_CLASSES))


def save_dataset_dir(dataset: LabeledDataset, directory) -> None:
    """Write a dataset as numbered PPMs plus labels.csv and classes.txt."""
    import os

    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "labels.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["filename", "label"])
        for i, (img, label) in enumerate(zip(dataset.images, dataset.labels)):
            name = f"{i:05d}.ppm"
            save_ppm(img, os.path.join(directory, name))
            writer.writerow([name, int(label)])
    with open(os.path.join(directory, "classes.txt"), "w") as fh:
        fh.write("".join(f"{name}\n" for name in dataset.class_names))


def load_dataset_dir(directory) -> LabeledDataset:
    """Load a dataset written by save_dataset_dir (or hand-assembled)."""
    import os

    labels_path = os.path.join(directory, "labels.csv")
    if not os.path.exists(labels_path):
        raise DataFormatError(f"no labels.csv in {directory}")
    images, labels = [], []
    with open(labels_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["filename", "label"]:
            raise DataFormatError("labels.csv must start with a 'filename,label' header")
        for row in reader:
            if len(row) < 2:
                raise DataFormatError(f"short row in labels.csv: {row!r}")
            images.append(load_ppm(os.path.join(directory, row[0])))
            labels.append(int(row[1]))
    class_names = []
    classes_path = os.path.join(directory, "classes.txt")
    if os.path.exists(classes_path):
        with open(classes_path) as fh:
            class_names = [line.strip() for line in fh if line.strip()]
    if not images:
        raise DataFormatError(f"labels.csv in {directory} lists no images")
    shapes = {img.shape for img in images}
    if len(shapes) > 1:
        raise DataFormatError(f"images have mixed dimensions: {sorted(shapes)}")
    return LabeledDataset(np.stack(images), np.array(labels), class_names)
