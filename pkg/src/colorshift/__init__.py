"""Color-shift attack toolkit.

Generates adversarial images for black-box classifiers by rotating hue and
offsetting saturation uniformly across all pixels, leaving the per-pixel
brightness (the max of r, g, b) untouched.  Ships the color math, a random
search attack with a shrinking saturation schedule, reference classifiers
(including a small trainable MLP), dataset I/O (CIFAR-10 binary, PPM,
synthetic shapes), color-shift data augmentation, and an evaluation harness.
"""

from .augment import AugmentPolicy, augment_epoch, shifted_copies
from .attack import (
    GOAL_TARGETED,
    GOAL_UNTARGETED,
    GOAL_UNTARGETED_VS_LABEL,
    AttackOutcome,
    ColorShiftAttack,
    grid_oracle,
    label_reachability,
    make_shift_grid,
    run_attack,
)
from .classifiers import (
    HueMeanClassifier,
    ImageClassifier,
    MlpClassifier,
    ValueOnlyClassifier,
    circular_mean_hue,
    load_mlp,
)
from .colorspace import (
    ColorShift,
    ColorShifter,
    apply_shift,
    hsv_to_rgb,
    quantize_rgb,
    rgb_to_hsv,
    rgb_to_uint8,
    shift_rgb,
)
from .dataio import (
    CIFAR10_CLASSES,
    SHAPE_CLASSES,
    LabeledDataset,
    ShapeSpec,
    generate_shape_dataset,
    load_dataset_dir,
    load_ppm,
    parse_cifar10,
    read_ppm,
    render_shape,
    save_dataset_dir,
    save_ppm,
    serialize_cifar10,
    write_ppm,
)
from .errors import DataFormatError, LabelRangeError, RemoteProtocolError, TransportError
from .evalharness import (
    EvalReport,
    ImageRow,
    evaluate,
    evaluate_targeted,
    parse_report,
    render_curve_svg,
    write_curve_csv,
    write_report,
)
from .remote import RemoteClassifier

__version__ = "0.1.0"
