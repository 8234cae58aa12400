"""Evaluation harness: clean vs adversarial accuracy and success curves.

`evaluate` measures how a classifier's accuracy degrades under the
color-shift attack; `evaluate_targeted` sweeps every wrong label as a
target and also reports how many distinct labels each image can be pushed
to.  Reports serialize to CSV (scalars in ``#`` metadata lines, one row
per attacked image) plus a cumulative success curve as CSV and SVG, all
byte-deterministic given the report.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .attack import GOAL_TARGETED, GOAL_UNTARGETED, _predict_one, run_attack

_ROW_FIELDS = ["index", "true_label", "predicted_label", "target", "success",
               "trial_index", "delta_h", "delta_s", "final_label"]


@dataclass(frozen=True)
class ImageRow:
    """One attacked image (or one image/target pair in the targeted sweep)."""

    index: int
    true_label: int
    predicted_label: int
    target: int | None
    success: bool
    trial_index: int | None
    delta_h: float | None
    delta_s: float | None
    final_label: int


@dataclass
class EvalReport:
    """Aggregate attack measurements plus the per-image rows behind them."""

    trials: int
    clean_accuracy: float
    adversarial_accuracy: float
    attack_success_rate: float
    success_by_trial: np.ndarray  # length == trials, cumulative fractions
    curve_denominator: int
    rows: list[ImageRow] = field(default_factory=list)
    targeted_success_rate: float | None = None
    mean_reachable_labels: float | None = None

    def __post_init__(self):
        self.success_by_trial = np.asarray(self.success_by_trial, dtype=np.float64)
        if len(self.success_by_trial) != self.trials:
            raise ValueError("success_by_trial must have one entry per trial")
        if np.any(np.diff(self.success_by_trial) < 0):
            raise ValueError("success_by_trial must be non-decreasing")
        if self.trials and self.success_by_trial[-1] != self.attack_success_rate:
            raise ValueError("success_by_trial must end at attack_success_rate")
        if self.adversarial_accuracy > self.clean_accuracy:
            raise ValueError("adversarial accuracy cannot exceed clean accuracy")


def _curve(trial_indices, trials: int, denominator: int) -> np.ndarray:
    hist = np.zeros(trials)
    for t in trial_indices:
        hist[t] += 1
    return np.cumsum(hist) / max(denominator, 1)


def _run_attacks(tasks, jobs: int, classifier, worker):
    """Run attack tasks, optionally in threads; results keyed by task."""
    serialize = not getattr(classifier, "thread_safe", True)
    if jobs > 1 and not serialize:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return dict(zip(tasks, pool.map(worker, tasks)))
    return {task: worker(task) for task in tasks}


def evaluate(dataset, classifier, *, trials: int = 1000, seed: int = 0,
             quantize: bool = False, jobs: int = 1,
             curve_over: str = "correct") -> EvalReport:
    """Attack every correctly classified image and aggregate the damage.

    Clean accuracy is measured first; the attack (untargeted, versus the
    model's own prediction) then runs on the correctly classified subset.
    Adversarial accuracy counts an image as still correct iff it was
    correct initially and the attack failed, so it never exceeds clean
    accuracy.  ``curve_over`` picks the success-curve denominator:
    "correct" (default) or "all".

    Deterministic given ``seed``; per-image random streams are derived from
    (seed, image index) so ``jobs`` does not affect results.
    """
    if curve_over not in ("correct", "all"):
        raise ValueError("curve_over must be 'correct' or 'all'")
    n = len(dataset)
    preds = [_predict_one(classifier, img, quantize) for img in dataset.images]
    correct = [i for i in range(n) if preds[i] == dataset.labels[i]]

    def worker(i):
        return run_attack(dataset.images[i], classifier, trials=trials, goal=GOAL_UNTARGETED,
                          seed=seed, image_index=i, quantize=quantize)

    outcomes = _run_attacks(correct, jobs, classifier, worker)

    rows = []
    for i in range(n):
        out = outcomes.get(i)
        if out is None:
            rows.append(ImageRow(i, int(dataset.labels[i]), preds[i], None, False,
                                 None, None, None, preds[i]))
        elif out.success:
            rows.append(ImageRow(i, int(dataset.labels[i]), preds[i], None, True,
                                 out.trial_index, out.shift.delta_h, out.shift.delta_s,
                                 out.final_label))
        else:
            rows.append(ImageRow(i, int(dataset.labels[i]), preds[i], None, False,
                                 None, None, None, out.final_label))

    n_success = sum(1 for out in outcomes.values() if out.success)
    denominator = len(correct) if curve_over == "correct" else n
    curve = _curve([out.trial_index for out in outcomes.values() if out.success],
                   trials, denominator)
    return EvalReport(
        trials=trials,
        clean_accuracy=len(correct) / n if n else 0.0,
        adversarial_accuracy=(len(correct) - n_success) / n if n else 0.0,
        attack_success_rate=n_success / denominator if denominator else 0.0,
        success_by_trial=curve,
        curve_denominator=denominator,
        rows=rows,
    )


def evaluate_targeted(dataset, classifier, *, trials: int = 1000, seed: int = 0,
                      quantize: bool = False, jobs: int = 1) -> EvalReport:
    """Attack every correctly classified image toward every wrong label.

    The targeted success rate divides successes by images x (num_classes-1);
    mean_reachable_labels averages, per image, the distinct labels reached
    plus one for the original prediction.
    """
    num_classes = getattr(classifier, "num_classes")
    if num_classes < 2:
        raise ValueError("targeted evaluation needs at least 2 classes")
    n = len(dataset)
    preds = [_predict_one(classifier, img, quantize) for img in dataset.images]
    correct = [i for i in range(n) if preds[i] == dataset.labels[i]]
    tasks = [(i, t) for i in correct for t in range(num_classes) if t != preds[i]]

    def worker(task):
        i, t = task
        return run_attack(dataset.images[i], classifier, trials=trials, goal=GOAL_TARGETED,
                          target=t, seed=seed, image_index=i * num_classes + t,
                          quantize=quantize)

    outcomes = _run_attacks(tasks, jobs, classifier, worker)

    rows = []
    reached: dict[int, set[int]] = {i: set() for i in correct}
    for (i, t) in tasks:
        out = outcomes[(i, t)]
        if out.success:
            reached[i].add(out.final_label)
            rows.append(ImageRow(i, int(dataset.labels[i]), preds[i], t, True,
                                 out.trial_index, out.shift.delta_h, out.shift.delta_s,
                                 out.final_label))
        else:
            rows.append(ImageRow(i, int(dataset.labels[i]), preds[i], t, False,
                                 None, None, None, out.final_label))

    n_success = sum(1 for out in outcomes.values() if out.success)
    rate = n_success / len(tasks) if tasks else 0.0
    curve = _curve([out.trial_index for out in outcomes.values() if out.success],
                   trials, len(tasks))
    broken = sum(1 for i in correct if reached[i])
    return EvalReport(
        trials=trials,
        clean_accuracy=len(correct) / n if n else 0.0,
        adversarial_accuracy=(len(correct) - broken) / n if n else 0.0,
        attack_success_rate=rate,
        success_by_trial=curve,
        curve_denominator=len(tasks),
        rows=rows,
        targeted_success_rate=rate,
        mean_reachable_labels=(sum(len(reached[i]) + 1 for i in correct) / len(correct)
                               if correct else 0.0),
    )


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)  # repr round-trips doubles exactly
    return str(value)


def write_report(report: EvalReport, path) -> None:
    """Serialize a report: ``# key=value`` scalar lines, then row CSV."""
    lines = ["# colorshift-report v1"]
    for key in ("trials", "curve_denominator", "clean_accuracy", "adversarial_accuracy",
                "attack_success_rate", "targeted_success_rate", "mean_reachable_labels"):
        lines.append(f"# {key}={_format(getattr(report, key))}")
    lines.append(",".join(_ROW_FIELDS))
    for row in report.rows:
        lines.append(",".join(_format(getattr(row, name)) for name in _ROW_FIELDS))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_report(path) -> EvalReport:
    """Read back a report written by write_report."""
    meta: dict[str, str] = {}
    rows: list[ImageRow] = []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# ") and "=" in line:
                key, _, value = line[2:].partition("=")
                meta[key] = value
            elif line.startswith("#") or not line:
                continue
            elif line == ",".join(_ROW_FIELDS):
                continue
            else:
                parts = line.split(",")
                rows.append(ImageRow(
                    index=int(parts[0]),
                    true_label=int(parts[1]),
                    predicted_label=int(parts[2]),
                    target=int(parts[3]) if parts[3] else None,
                    success=parts[4] == "1",
                    trial_index=int(parts[5]) if parts[5] else None,
                    delta_h=float(parts[6]) if parts[6] else None,
                    delta_s=float(parts[7]) if parts[7] else None,
                    final_label=int(parts[8]),
                ))
    trials = int(meta["trials"])
    denominator = int(meta["curve_denominator"])
    curve = _curve([row.trial_index for row in rows if row.success], trials, denominator)

    def opt_float(key):
        return float(meta[key]) if meta.get(key) else None

    return EvalReport(
        trials=trials,
        clean_accuracy=float(meta["clean_accuracy"]),
        adversarial_accuracy=float(meta["adversarial_accuracy"]),
        attack_success_rate=float(meta["attack_success_rate"]),
        success_by_trial=curve,
        curve_denominator=denominator,
        rows=rows,
        targeted_success_rate=opt_float("targeted_success_rate"),
        mean_reachable_labels=opt_float("mean_reachable_labels"),
    )


def write_curve_csv(report: EvalReport, path) -> None:
    """Cumulative success after t trials, for t = 0 .. trials (N+1 rows)."""
    lines = ["trial,cumulative_success", "0,0.0"]
    for t in range(1, report.trials + 1):
        lines.append(f"{t},{repr(float(report.success_by_trial[t - 1]))}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def render_curve_svg(report: EvalReport, path, width: int = 480, height: int = 320) -> None:
    """Minimal deterministic SVG line plot of the success curve."""
    margin = 40.0
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    points = [(0, 0.0)] + [(t, float(report.success_by_trial[t - 1]))
                           for t in range(1, report.trials + 1)]
    span = max(report.trials, 1)
    coords = " ".join(
        f"{margin + plot_w * t / span:.2f},{margin + plot_h * (1.0 - frac):.2f}"
        for t, frac in points)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin:.2f}" y="{margin:.2f}" width="{plot_w:.2f}" height="{plot_h:.2f}" '
        'fill="none" stroke="#cccccc"/>',
        f'<polyline points="{coords}" fill="none" stroke="#1f77b4" stroke-width="2"/>',
        f'<text x="{width / 2:.2f}" y="{height - 8:.2f}" text-anchor="middle" '
        'font-size="12" font-family="sans-serif">trials used</text>',
        f'<text x="12" y="{height / 2:.2f}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif" transform="rotate(-90 12 {height / 2:.2f})">'
        'cumulative success</text>',
        f'<text x="{margin:.2f}" y="{margin - 6:.2f}" font-size="10" '
        'font-family="sans-serif">1.0</text>',
        f'<text x="{margin:.2f}" y="{height - margin + 12:.2f}" font-size="10" '
        'font-family="sans-serif">0</text>',
        f'<text x="{width - margin:.2f}" y="{height - margin + 12:.2f}" text-anchor="end" '
        f'font-size="10" font-family="sans-serif">{report.trials}</text>',
        "</svg>",
    ]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
