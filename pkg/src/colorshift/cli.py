"""Command-line entry point.

Subcommands: shift (apply one color shift to a PPM), attack (search for an
adversarial shift for one image), eval / eval-targeted (dataset-level
measurement), train (fit and save the MLP), gen-shapes (synthetic dataset).

Exit codes: 0 success; 1 the attack found no adversarial shift (a valid
scientific result, distinct from operational errors); 2 configuration or
classifier-transport errors; 3 bad input data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import augment, dataio, evalharness
from .attack import GOAL_TARGETED, GOAL_UNTARGETED, run_attack
from .classifiers import HueMeanClassifier, MlpClassifier, ValueOnlyClassifier
from .colorspace import shift_rgb
from .errors import DataFormatError, RemoteProtocolError, TransportError
from .remote import RemoteClassifier


def _parse_classifier(selector: str):
    kind, _, arg = selector.partition(":")
    if kind == "value-only":
        return ValueOnlyClassifier(num_classes=int(arg) if arg else 10)
    if kind == "hue-mean":
        if not arg:
            raise ValueError("hue-mean needs a sector count, e.g. hue-mean:4")
        return HueMeanClassifier(sectors=int(arg))
    if kind == "mlp":
        if not arg:
            raise ValueError("mlp needs a model path, e.g. mlp:model.bin")
        return MlpClassifier.load(arg)
    if kind == "remote":
        host, _, port = arg.rpartition(":")
        if not host or not port:
            raise ValueError("remote needs host:port, e.g. remote:127.0.0.1:9000")
        return RemoteClassifier.connect(host, int(port))
    raise ValueError(f"unknown classifier selector {selector!r}")


def _parse_goal(goal: str):
    if goal == "untargeted":
        return GOAL_UNTARGETED, None
    kind, _, arg = goal.partition(":")
    if kind == "targeted" and arg:
        return GOAL_TARGETED, int(arg)
    raise ValueError(f"goal must be 'untargeted' or 'targeted:<label>', got {goal!r}")


def _load_dataset(path: str) -> dataio.LabeledDataset:
    if os.path.isdir(path):
        return dataio.load_dataset_dir(path)
    with open(path, "rb") as fh:
        return dataio.parse_cifar10(fh.read())


def _cmd_shift(args) -> int:
    img = dataio.load_ppm(args.input)
    dataio.save_ppm(shift_rgb(img, (args.delta_h, args.delta_s)), args.output)
    return 0


def _cmd_attack(args) -> int:
    img = dataio.load_ppm(args.input)
    classifier = _parse_classifier(args.classifier)
    goal, target = _parse_goal(args.goal)
    outcome = run_attack(img, classifier, trials=args.trials, goal=goal, target=target,
                         seed=args.seed, quantize=args.quantize)
    if not outcome.success:
        print(f"no adversarial shift found in {args.trials} trials "
              f"(label stayed {outcome.original_label})")
        return 1
    if args.out:
        dataio.save_ppm(outcome.adversarial, args.out)
    if args.sidecar:
        sidecar = {
            "delta_h": outcome.shift.delta_h,
            "delta_s": outcome.shift.delta_s,
            "trial_index": outcome.trial_index,
            "original_label": outcome.original_label,
            "final_label": outcome.final_label,
        }
        with open(args.sidecar, "w") as fh:
            json.dump(sidecar, fh, indent=2)
            fh.write("\n")
    print(f"success at trial {outcome.trial_index}: label {outcome.original_label} -> "
          f"{outcome.final_label} (delta_h={outcome.shift.delta_h:.6f}, "
          f"delta_s={outcome.shift.delta_s:+.6f})")
    return 0


def _write_eval_outputs(report, args) -> None:
    if args.report:
        evalharness.write_report(report, args.report)
    if args.curve_csv:
        evalharness.write_curve_csv(report, args.curve_csv)
    if args.curve_svg:
        evalharness.render_curve_svg(report, args.curve_svg)


def _cmd_eval(args) -> int:
    dataset = _load_dataset(args.dataset)
    classifier = _parse_classifier(args.classifier)
    report = evalharness.evaluate(dataset, classifier, trials=args.trials, seed=args.seed,
                                  quantize=args.quantize, jobs=args.jobs,
                                  curve_over=args.curve_over)
    _write_eval_outputs(report, args)
    print(f"clean accuracy        {report.clean_accuracy:.4f}")
    print(f"adversarial accuracy  {report.adversarial_accuracy:.4f}")
    print(f"attack success rate   {report.attack_success_rate:.4f}")
    return 0


def _cmd_eval_targeted(args) -> int:
    dataset = _load_dataset(args.dataset)
    classifier = _parse_classifier(args.classifier)
    report = evalharness.evaluate_targeted(dataset, classifier, trials=args.trials,
                                           seed=args.seed, quantize=args.quantize,
                                           jobs=args.jobs)
    _write_eval_outputs(report, args)
    print(f"clean accuracy         {report.clean_accuracy:.4f}")
    print(f"targeted success rate  {report.targeted_success_rate:.4f}")
    print(f"mean reachable labels  {report.mean_reachable_labels:.4f}")
    return 0


def _cmd_train(args) -> int:
    dataset = _load_dataset(args.dataset)
    policy = None
    if args.augment:
        policy = augment.AugmentPolicy(copies=args.augment_copies)
    model = MlpClassifier(hidden_units=args.hidden, epochs=args.epochs,
                          batch_size=args.batch_size, learning_rate=args.learning_rate,
                          seed=args.seed, augment=policy)
    model.fit(dataset.images, dataset.labels)
    model.save(args.out)
    print(f"training accuracy {model.train_accuracy_:.4f}; saved to {args.out}")
    return 0


def _cmd_gen_shapes(args) -> int:
    dataset = dataio.generate_shape_dataset(args.n_per_class, args.size,
                                            color_policy=args.policy, seed=args.seed)
    dataio.save_dataset_dir(dataset, args.outdir)
    print(f"wrote {len(dataset)} images to {args.outdir}")
    return 0


def _add_eval_outputs(parser) -> None:
    parser.add_argument("--report", help="write the per-image CSV report here")
    parser.add_argument("--curve-csv", help="write the cumulative success curve CSV here")
    parser.add_argument("--curve-svg", help="render the success curve as SVG here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="colorshift",
                                     description="color-shift attack toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shift", help="apply one hue/saturation shift to a PPM image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--delta-h", type=float, default=0.0)
    p.add_argument("--delta-s", type=float, default=0.0)
    p.set_defaults(func=_cmd_shift)

    p = sub.add_parser("attack", help="search for an adversarial shift for one image")
    p.add_argument("input")
    p.add_argument("--classifier", required=True,
                   help="value-only[:K] | hue-mean:K | mlp:model.bin | remote:host:port")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--goal", default="untargeted", help="untargeted | targeted:<label>")
    p.add_argument("--quantize", action="store_true",
                   help="classify 8-bit-quantized probes (what a saved image would hold)")
    p.add_argument("--out", help="write the adversarial PPM here on success")
    p.add_argument("--sidecar", help="write a JSON record of the found shift here")
    p.set_defaults(func=_cmd_attack)

    for name, fn in (("eval", _cmd_eval), ("eval-targeted", _cmd_eval_targeted)):
        p = sub.add_parser(name, help=f"run the {name} measurement over a dataset")
        p.add_argument("dataset", help="dataset directory (PPMs + labels.csv) or CIFAR-10 .bin")
        p.add_argument("--classifier", required=True)
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--quantize", action="store_true")
        p.add_argument("--jobs", type=int, default=1)
        if name == "eval":
            p.add_argument("--curve-over", choices=["correct", "all"], default="correct",
                           help="denominator for the success curve")
        _add_eval_outputs(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("train", help="train the MLP on a dataset and save it")
    p.add_argument("dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--augment", action="store_true",
                   help="train each epoch on originals plus color-shifted copies")
    p.add_argument("--augment-copies", type=int, default=1)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("gen-shapes", help="render a synthetic shape dataset")
    p.add_argument("outdir")
    p.add_argument("--n-per-class", type=int, default=200)
    p.add_argument("--size", type=int, default=16)
    p.add_argument("--policy", choices=["class-correlated", "uniform-random"],
                   default="class-correlated")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gen_shapes)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TransportError, RemoteProtocolError) as exc:
        print(f"classifier transport failure: {exc}", file=sys.stderr)
        return 2
    except DataFormatError as exc:
        print(f"bad input data: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    raise SystemExit(main())
