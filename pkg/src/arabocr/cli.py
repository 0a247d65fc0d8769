"""Command-line front end for the whole pipeline.

Subcommands: synth, train, recognize, evaluate, segment, features.
Exit codes: 0 success, 2 usage or input error, 3 pipeline error.
Results go to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import evaluation
from .dataset import LABELS, SynthConfig, generate_dataset, label_index, load_manifest
from .errors import InputError, PipelineError
from .features import extract_features, fit_feature_mask
from .imaging import GrayImage, load_netpbm, save_pgm
from .network import TrainConfig, load_model, predict, save_model, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arabocr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic labeled corpus")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--per-class", required=True, type=int)
    p.add_argument("--noise", type=float, default=0.02)
    p.add_argument("--shift", type=int, default=2)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--templates", type=Path, default=None,
                   help="directory of 28 <label>.pgm files instead of procedural templates")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a classifier from a manifest")
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--manifest", type=Path, default=None,
                   help="manifest path; relative names resolve inside --data (default manifest.csv)")
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--model", required=True, type=Path)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recognize", help="classify the glyph(s) in one image")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--image", required=True, type=Path)
    p.add_argument("--page", action="store_true",
                   help="score every glyph in reading order, not just the largest")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("evaluate", help="score a model on a manifest's test split")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--manifest", type=Path, default=None)
    p.add_argument("--confusion", type=Path, default=None,
                   help="write the labeled confusion matrix CSV here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("segment", help="dump normalized glyphs as PGM files")
    p.add_argument("--image", required=True, type=Path)
    p.add_argument("--out-dir", required=True, type=Path)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("features", help="print the 58 feature values of an image")
    p.add_argument("--image", required=True, type=Path)
    p.set_defaults(func=cmd_features)

    return parser


def _manifest_entries(data_dir: Path, manifest: Path | None):
    path = manifest if manifest is not None else Path("manifest.csv")
    if not path.is_absolute():
        path = data_dir / path
    return load_manifest(path.read_bytes(), data_dir)


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        per_class=args.per_class,
        noise=args.noise,
        shift=args.shift,
        train_fraction=args.train_fraction,
        seed=args.seed,
        templates_dir=args.templates,
    )
    entries = generate_dataset(args.out, cfg)
    print(f"wrote {len(entries)} samples to {args.out}", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    entries = [e for e in _manifest_entries(args.data, args.manifest) if e.split == "train"]
    vectors, labels = [], []
    for entry in entries:
        try:
            vec = evaluation.character_features(load_netpbm(entry.path.read_bytes()))
        except PipelineError as exc:
            print(f"skipping {entry.path}: {exc}", file=sys.stderr)
            continue
        vectors.append(vec)
        labels.append(label_index(entry.label))
    if not vectors:
        raise PipelineError("E_EMPTY_DATASET", "no usable training images")

    mask = fit_feature_mask(vectors)
    samples = [(v[mask.keep], y) for v, y in zip(vectors, labels)]
    cfg = TrainConfig(hidden=args.hidden, lr=args.lr, epochs=args.epochs, seed=args.seed)
    model, history = train(samples, cfg, mask=mask, classes=LABELS)
    for epoch, loss in enumerate(history):
        print(f"epoch {epoch} loss {loss:.6f}", file=sys.stderr)
    args.model.write_bytes(save_model(model))
    return 0


def cmd_recognize(args) -> int:
    model = load_model(args.model.read_bytes())
    gray = load_netpbm(args.image.read_bytes())
    pairs = evaluation.page_glyphs(gray)
    if not pairs:
        raise PipelineError("E_EMPTY", f"no glyphs found in {args.image}")
    if not args.page:
        pairs = [max(pairs, key=lambda pair: pair[0].area)]
    for index, (_, norm) in enumerate(pairs):
        idx, confidence = predict(model, extract_features(norm))
        print(f"{index}\t{model.classes[idx]}\t{confidence:.4f}")
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model.read_bytes())
    entries = [e for e in _manifest_entries(args.data, args.manifest) if e.split == "test"]
    report = evaluation.evaluate(model, entries)
    summary, csv_bytes = evaluation.render_report(report)
    if args.confusion is not None:
        args.confusion.write_bytes(csv_bytes)
    if report.errors:
        print(f"{report.errors} images failed the pipeline", file=sys.stderr)
    print(summary)
    return 0


def cmd_segment(args) -> int:
    gray = load_netpbm(args.image.read_bytes())
    pairs = evaluation.page_glyphs(gray)
    if not pairs:
        raise PipelineError("E_EMPTY", f"no glyphs found in {args.image}")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for k, (_, norm) in enumerate(pairs):
        gray_out = GrayImage(((1 - norm.grid) * 255).astype(np.uint8))
        (args.out_dir / f"glyph_{k}.pgm").write_bytes(save_pgm(gray_out))
    print(f"wrote {len(pairs)} glyphs to {args.out_dir}", file=sys.stderr)
    return 0


def cmd_features(args) -> int:
    gray = load_netpbm(args.image.read_bytes())
    vec = evaluation.character_features(gray)
    for value in vec:
        print(f"{value:.17g}")
    return 0


def run_cli(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
