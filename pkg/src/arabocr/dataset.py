"""Class registry, manifest I/O, and the synthetic corpus generator.

No public handwriting corpus ships with this project, so `generate_dataset`
builds a deterministic stand-in: 28 procedural pseudo-glyph templates (one
per letter class), each sampled with a small random placement shift and
per-pixel salt-and-pepper noise.  Everything is a pure function of the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, PipelineError
from .imaging import GrayImage, load_netpbm, otsu_threshold, save_pgm
from .rng import GOLDEN_GAMMA, SplitMix64

LABELS: tuple[str, ...] = (
    "alef", "baa", "taa", "thaa", "jeem", "hah", "khah", "dal", "thal",
    "reh", "zain", "seen", "sheen", "sad", "dad", "tah", "zah", "ain",
    "ghain", "feh", "qaf", "kaf", "lam", "meem", "noon", "heh", "waw", "yeh",
)
N_CLASSES = len(LABELS)
LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}

TEMPLATE_SIZE = 16
CANVAS_SIZE = 24
MANIFEST_HEADER = "path,label,split"


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    label: str
    split: str


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the synthetic corpus; defaults match the CLI."""

    per_class: int
    noise: float = 0.02
    shift: int = 2
    train_fraction: float = 0.8
    seed: int = 1
    templates_dir: Path | None = None

    def __post_init__(self):
        if self.per_class < 1:
            raise ValueError("per_class must be >= 1")
        if not 0.0 <= self.noise <= 0.5:
            raise ValueError("noise must lie in [0, 0.5]")
        if not 0 <= self.shift <= 4:
            raise ValueError("shift must lie in [0, 4]")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")


def load_manifest(data: bytes, base_dir: Path) -> list[ManifestEntry]:
    """Parse manifest.csv bytes; paths resolve against ``base_dir``.

    Rows are validated strictly: known label, known split, file present.
    Error messages name the offending file line (header is line 1).
    """
    text = data.decode("utf-8")
    lines = text.split("\n")
    if not lines or lines[0].strip() != MANIFEST_HEADER:
        raise InputError("E_HEADER", f"manifest header must be '{MANIFEST_HEADER}'")
    entries = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise InputError("E_SPLIT", f"row {lineno}: expected 3 columns")
        rel, label, split = (p.strip() for p in parts)
        if label not in LABEL_INDEX:
            raise InputError("E_LABEL", f"row {lineno}: unknown label '{label}'")
        if split not in ("train", "test"):
            raise InputError("E_SPLIT", f"row {lineno}: split must be train or test")
        path = base_dir / rel
        if not path.is_file():
            raise InputError("E_MISSING_FILE", f"row {lineno}: no such file {path}")
        entries.append(ManifestEntry(path=path, label=label, split=split))
    return entries


def procedural_template(class_index: int) -> np.ndarray:
    """Deterministic 16x16 pseudo-glyph for one class.

    Random 45%-density fill from a class-keyed stream, one majority-smoothing
    pass (3x3 neighborhood incl. self, >= 5 votes, border padded background),
    and a center-2x2 fallback so the template is never empty.
    """
    rng = SplitMix64(GOLDEN_GAMMA ^ class_index)
    raw = np.zeros((TEMPLATE_SIZE, TEMPLATE_SIZE), dtype=np.uint8)
    for r in range(TEMPLATE_SIZE):
        for c in range(TEMPLATE_SIZE):
            if rng.next_unit() < 0.45:
                raw[r, c] = 1
    padded = np.pad(raw.astype(np.int32), 1)
    votes = sum(
        padded[1 + dr : 1 + dr + TEMPLATE_SIZE, 1 + dc : 1 + dc + TEMPLATE_SIZE]
        for dr in (-1, 0, 1)
        for dc in (-1, 0, 1)
    )
    smooth = (votes >= 5).astype(np.uint8)
    if not smooth.any():
        mid = TEMPLATE_SIZE // 2
        smooth[mid - 1 : mid + 1, mid - 1 : mid + 1] = 1
    return smooth


def _template_from_file(path: Path) -> np.ndarray:
    img = load_netpbm(path.read_bytes())
    mask = (img.pixels <= otsu_threshold(img)).astype(np.uint8)
    if mask.shape != (TEMPLATE_SIZE, TEMPLATE_SIZE):
        h, w = mask.shape
        rows = (np.arange(TEMPLATE_SIZE) * h) // TEMPLATE_SIZE
        cols = (np.arange(TEMPLATE_SIZE) * w) // TEMPLATE_SIZE
        mask = mask[np.ix_(rows, cols)]
    return mask


def generate_dataset(out_dir: Path, cfg: SynthConfig) -> list[ManifestEntry]:
    """Write the synthetic corpus (PGM files + manifest.csv) under out_dir.

    Samples are drawn class-major, sample-minor from a single seeded stream:
    per sample a shift dx then dy in [-shift, shift], then one flip decision
    per canvas pixel in row-major order.  Ink is written as 0 on a 255
    background.  The first floor(per_class * train_fraction) samples of each
    class form the train split.
    """
    if cfg.templates_dir is not None:
        templates = []
        for label in LABELS:
            path = cfg.templates_dir / f"{label}.pgm"
            if not path.is_file():
                raise InputError("E_TEMPLATE_MISSING", f"no template for '{label}' at {path}")
            templates.append(_template_from_file(path))
    else:
        templates = [procedural_template(k) for k in range(N_CLASSES)]

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError("E_IO", f"cannot create {out_dir}: {exc}") from exc

    n_train = math.floor(cfg.per_class * cfg.train_fraction)
    span = 2 * cfg.shift + 1
    rng = SplitMix64(cfg.seed)
    entries: list[ManifestEntry] = []
    rows = [MANIFEST_HEADER]
    for k, label in enumerate(LABELS):
        for idx in range(cfg.per_class):
            dx = rng.next() % span - cfg.shift
            dy = rng.next() % span - cfg.shift
            canvas = np.zeros((CANVAS_SIZE, CANVAS_SIZE), dtype=np.uint8)
            r0, c0 = 4 + dy, 4 + dx
            canvas[r0 : r0 + TEMPLATE_SIZE, c0 : c0 + TEMPLATE_SIZE] = templates[k]
            for r in range(CANVAS_SIZE):
                for c in range(CANVAS_SIZE):
                    if rng.next_unit() < cfg.noise:
                        canvas[r, c] ^= 1
            gray = GrayImage(((1 - canvas) * 255).astype(np.uint8))
            name = f"{label}_{idx}.pgm"
            path = out_dir / name
            try:
                path.write_bytes(save_pgm(gray))
            except OSError as exc:
                raise InputError("E_IO", f"cannot write {path}: {exc}") from exc
            split = "train" if idx < n_train else "test"
            rows.append(f"{name},{label},{split}")
            entries.append(ManifestEntry(path=path, label=label, split=split))

    try:
        (out_dir / "manifest.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError("E_IO", f"cannot write manifest: {exc}") from exc
    return entries


def label_index(label: str) -> int:
    if label not in LABEL_INDEX:
        raise PipelineError("E_LABEL", f"unknown label '{label}'")
    return LABEL_INDEX[label]
