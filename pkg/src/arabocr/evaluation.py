"""Scoring a trained model on a labeled split.

Also home to the image-to-glyph pipeline helpers shared by training,
recognition and evaluation: Otsu binarization, denoise, component grouping,
reading order, normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import LABELS, ManifestEntry, label_index
from .errors import OcrError, PipelineError
from .features import extract_features
from .imaging import GrayImage, binarize, denoise, load_netpbm, otsu_threshold
from .network import Mlp, predict
from .segmentation import (
    Glyph,
    NormalizedGlyph,
    connected_components,
    crop_normalize,
    group_diacritics,
    sort_reading_order,
)

N = len(LABELS)


@dataclass(frozen=True)
class EvalReport:
    total: int
    correct: int
    accuracy: float
    confusion: np.ndarray  # (28, 28) counts, row = truth, col = prediction
    precision: np.ndarray  # per class, 0/0 -> 0
    recall: np.ndarray
    errors: int  # images that failed the pipeline and were not scored


def page_glyphs(gray: GrayImage) -> list[tuple[Glyph, NormalizedGlyph]]:
    """Segment a page into normalized glyphs, right-to-left reading order."""
    binary = denoise(binarize(gray, otsu_threshold(gray)))
    glyphs = sort_reading_order(group_diacritics(connected_components(binary)))
    return [(g, crop_normalize(g, binary)) for g in glyphs]


def character_features(gray: GrayImage) -> np.ndarray:
    """Feature vector of the largest glyph on a single-character image."""
    pairs = page_glyphs(gray)
    if not pairs:
        raise PipelineError("E_EMPTY", "image has no foreground glyphs")
    _, norm = max(pairs, key=lambda pair: pair[0].area)
    return extract_features(norm)


def evaluate(m: Mlp, entries: Sequence[ManifestEntry]) -> EvalReport:
    """Run the full pipeline on every entry and tally a confusion matrix.

    Per-image pipeline failures are counted in ``errors`` instead of
    crashing; scored images alone define total/accuracy.
    """
    if not len(entries):
        raise PipelineError("E_EMPTY_SPLIT", "no entries to evaluate")
    confusion = np.zeros((N, N), dtype=np.int64)
    failures = 0
    for entry in entries:
        truth = label_index(entry.label)
        try:
            vec = character_features(load_netpbm(entry.path.read_bytes()))
            pred, _ = predict(m, vec)
        except (OcrError, OSError):
            failures += 1
            continue
        confusion[truth, pred] += 1

    total = int(confusion.sum())
    if total == 0:
        raise PipelineError("E_EMPTY_SPLIT", "every image failed the pipeline")
    correct = int(np.trace(confusion))
    col_sums = confusion.sum(axis=0)
    row_sums = confusion.sum(axis=1)
    diag = np.diag(confusion)
    with np.errstate(invalid="ignore"):
        precision = np.where(col_sums > 0, diag / np.maximum(col_sums, 1), 0.0)
        recall = np.where(row_sums > 0, diag / np.maximum(row_sums, 1), 0.0)
    return EvalReport(
        total=total,
        correct=correct,
        accuracy=correct / total,
        confusion=confusion,
        precision=precision,
        recall=recall,
        errors=failures,
    )


def render_report(r: EvalReport) -> tuple[str, bytes]:
    """Summary line plus the confusion matrix as labeled CSV (29x29 cells)."""
    summary = f"accuracy {r.accuracy:.4f} ({r.correct}/{r.total})"
    rows = ["," + ",".join(LABELS)]
    for i, label in enumerate(LABELS):
        rows.append(label + "," + ",".join(str(int(v)) for v in r.confusion[i]))
    return summary, ("\n".join(rows) + "\n").encode("ascii")
