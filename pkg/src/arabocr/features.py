"""Fixed 58-dimensional glyph descriptor and variance-based selection.

Feature layout (all entries land in [0, 1]):

    f[0:16]   4x4 zone ink densities, zone (zr, zc) = rows 4zr..4zr+3 x
              cols 4zc..4zc+3, count/16, index 4*zr + zc
    f[16:32]  row projections, count/16, top to bottom
    f[32:48]  column projections, count/16, left to right
    f[48]     aspect, src_width / (src_width + src_height)
    f[49]     global ink density, count/256
    f[50:52]  ink centroid, column/15 then row/15
    f[52:55]  crossing counts of rows 3, 7, 11, each /8
    f[55:58]  crossing counts of columns 3, 7, 11, each /8

A crossing is a background-to-foreground transition along the scan line
(position 0 counts when it is ink).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PipelineError
from .segmentation import NormalizedGlyph

N_FEATURES = 58
SCAN_LINES = (3, 7, 11)
VARIANCE_EPS = 1e-12


@dataclass(frozen=True)
class FeatureMask:
    """Boolean keep-flags over the 58 feature slots."""

    keep: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.keep, dtype=bool)
        if k.shape != (N_FEATURES,):
            raise ValueError(f"mask must cover {N_FEATURES} features")
        if not k.any():
            raise ValueError("mask must keep at least one feature")
        object.__setattr__(self, "keep", k)

    @property
    def kept_count(self) -> int:
        return int(self.keep.sum())


def _crossings(line: np.ndarray) -> int:
    starts = (line == 1) & (np.concatenate(([0], line[:-1])) == 0)
    return int(starts.sum())


def extract_features(g: NormalizedGlyph) -> np.ndarray:
    """Measure the 58 descriptors of a normalized glyph."""
    grid = g.grid.astype(np.int64)
    ink = int(grid.sum())
    if ink == 0:
        raise PipelineError("E_EMPTY", "cannot extract features from a blank grid")

    f = np.empty(N_FEATURES, dtype=np.float64)
    f[0:16] = grid.reshape(4, 4, 4, 4).sum(axis=(1, 3)).ravel() / 16.0
    f[16:32] = grid.sum(axis=1) / 16.0
    f[32:48] = grid.sum(axis=0) / 16.0
    f[48] = g.src_width / (g.src_width + g.src_height)
    f[49] = ink / 256.0
    rows, cols = np.nonzero(grid)
    f[50] = cols.mean() / 15.0
    f[51] = rows.mean() / 15.0
    for k, r in enumerate(SCAN_LINES):
        f[52 + k] = _crossings(grid[r, :]) / 8.0
    for k, c in enumerate(SCAN_LINES):
        f[55 + k] = _crossings(grid[:, c]) / 8.0
    return f


def fit_feature_mask(training_vectors: Sequence[np.ndarray]) -> FeatureMask:
    """Keep the features whose population variance over the training set
    exceeds a tiny epsilon; constant features carry no class signal."""
    if not len(training_vectors):
        raise PipelineError("E_EMPTY", "no training vectors")
    stacked = np.vstack(training_vectors)
    keep = np.var(stacked, axis=0) > VARIANCE_EPS
    if not keep.any():
        raise PipelineError("E_DEGENERATE", "every feature is constant")
    return FeatureMask(keep)


def apply_mask(v: np.ndarray, m: FeatureMask) -> np.ndarray:
    """Project a 58-vector down to the kept entries, ascending index order."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (N_FEATURES,):
        raise PipelineError("E_DIM", f"expected {N_FEATURES} features, got {v.shape}")
    return v[m.keep]
