"""Glyph extraction from a binary page.

Connected components (8-connectivity, two-pass union-find scan), grouping of
detached diacritic dots onto their letter bodies, right-to-left reading
order, and nearest-neighbor size normalization to a 16x16 grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import PipelineError
from .imaging import BinaryImage

GRID = 16


@dataclass(frozen=True)
class BBox:
    """Inclusive pixel bounds."""

    row0: int
    col0: int
    row1: int
    col1: int

    def __post_init__(self):
        if self.row0 > self.row1 or self.col0 > self.col1:
            raise ValueError("degenerate bbox")

    @property
    def width(self) -> int:
        return self.col1 - self.col0 + 1

    @property
    def height(self) -> int:
        return self.row1 - self.row0 + 1

    def union(self, other: "BBox") -> "BBox":
        return BBox(
            min(self.row0, other.row0),
            min(self.col0, other.col0),
            max(self.row1, other.row1),
            max(self.col1, other.col1),
        )


def _bbox_of(pixels: Iterable[tuple[int, int]]) -> BBox:
    rows = [p[0] for p in pixels]
    cols = [p[1] for p in pixels]
    return BBox(min(rows), min(cols), max(rows), max(cols))


@dataclass(frozen=True)
class Component:
    """One 8-connected blob of ink."""

    pixels: frozenset[tuple[int, int]]
    bbox: BBox

    @classmethod
    def from_pixels(cls, pixels: Iterable[tuple[int, int]]) -> "Component":
        pset = frozenset(pixels)
        if not pset:
            raise ValueError("component needs at least one pixel")
        return cls(pset, _bbox_of(pset))

    @property
    def area(self) -> int:
        return len(self.pixels)


@dataclass(frozen=True)
class Glyph:
    """A letter body plus zero or more attached diacritic components."""

    members: tuple[Component, ...]
    bbox: BBox

    @classmethod
    def of(cls, members: Iterable[Component]) -> "Glyph":
        mem = tuple(members)
        if not mem:
            raise ValueError("glyph needs at least one member")
        box = mem[0].bbox
        for c in mem[1:]:
            box = box.union(c.bbox)
        return cls(mem, box)

    @property
    def area(self) -> int:
        return sum(c.area for c in self.members)

    def all_pixels(self) -> set[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        for c in self.members:
            out |= c.pixels
        return out


@dataclass(frozen=True)
class NormalizedGlyph:
    """16x16 binary grid plus the source bbox dimensions it was scaled from."""

    grid: np.ndarray
    src_width: int
    src_height: int

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.uint8)
        if g.shape != (GRID, GRID):
            raise ValueError("grid must be 16x16")
        if not g.any():
            raise ValueError("normalized glyph must keep at least one ink bit")
        if self.src_width < 1 or self.src_height < 1:
            raise ValueError("source dimensions must be >= 1")
        object.__setattr__(self, "grid", g)


def connected_components(img: BinaryImage) -> list[Component]:
    """Label 8-connected foreground, two-pass scan with union-find.

    Components come back ordered by the raster position of each one's
    first-encountered pixel.
    """
    p = img.pixels
    h, w = p.shape
    labels = np.full((h, w), -1, dtype=np.int64)
    parent: list[int] = []

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for r in range(h):
        for c in range(w):
            if not p[r, c]:
                continue
            hits = []
            if r > 0:
                if c > 0 and labels[r - 1, c - 1] >= 0:
                    hits.append(labels[r - 1, c - 1])
                if labels[r - 1, c] >= 0:
                    hits.append(labels[r - 1, c])
                if c + 1 < w and labels[r - 1, c + 1] >= 0:
                    hits.append(labels[r - 1, c + 1])
            if c > 0 and labels[r, c - 1] >= 0:
                hits.append(labels[r, c - 1])
            if not hits:
                lab = len(parent)
                parent.append(lab)
            else:
                roots = [find(int(x)) for x in hits]
                lab = min(roots)
                for root in roots:
                    parent[root] = lab
            labels[r, c] = lab

    groups: dict[int, list[tuple[int, int]]] = {}
    order: list[int] = []
    for r in range(h):
        for c in range(w):
            if labels[r, c] < 0:
                continue
            root = find(int(labels[r, c]))
            if root not in groups:
                groups[root] = []
                order.append(root)
            groups[root].append((r, c))

    return [Component.from_pixels(groups[root]) for root in order]


def _hoverlap(a: BBox, b: BBox) -> int:
    return max(0, min(a.col1, b.col1) - max(a.col0, b.col0) + 1)


def group_diacritics(
    components: list[Component], secondary_ratio: float = 0.25
) -> list[Glyph]:
    """Attach small detached marks to their letter bodies.

    A component is secondary when its area falls below ``secondary_ratio``
    times the largest component's area.  Dots sit above or below their body,
    so horizontal bbox overlap picks the owner; ties (and the zero-overlap
    case) fall back to nearest horizontal center, then lowest index.
    """
    if not components:
        return []
    cutoff = secondary_ratio * max(c.area for c in components)
    primary_idx = [i for i, c in enumerate(components) if c.area >= cutoff]
    if not primary_idx:
        return [Glyph.of([c]) for c in components]

    attached: dict[int, list[Component]] = {i: [] for i in primary_idx}
    for i, comp in enumerate(components):
        if i in attached:
            continue
        overlaps = {pi: _hoverlap(comp.bbox, components[pi].bbox) for pi in primary_idx}
        best_ov = max(overlaps.values())
        candidates = [pi for pi in primary_idx if overlaps[pi] == best_ov]
        csum = comp.bbox.col0 + comp.bbox.col1
        # integer twice-center-distance keeps the comparison exact
        owner = min(
            candidates,
            key=lambda pi: (
                abs(csum - (components[pi].bbox.col0 + components[pi].bbox.col1)),
                pi,
            ),
        )
        attached[owner].append(comp)

    return [Glyph.of([components[pi]] + attached[pi]) for pi in primary_idx]


def sort_reading_order(glyphs: list[Glyph]) -> list[Glyph]:
    """Right-to-left: descending right edge, ties by top row, then input order."""
    return sorted(glyphs, key=lambda g: (-g.bbox.col1, g.bbox.row0))


def crop_normalize(glyph: Glyph, page: BinaryImage | None = None) -> NormalizedGlyph:
    """Crop a glyph to its bbox and resample to 16x16 by nearest neighbor.

    Only the glyph's own member pixels are kept, so foreign ink inside the
    bbox never leaks in; the ``page`` argument is accepted for symmetry with
    the rest of the pipeline but the member pixel sets already carry
    everything needed.  Raises E_EMPTY when no ink would survive.
    """
    pixels = glyph.all_pixels()
    if not pixels:
        raise PipelineError("E_EMPTY", "glyph has no foreground pixels")
    box = glyph.bbox
    h, w = box.height, box.width
    crop = np.zeros((h, w), dtype=np.uint8)
    for r, c in pixels:
        crop[r - box.row0, c - box.col0] = 1
    rows = (np.arange(GRID) * h) // GRID
    cols = (np.arange(GRID) * w) // GRID
    grid = crop[np.ix_(rows, cols)]
    if not grid.any():
        # possible only when the bbox exceeds 16px and every member pixel
        # dodges the sampled rows/columns
        raise PipelineError("E_EMPTY", "glyph invisible after resampling")
    return NormalizedGlyph(grid=grid, src_width=w, src_height=h)
