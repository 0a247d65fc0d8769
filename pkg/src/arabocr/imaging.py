"""Raster input/output and binarization.

Images are numpy arrays wrapped in thin frozen dataclasses.  ``GrayImage``
holds uint8 intensities; ``BinaryImage`` holds a {0,1} ink mask where
1 = foreground = ink (dark pixels).  All functions here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

_WS = frozenset(b" \t\r\n\x0b\x0c")


@dataclass(frozen=True)
class GrayImage:
    """Grayscale raster, row-major uint8 intensities in [0, 255]."""

    pixels: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2 or p.size == 0:
            raise ValueError("GrayImage needs a non-empty 2-D array")
        if p.dtype != np.uint8:
            if p.min() < 0 or p.max() > 255:
                raise ValueError("intensities must lie in [0, 255]")
            p = p.astype(np.uint8)
        object.__setattr__(self, "pixels", p)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BinaryImage:
    """Thresholded raster; 1 marks ink, 0 marks background."""

    pixels: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2 or p.size == 0:
            raise ValueError("BinaryImage needs a non-empty 2-D array")
        if p.dtype != np.uint8:
            p = p.astype(np.uint8)
        if not np.isin(p, (0, 1)).all():
            raise ValueError("binary pixels must be 0 or 1")
        object.__setattr__(self, "pixels", p)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def rgb_to_gray(r: int, g: int, b: int) -> int:
    """Collapse an RGB triple to luma, round-half-up, clamped to [0, 255]."""
    y = 0.299 * r + 0.587 * g + 0.114 * b
    return min(255, max(0, int(math.floor(y + 0.5))))


def load_netpbm(data: bytes) -> GrayImage:
    """Parse a Netpbm file (P2/P5 graymap or P3/P6 pixmap, maxval <= 255).

    Pixmaps are collapsed per pixel with the same luma weights as
    :func:`rgb_to_gray`.  Header comments (``#`` to end of line) are allowed.
    Raises ``InputError`` with code E_FORMAT (and a byte offset) on anything
    malformed.
    """

    def fail(offset: int, what: str):
        raise InputError("E_FORMAT", f"{what} at byte {offset}")

    if len(data) < 2:
        fail(0, "not a netpbm file")
    magic = bytes(data[0:2])
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        fail(0, f"unsupported magic {magic!r}")

    pos = 2

    def next_token() -> tuple[bytes, int]:
        nonlocal pos
        while pos < len(data):
            ch = data[pos]
            if ch in _WS:
                pos += 1
            elif ch == 0x23:  # '#' comment runs to end of line
                while pos < len(data) and data[pos] != 0x0A:
                    pos += 1
            else:
                break
        if pos >= len(data):
            fail(len(data), "truncated header")
        start = pos
        while pos < len(data) and data[pos] not in _WS and data[pos] != 0x23:
            pos += 1
        return data[start:pos], start

    def next_int(what: str, lo: int, hi: int) -> int:
        tok, off = next_token()
        if not tok.isdigit():
            fail(off, f"bad {what} token {tok!r}")
        value = int(tok)
        if not lo <= value <= hi:
            fail(off, f"{what} {value} outside [{lo}, {hi}]")
        return value

    width = next_int("width", 1, 1 << 30)
    height = next_int("height", 1, 1 << 30)
    maxval = next_int("maxval", 1, 255)

    channels = 3 if magic in (b"P3", b"P6") else 1
    n_samples = width * height * channels

    if magic in (b"P5", b"P6"):
        if pos >= len(data) or data[pos] not in _WS:
            fail(pos, "missing single whitespace after maxval")
        pos += 1
        raster = data[pos : pos + n_samples]
        if len(raster) < n_samples:
            fail(len(data), f"truncated raster, expected {n_samples} bytes")
        samples = np.frombuffer(raster, dtype=np.uint8, count=n_samples)
        if maxval < 255 and samples.max() > maxval:
            bad = pos + int(np.argmax(samples > maxval))
            fail(bad, f"sample exceeds maxval {maxval}")
    else:
        values = []
        for _ in range(n_samples):
            values.append(next_int("sample", 0, maxval))
        samples = np.array(values, dtype=np.uint8)

    if channels == 1:
        return GrayImage(samples.reshape(height, width))
    rgb = samples.reshape(height, width, 3).astype(np.float64)
    # same op order as rgb_to_gray so scalar and vector paths agree bit-for-bit
    y = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    gray = np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)
    return GrayImage(gray)


def otsu_threshold(img: GrayImage) -> int:
    """Global threshold maximizing between-class variance.

    Class 0 is "pixels <= t", class 1 is "pixels > t".  The score
    omega0*omega1*(mu0-mu1)^2 is compared as an exact rational
    (d^2 / (n0*n1) with d = s0*n1 - s1*n0, all Python ints) so the argmax
    is the true mathematical one and ties break to the smallest t.
    """
    hist = [int(c) for c in np.bincount(img.pixels.ravel(), minlength=256)]
    total_n = sum(hist)
    total_s = sum(v * c for v, c in enumerate(hist))

    best_t = 0
    best_num, best_den = -1, 1
    n0 = s0 = 0
    for t in range(256):
        n0 += hist[t]
        s0 += t * hist[t]
        n1 = total_n - n0
        if n0 == 0 or n1 == 0:
            num, den = 0, 1
        else:
            d = s0 * n1 - (total_s - s0) * n0
            num, den = d * d, n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def binarize(img: GrayImage, t: int) -> BinaryImage:
    """Mark every pixel with intensity <= t as ink."""
    return BinaryImage((img.pixels <= t).astype(np.uint8))


def denoise(img: BinaryImage) -> BinaryImage:
    """Clear foreground pixels with zero foreground 8-neighbors.

    Single pass against the input mask, never iterated: anything stronger
    would eat the detached dots Arabic letters rely on.
    """
    p = img.pixels
    padded = np.pad(p.astype(np.int32), 1)
    neighbors = (
        padded[:-2, :-2] + padded[:-2, 1:-1] + padded[:-2, 2:]
        + padded[1:-1, :-2] + padded[1:-1, 2:]
        + padded[2:, :-2] + padded[2:, 1:-1] + padded[2:, 2:]
    )
    out = np.where((p == 1) & (neighbors == 0), 0, p).astype(np.uint8)
    return BinaryImage(out)


def save_pgm(img: GrayImage) -> bytes:
    """Serialize as binary PGM (P5, maxval 255); inverse of load_netpbm."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()
