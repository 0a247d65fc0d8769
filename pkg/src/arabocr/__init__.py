"""Offline Arabic handwritten character recognition pipeline.

Preprocessing (Netpbm I/O, Otsu binarization, denoise), glyph segmentation
with diacritic grouping and right-to-left ordering, a 58-dimensional glyph
descriptor with variance-based selection, a deterministic two-layer
perceptron classifier, a synthetic corpus generator, and evaluation tooling.
"""

from .errors import InputError, OcrError, PipelineError

__all__ = ["InputError", "OcrError", "PipelineError"]
__version__ = "0.1.0"
