"""Error types shared across the pipeline.

Every failure carries a stable machine-readable ``code`` (``E_FORMAT``,
``E_EMPTY``, ...) so callers and the CLI can react without parsing prose.
"""


class OcrError(Exception):
    """Base class for all pipeline failures."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class InputError(OcrError):
    """Malformed or missing external input (image file, manifest, model file)."""


class PipelineError(OcrError):
    """Semantic failure inside the pipeline (empty glyph, dimension mismatch)."""
