"""Two-layer perceptron: seeded init, forward pass, backprop, SGD training,
and a line-oriented text persistence format.

Training is strictly sequential and every random draw (weights, epoch
shuffles) comes from one SplitMix64 stream, so identical inputs give
bit-identical models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import LABELS
from .errors import InputError, PipelineError
from .features import N_FEATURES, FeatureMask, apply_mask
from .rng import SplitMix64

N_CLASSES = 28
MODEL_MAGIC = "AOCR1"

Sample = tuple[np.ndarray, int]


@dataclass(frozen=True)
class TrainConfig:
    hidden: int = 64
    lr: float = 0.1
    epochs: int = 30
    seed: int = 1

    def __post_init__(self):
        if self.hidden < 1 or self.epochs < 1 or self.lr <= 0:
            raise ValueError("hidden >= 1, epochs >= 1, lr > 0 required")


@dataclass
class Mlp:
    """Weights, biases, the feature mask, and the class label order."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    mask: FeatureMask
    classes: tuple[str, ...] = LABELS

    @property
    def d_in(self) -> int:
        return self.W1.shape[1]

    @property
    def d_hidden(self) -> int:
        return self.W1.shape[0]

    @property
    def d_out(self) -> int:
        return self.W2.shape[0]


@dataclass(frozen=True)
class Gradients:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray


def _default_mask(d_in: int) -> FeatureMask:
    # identity mask for the full feature set; a leading prefix otherwise,
    # which keeps toy models persistable
    if d_in > N_FEATURES:
        raise ValueError(f"d_in {d_in} exceeds {N_FEATURES}; pass an explicit mask")
    keep = np.zeros(N_FEATURES, dtype=bool)
    keep[:d_in] = True
    return FeatureMask(keep)


def _init_weights(
    rng: SplitMix64, hidden: int, d_in: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    def draw(rows: int, cols: int, bound: float) -> np.ndarray:
        out = np.empty((rows, cols), dtype=np.float64)
        for r in range(rows):
            for c in range(cols):
                out[r, c] = bound * (2.0 * rng.next_unit() - 1.0)
        return out

    a1 = math.sqrt(6.0 / (d_in + hidden))
    a2 = math.sqrt(6.0 / (hidden + N_CLASSES))
    W1 = draw(hidden, d_in, a1)
    W2 = draw(N_CLASSES, hidden, a2)
    return W1, np.zeros(hidden), W2, np.zeros(N_CLASSES)


def init_network(
    seed: int,
    hidden: int,
    d_in: int,
    mask: FeatureMask | None = None,
    classes: tuple[str, ...] = LABELS,
) -> Mlp:
    """Xavier-style uniform init, drawn row-major W1 then W2 from one stream.

    Bound a = sqrt(6 / (fan_in + fan_out)); biases start at zero.
    """
    if hidden < 1 or d_in < 1:
        raise ValueError("hidden and d_in must be >= 1")
    if mask is None:
        mask = _default_mask(d_in)
    if mask.kept_count != d_in:
        raise ValueError("mask keeps a different count than d_in")
    W1, b1, W2, b2 = _init_weights(SplitMix64(seed), hidden, d_in)
    return Mlp(W1=W1, b1=b1, W2=W2, b2=b2, mask=mask, classes=classes)


def _sigmoid(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    # floor at DBL_MIN so every probability stays strictly positive even for
    # logit spreads past the exp underflow point
    e = np.maximum(e, np.finfo(np.float64).tiny)
    return e / e.sum()


def _hidden_and_probs(m: Mlp, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m.d_in,):
        raise PipelineError("E_DIM", f"expected input of length {m.d_in}, got {x.shape}")
    h = _sigmoid(m.W1 @ x + m.b1)
    z = m.W2 @ h + m.b2
    return h, _softmax(z)


def forward(m: Mlp, x: np.ndarray) -> np.ndarray:
    """Class probabilities: sigmoid hidden layer, softmax output."""
    return _hidden_and_probs(m, x)[1]


def loss_and_gradients(m: Mlp, x: np.ndarray, y: int) -> tuple[float, Gradients]:
    """Cross-entropy loss and its backprop gradients for one sample."""
    if not 0 <= y < m.d_out:
        raise PipelineError("E_DIM", f"class index {y} outside [0, {m.d_out})")
    x = np.asarray(x, dtype=np.float64)
    h, p = _hidden_and_probs(m, x)
    loss = -math.log(p[y])
    dz = p.copy()
    dz[y] -= 1.0
    dh = m.W2.T @ dz
    da = dh * h * (1.0 - h)
    grads = Gradients(
        W1=np.outer(da, x),
        b1=da,
        W2=np.outer(dz, h),
        b2=dz,
    )
    return loss, grads


def train(
    samples: Sequence[Sample],
    cfg: TrainConfig,
    mask: FeatureMask | None = None,
    classes: tuple[str, ...] = LABELS,
) -> tuple[Mlp, list[float]]:
    """Per-sample SGD with a Fisher-Yates reshuffle each epoch.

    The shuffle consumes the same SplitMix64 stream that initialised the
    weights, so the whole run is a pure function of (samples, cfg).
    Returns the model and the mean loss per epoch in visit order.
    """
    if not len(samples):
        raise PipelineError("E_EMPTY_DATASET", "no training samples")
    d_in = len(samples[0][0])
    vectors = []
    for v, y in samples:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (d_in,):
            raise PipelineError("E_DIM", "training vectors differ in length")
        if not 0 <= y < N_CLASSES:
            raise PipelineError("E_DIM", f"class index {y} outside [0, {N_CLASSES})")
        vectors.append((v, int(y)))

    if mask is None:
        mask = _default_mask(d_in)
    if mask.kept_count != d_in:
        raise PipelineError("E_DIM", "mask keeps a different count than d_in")
    rng = SplitMix64(cfg.seed)
    W1, b1, W2, b2 = _init_weights(rng, cfg.hidden, d_in)
    m = Mlp(W1=W1, b1=b1, W2=W2, b2=b2, mask=mask, classes=classes)

    n = len(vectors)
    order = list(range(n))
    history: list[float] = []
    for _ in range(cfg.epochs):
        for i in range(n - 1, 0, -1):
            j = rng.next() % (i + 1)
            order[i], order[j] = order[j], order[i]
        total = 0.0
        for idx in order:
            x, y = vectors[idx]
            loss, g = loss_and_gradients(m, x, y)
            total += loss
            m.W1 -= cfg.lr * g.W1
            m.b1 -= cfg.lr * g.b1
            m.W2 -= cfg.lr * g.W2
            m.b2 -= cfg.lr * g.b2
        history.append(total / n)
    return m, history


def predict(m: Mlp, v: np.ndarray) -> tuple[int, float]:
    """Class index and confidence for a full 58-entry feature vector.

    Applies the model's feature mask, then the forward pass; exact ties go
    to the lowest class index.
    """
    probs = forward(m, apply_mask(v, m.mask))
    idx = int(np.argmax(probs))
    return idx, float(probs[idx])


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def save_model(m: Mlp) -> bytes:
    """Serialize to the line-oriented AOCR1 text format (LF newlines)."""
    lines = [
        MODEL_MAGIC,
        f"dims {m.d_in} {m.d_hidden} {m.d_out}",
        "mask " + "".join("1" if k else "0" for k in m.mask.keep),
        "classes " + ",".join(m.classes),
    ]
    for arr in (m.W1, m.b1, m.W2, m.b2):
        lines.extend(_fmt(v) for v in arr.ravel())
    return ("\n".join(lines) + "\n").encode("ascii")


def load_model(data: bytes) -> Mlp:
    """Parse bytes produced by save_model; numeric values round-trip exactly."""
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise InputError("E_MAGIC", "not a model file (binary data)") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != MODEL_MAGIC:
        head = lines[0][:16] if lines else ""
        raise InputError("E_MAGIC", f"line 1: expected '{MODEL_MAGIC}', got '{head}'")

    if len(lines) < 4:
        raise InputError("E_TRUNCATED", f"line {len(lines) + 1}: header incomplete")

    dims = lines[1].split()
    if len(dims) != 4 or dims[0] != "dims" or not all(t.isdigit() for t in dims[1:]):
        raise InputError("E_DIM_MISMATCH", "line 2: expected 'dims <d_in> <H> <d_out>'")
    d_in, hidden, d_out = (int(t) for t in dims[1:])
    if d_out != N_CLASSES:
        raise InputError("E_DIM_MISMATCH", f"line 2: output dim must be {N_CLASSES}")

    if not lines[2].startswith("mask "):
        raise InputError("E_DIM_MISMATCH", "line 3: expected 'mask <58 bits>'")
    bits = lines[2][5:]
    if len(bits) != N_FEATURES or set(bits) - {"0", "1"}:
        raise InputError("E_DIM_MISMATCH", f"line 3: mask must be {N_FEATURES} 0/1 chars")
    mask = FeatureMask(np.array([ch == "1" for ch in bits]))
    if mask.kept_count != d_in:
        raise InputError(
            "E_DIM_MISMATCH", f"line 3: mask keeps {mask.kept_count}, dims say {d_in}"
        )

    if not lines[3].startswith("classes "):
        raise InputError("E_DIM_MISMATCH", "line 4: expected 'classes <labels>'")
    classes = tuple(lines[3][8:].split(","))
    if len(classes) != N_CLASSES:
        raise InputError("E_DIM_MISMATCH", f"line 4: expected {N_CLASSES} labels")

    counts = (hidden * d_in, hidden, d_out * hidden, d_out)
    n_values = sum(counts)
    value_lines = lines[4:]
    if len(value_lines) < n_values:
        raise InputError(
            "E_TRUNCATED",
            f"line {len(lines) + 1}: expected {n_values} values, found {len(value_lines)}",
        )
    if len(value_lines) > n_values:
        raise InputError("E_TRUNCATED", f"line {5 + n_values}: trailing data")
    values = np.empty(n_values, dtype=np.float64)
    for i, tok in enumerate(value_lines):
        try:
            values[i] = float(tok)
        except ValueError as exc:
            raise InputError("E_FORMAT", f"line {5 + i}: bad value '{tok}'") from exc
    if not np.isfinite(values).all():
        bad = int(np.argmin(np.isfinite(values)))
        raise InputError("E_FORMAT", f"line {5 + bad}: non-finite value")

    splits = np.split(values, np.cumsum(counts)[:-1])
    return Mlp(
        W1=splits[0].reshape(hidden, d_in),
        b1=splits[1],
        W2=splits[2].reshape(d_out, hidden),
        b2=splits[3],
        mask=mask,
        classes=classes,
    )
